#include "pointdr/bank.hpp"

#include <stdexcept>
#include <utility>

namespace pointdr {

ClassAverage class_average(std::span<const double> embeds, std::size_t n,
                           std::size_t dim, std::span<const TrainId> labels,
                           std::size_t classes) {
  if (embeds.size() != n * dim) {
    throw std::invalid_argument("embedding buffer size does not match n x dim");
  }
  if (labels.size() != n) {
    throw std::invalid_argument("label count does not match n");
  }
  ClassAverage avg;
  avg.dim = dim;
  avg.classes = classes;
  avg.mean.assign(dim * classes, 0.0);
  avg.count.assign(classes, 0);
  avg.present.assign(classes, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const TrainId c = labels[i];
    if (c >= classes) continue;
    const double* e = embeds.data() + i * dim;
    double* m = avg.mean.data() + static_cast<std::size_t>(c) * dim;
    for (std::size_t j = 0; j < dim; ++j) m[j] += e[j];
    avg.count[c] += 1;
  }
  for (std::size_t c = 0; c < classes; ++c) {
    if (avg.count[c] == 0) continue;
    avg.present[c] = 1;
    double* m = avg.mean.data() + c * dim;
    for (std::size_t j = 0; j < dim; ++j) m[j] /= avg.count[c];
  }
  return avg;
}

MemoryBank::MemoryBank(std::size_t dim, std::size_t classes, double momentum)
    : dim_(dim), classes_(classes), momentum_(momentum) {
  if (dim == 0 || classes == 0) {
    throw std::invalid_argument("memory bank dimensions must be > 0");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw std::invalid_argument("bank momentum outside [0, 1)");
  }
  data_.assign(dim_ * classes_, 0.0);
  init_.assign(classes_, 0);
}

void MemoryBank::update(const ClassAverage& avg) {
  if (avg.dim != dim_ || avg.classes != classes_) {
    throw std::invalid_argument("class average shape does not match the bank");
  }
  for (std::size_t c = 0; c < classes_; ++c) {
    if (avg.present[c] == 0) continue;  // absent classes stay untouched
    const double* m = avg.mean.data() + c * dim_;
    double* b = data_.data() + c * dim_;
    if (init_[c] == 0) {
      for (std::size_t j = 0; j < dim_; ++j) b[j] = m[j];
      init_[c] = 1;
    } else {
      for (std::size_t j = 0; j < dim_; ++j) {
        b[j] = momentum_ * b[j] + (1.0 - momentum_) * m[j];
      }
    }
  }
}

void MemoryBank::restore(std::vector<double> data, std::vector<std::uint8_t> init) {
  if (data.size() != dim_ * classes_ || init.size() != classes_) {
    throw std::invalid_argument("restored bank shape mismatch");
  }
  data_ = std::move(data);
  init_ = std::move(init);
}

}  // namespace pointdr
