#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pointdr/point_cloud.hpp"

namespace pointdr {

// Read-only view over a D x C column-major key matrix with per-class
// validity. Both the memory bank and in-batch class averages expose this, so
// the contrastive loss has a single code path for either key source.
struct PrototypeView {
  std::size_t dim = 0;
  std::size_t classes = 0;
  const double* data = nullptr;        // column c starts at data + c * dim
  const std::uint8_t* valid = nullptr;

  const double* column(std::size_t c) const { return data + c * dim; }
  bool is_valid(std::size_t c) const { return valid[c] != 0; }
};

// Mean embedding per class over one batch. Classes without any contributing
// point have count 0 and a zero mean column.
struct ClassAverage {
  std::size_t dim = 0;
  std::size_t classes = 0;
  std::vector<double> mean;            // D x C column-major
  std::vector<std::uint32_t> count;
  std::vector<std::uint8_t> present;   // count > 0

  PrototypeView view() const { return {dim, classes, mean.data(), present.data()}; }
};

// embeds is n x dim row-major; points whose label is >= classes (the
// sentinels) do not contribute.
ClassAverage class_average(std::span<const double> embeds, std::size_t n,
                           std::size_t dim, std::span<const TrainId> labels,
                           std::size_t classes);

// Per-class prototype store updated by exponential moving average. Columns
// start uninitialized; the first observation of a class is copied verbatim,
// later ones blend with factor momentum. The bank is state only: nothing
// differentiates through it.
class MemoryBank {
 public:
  MemoryBank(std::size_t dim, std::size_t classes, double momentum = 0.99);

  std::size_t dim() const { return dim_; }
  std::size_t classes() const { return classes_; }
  double momentum() const { return momentum_; }

  bool initialized(std::size_t c) const { return init_[c] != 0; }
  const double* column(std::size_t c) const { return data_.data() + c * dim_; }

  void update(const ClassAverage& avg);

  PrototypeView view() const { return {dim_, classes_, data_.data(), init_.data()}; }

  // Serialization access; data is D x C column-major.
  const std::vector<double>& data() const { return data_; }
  const std::vector<std::uint8_t>& init_flags() const { return init_; }
  void restore(std::vector<double> data, std::vector<std::uint8_t> init);

 private:
  std::size_t dim_;
  std::size_t classes_;
  double momentum_;
  std::vector<double> data_;
  std::vector<std::uint8_t> init_;
};

}  // namespace pointdr
