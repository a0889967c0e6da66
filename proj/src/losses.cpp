#include "pointdr/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "pointdr/kernels.hpp"

namespace pointdr {

ContrastiveResult contrastive_loss(std::span<const double> embeds, std::size_t n,
                                   std::size_t dim, std::span<const TrainId> labels,
                                   const PrototypeView& keys, double tau,
                                   bool with_grad) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("tau must be positive and finite");
  }
  if (embeds.size() != n * dim) {
    throw std::invalid_argument("embedding buffer size does not match n x dim");
  }
  if (labels.size() != n) {
    throw std::invalid_argument("label count does not match n");
  }
  if (keys.dim != dim) {
    throw std::invalid_argument("key dimension does not match the embeddings");
  }
  const auto& k = kern::ops();

  std::vector<std::size_t> cols;  // valid key columns
  for (std::size_t c = 0; c < keys.classes; ++c) {
    if (keys.is_valid(c)) cols.push_back(c);
  }

  ContrastiveResult res;
  if (with_grad) res.grad.assign(n * dim, 0.0);
  if (cols.empty()) return res;

  std::vector<double> s(cols.size());  // similarities / tau
  std::vector<double> p(cols.size());
  double loss_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const TrainId y = labels[i];
    if (y >= keys.classes || !keys.is_valid(y)) continue;
    const double* f = embeds.data() + i * dim;
    std::size_t target = cols.size();
    for (std::size_t j = 0; j < cols.size(); ++j) {
      s[j] = k.dot(f, keys.column(cols[j]), dim) / tau;
      if (cols[j] == y) target = j;
    }
    const double m = k.max(s.data(), s.size());
    double z = 0.0;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      p[j] = std::exp(s[j] - m);
      z += p[j];
    }
    loss_sum += std::log(z) - (s[target] - m);
    if (with_grad) {
      double* g = res.grad.data() + i * dim;
      for (std::size_t j = 0; j < cols.size(); ++j) {
        double coef = p[j] / z;
        if (j == target) coef -= 1.0;
        k.axpy(coef / tau, keys.column(cols[j]), g, dim);
      }
    }
    res.counted += 1;
  }

  if (res.counted == 0) return res;
  res.loss = loss_sum / static_cast<double>(res.counted);
  if (with_grad) {
    k.scale(res.grad.data(), res.grad.size(), 1.0 / static_cast<double>(res.counted));
  }
  return res;
}

CrossEntropyResult softmax_cross_entropy(std::span<const double> logits,
                                         std::size_t n, std::size_t classes,
                                         std::span<const TrainId> labels,
                                         bool with_grad) {
  if (classes == 0) throw std::invalid_argument("classes must be > 0");
  if (logits.size() != n * classes) {
    throw std::invalid_argument("logit buffer size does not match n x classes");
  }
  if (labels.size() != n) {
    throw std::invalid_argument("label count does not match n");
  }
  const auto& k = kern::ops();

  CrossEntropyResult res;
  if (with_grad) res.grad.assign(n * classes, 0.0);

  std::vector<double> p(classes);
  double loss_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const TrainId y = labels[i];
    if (y >= classes) continue;
    const double* row = logits.data() + i * classes;
    const double m = k.max(row, classes);
    double z = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      p[c] = std::exp(row[c] - m);
      z += p[c];
    }
    loss_sum += std::log(z) - (row[y] - m);
    if (with_grad) {
      double* g = res.grad.data() + i * classes;
      for (std::size_t c = 0; c < classes; ++c) g[c] = p[c] / z;
      g[y] -= 1.0;
    }
    res.counted += 1;
  }

  if (res.counted == 0) {
    return res;
  }
  res.loss = loss_sum / static_cast<double>(res.counted);
  if (with_grad) {
    k.scale(res.grad.data(), res.grad.size(), 1.0 / static_cast<double>(res.counted));
  }
  return res;
}

}  // namespace pointdr
