#pragma once

#include <cstdint>
#include <vector>

#include "pointdr/model.hpp"

namespace pointdr {

// Momentum SGD with additive weight decay, applied uniformly to every
// tensor:  v = mu * v + (g + wd * w);  w -= lr * v.
struct SgdConfig {
  double momentum = 0.9;
  double weight_decay = 0.0;

  void validate() const;
};

class SgdOptimizer {
 public:
  explicit SgdOptimizer(SgdConfig cfg = {});

  const SgdConfig& config() const { return cfg_; }

  // Applies one update from the model's accumulated gradients. Velocity
  // buffers are created zeroed on first use and must keep their shapes.
  void step(Model& model, double lr);

 private:
  SgdConfig cfg_;
  std::vector<std::vector<double>> velocity_;
};

// Polynomial decay: base * (1 - step/total)^power; step is clamped to total.
double poly_lr(double base, std::uint64_t step, std::uint64_t total,
               double power = 0.9);

}  // namespace pointdr
