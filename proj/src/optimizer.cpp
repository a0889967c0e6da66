#include "pointdr/optimizer.hpp"

#include <cmath>
#include <stdexcept>

#include "pointdr/kernels.hpp"

namespace pointdr {

void SgdConfig::validate() const {
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw std::invalid_argument("momentum outside [0, 1)");
  }
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw std::invalid_argument("weight_decay must be non-negative");
  }
}

SgdOptimizer::SgdOptimizer(SgdConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void SgdOptimizer::step(Model& model, double lr) {
  if (!std::isfinite(lr)) throw std::invalid_argument("non-finite learning rate");
  auto tensors = model.tensors();
  if (velocity_.empty()) {
    velocity_.resize(tensors.size());
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      velocity_[i].assign(tensors[i].value->size(), 0.0);
    }
  }
  if (velocity_.size() != tensors.size()) {
    throw std::invalid_argument("optimizer bound to a different model shape");
  }
  const auto& k = kern::ops();
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    auto& [w, g] = tensors[i];
    if (velocity_[i].size() != w->size()) {
      throw std::invalid_argument("optimizer bound to a different model shape");
    }
    k.sgd_update(w->data(), velocity_[i].data(), g->data(), w->size(), lr,
                 cfg_.momentum, cfg_.weight_decay);
  }
}

double poly_lr(double base, std::uint64_t step, std::uint64_t total, double power) {
  if (total == 0) throw std::invalid_argument("total steps must be > 0");
  if (step >= total) return 0.0;
  const double frac = 1.0 - static_cast<double>(step) / static_cast<double>(total);
  return base * std::pow(frac, power);
}

}  // namespace pointdr
