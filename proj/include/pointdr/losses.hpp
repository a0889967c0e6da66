#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pointdr/bank.hpp"
#include "pointdr/point_cloud.hpp"

namespace pointdr {

struct ContrastiveResult {
  double loss = 0.0;
  std::vector<double> grad;  // n x dim, w.r.t. the embeddings; empty if !with_grad
  std::size_t counted = 0;   // contributing points
};

// InfoNCE against per-class keys:
//   L = (1/N') sum_i -log( exp(f_i . K[y_i] / tau) / sum_j exp(f_i . K_j / tau) )
// where j runs over the valid key columns only, N' is the number of
// contributing points, and a point contributes iff its label is below
// `classes` and that label's column is valid. With nothing contributing the
// loss and gradients are zero. tau must be positive and finite.
ContrastiveResult contrastive_loss(std::span<const double> embeds, std::size_t n,
                                   std::size_t dim, std::span<const TrainId> labels,
                                   const PrototypeView& keys, double tau,
                                   bool with_grad = true);

struct CrossEntropyResult {
  double loss = 0.0;
  std::vector<double> grad;  // n x classes, w.r.t. the logits; empty if !with_grad
  std::size_t counted = 0;
};

// Mean softmax cross-entropy over the points whose label is below `classes`;
// sentinel-labeled points contribute nothing, including to the gradient.
CrossEntropyResult softmax_cross_entropy(std::span<const double> logits,
                                         std::size_t n, std::size_t classes,
                                         std::span<const TrainId> labels,
                                         bool with_grad = true);

struct LossBreakdown {
  double ce = 0.0;
  double ct = 0.0;
  double lambda_ct = 0.0;
  double total = 0.0;  // always exactly ce + lambda_ct * ct
};

inline LossBreakdown combine_losses(double ce, double ct, double lambda_ct) {
  return {ce, ct, lambda_ct, ce + lambda_ct * ct};
}

}  // namespace pointdr
