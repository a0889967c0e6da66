#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pointdr/point_cloud.hpp"
#include "pointdr/voxel.hpp"

namespace pointdr {

struct ModelConfig {
  std::size_t feature_dim = kFeatureWidth;
  std::vector<std::size_t> encoder_hidden = {64, 64};
  std::size_t embed_dim = 32;              // encoder output width D
  std::size_t num_classes = kNumEvalClasses;
  double voxel_size = 0.5;

  // Fixed divisors applied to the input features before the first layer, so
  // mixed-unit features (metres, counts, reflectance) reach the encoder at
  // comparable magnitude. Empty selects the default for the standard feature
  // layout; it is part of the architecture and stored in checkpoints.
  std::vector<double> feature_scale;

  std::vector<double> resolved_feature_scale() const;

  void validate() const;  // throws std::invalid_argument
  bool operator==(const ModelConfig&) const = default;
};

// Dense layer, weights row-major [out x in]. Gradients accumulate until
// zero_grad.
struct Linear {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> w, b;
  std::vector<double> gw, gb;
};

class Model;

// Activation cache of one forward evaluation. Only Model::forward produces
// a valid pass; Model::backward rejects default-constructed passes and
// passes from another model instance.
class ForwardPass {
 public:
  ForwardPass() = default;

  std::size_t size() const { return n_; }
  bool valid() const { return owner_ != nullptr; }

  // n x D, rows L2-normalized (degenerate rows fall back to e0).
  const std::vector<double>& embeddings() const { return embed_; }
  // n x C.
  const std::vector<double>& logits() const { return logits_; }
  // n x D encoder output, input of projector and classifier.
  const std::vector<double>& encoded() const { return h_; }

 private:
  friend class Model;

  const Model* owner_ = nullptr;
  std::size_t n_ = 0;
  // Inputs and pre-activations per linear layer, encoder then projector.
  std::vector<std::vector<double>> enc_in_, enc_z_;
  std::vector<std::vector<double>> proj_in_, proj_z_;
  std::vector<double> h_;       // alias of last encoder pre-activation
  std::vector<double> norms_;   // per-row norm of the raw projector output
  std::vector<double> embed_;
  std::vector<double> logits_;
};

// Rows whose raw projector output has a norm below this fall back to the
// fixed unit vector e0 with zero gradient.
inline constexpr double kNormFloor = 1e-12;

// Per-point network: an encoder MLP over the input features, a linear
// classifier on the encoder output, and a two-layer projection head whose
// output is L2-normalized. forward is pure given the parameters; backward
// accumulates parameter gradients.
class Model {
 public:
  Model(ModelConfig cfg, std::uint64_t seed);

  const ModelConfig& config() const { return cfg_; }

  // feats is n x feature_dim row-major. Throws std::invalid_argument on a
  // size mismatch or non-finite input, NumericError when a layer produces a
  // non-finite activation.
  ForwardPass forward(std::span<const double> feats, std::size_t n) const;

  // Accumulates gradients. g_embed is n x D (w.r.t. the normalized
  // embeddings), g_logits is n x C; either may be empty for zero.
  void backward(const ForwardPass& pass, std::span<const double> g_embed,
                std::span<const double> g_logits);

  void zero_grad();

  struct TensorRef {
    std::vector<double>* value;
    std::vector<double>* grad;
  };
  // Every (param, grad) pair in fixed order: encoder, projector, classifier;
  // within a layer w before b.
  std::vector<TensorRef> tensors();
  std::size_t num_parameters() const;

  const std::vector<Linear>& encoder() const { return encoder_; }
  const std::vector<Linear>& projector() const { return projector_; }
  const Linear& classifier() const { return classifier_; }

 private:
  ModelConfig cfg_;
  std::vector<double> in_scale_;   // resolved feature divisors
  std::vector<Linear> encoder_;    // hidden layers with ReLU, last linear
  std::vector<Linear> projector_;  // D -> D -> D, ReLU between
  Linear classifier_;              // D -> C
};

}  // namespace pointdr
