#include "pointdr/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "pointdr/errors.hpp"
#include "pointdr/kernels.hpp"
#include "pointdr/rng.hpp"

namespace pointdr {
namespace {

constexpr std::uint64_t kInitStream = 0x1317;

Linear make_layer(std::size_t in, std::size_t out, std::uint64_t seed,
                  std::size_t layer_index) {
  Linear l;
  l.in = in;
  l.out = out;
  l.w.resize(in * out);
  l.b.assign(out, 0.0);
  l.gw.assign(in * out, 0.0);
  l.gb.assign(out, 0.0);
  Rng rng(derive_seed(seed, kInitStream, layer_index));
  const double limit = std::sqrt(6.0 / static_cast<double>(in));
  for (double& v : l.w) v = rng.uniform(-limit, limit);
  return l;
}

// y = x W^T + b for n rows.
void linear_forward(const Linear& l, const double* x, double* y, std::size_t n) {
  const auto& k = kern::ops();
  for (std::size_t r = 0; r < n; ++r) {
    const double* xr = x + r * l.in;
    double* yr = y + r * l.out;
    for (std::size_t o = 0; o < l.out; ++o) {
      yr[o] = l.b[o] + k.dot(l.w.data() + o * l.in, xr, l.in);
    }
  }
}

// Accumulates layer gradients from gy (n x out) and x (n x in); adds the
// input gradient into gx when non-null.
void linear_backward(Linear& l, const double* x, const double* gy, double* gx,
                     std::size_t n) {
  const auto& k = kern::ops();
  for (std::size_t r = 0; r < n; ++r) {
    const double* xr = x + r * l.in;
    const double* gyr = gy + r * l.out;
    for (std::size_t o = 0; o < l.out; ++o) {
      const double g = gyr[o];
      if (g == 0.0) continue;
      k.axpy(g, xr, l.gw.data() + o * l.in, l.in);
      l.gb[o] += g;
      if (gx != nullptr) k.axpy(g, l.w.data() + o * l.in, gx + r * l.in, l.in);
    }
  }
}

void check_finite(const std::vector<double>& m, std::size_t layer_index) {
  for (const double v : m) {
    if (!std::isfinite(v)) {
      throw NumericError("non-finite activation after linear layer " +
                             std::to_string(layer_index),
                         layer_index);
    }
  }
}

}  // namespace

std::vector<double> ModelConfig::resolved_feature_scale() const {
  if (!feature_scale.empty()) return feature_scale;
  if (feature_dim == kFeatureWidth) {
    // Offsets in voxel units, range against a nominal sensor reach,
    // occupancy against a typical crowded cell.
    const double v = voxel_size;
    return {v, v, v, 1.0, 30.0, 8.0, v, v, v};
  }
  return std::vector<double>(feature_dim, 1.0);
}

void ModelConfig::validate() const {
  if (feature_dim == 0) throw std::invalid_argument("feature_dim must be > 0");
  if (embed_dim == 0) throw std::invalid_argument("embed_dim must be > 0");
  if (num_classes == 0) throw std::invalid_argument("num_classes must be > 0");
  for (const std::size_t h : encoder_hidden) {
    if (h == 0) throw std::invalid_argument("encoder_hidden widths must be > 0");
  }
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) {
    throw std::invalid_argument("voxel_size must be positive");
  }
  if (!feature_scale.empty()) {
    if (feature_scale.size() != feature_dim) {
      throw std::invalid_argument("feature_scale width does not match feature_dim");
    }
    for (const double s : feature_scale) {
      if (!(s > 0.0) || !std::isfinite(s)) {
        throw std::invalid_argument("feature_scale entries must be positive");
      }
    }
  }
}

Model::Model(ModelConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
  cfg_.validate();
  in_scale_ = cfg_.resolved_feature_scale();
  std::size_t layer_index = 0;
  std::size_t in = cfg_.feature_dim;
  for (const std::size_t h : cfg_.encoder_hidden) {
    encoder_.push_back(make_layer(in, h, seed, layer_index++));
    in = h;
  }
  encoder_.push_back(make_layer(in, cfg_.embed_dim, seed, layer_index++));
  projector_.push_back(make_layer(cfg_.embed_dim, cfg_.embed_dim, seed, layer_index++));
  projector_.push_back(make_layer(cfg_.embed_dim, cfg_.embed_dim, seed, layer_index++));
  classifier_ = make_layer(cfg_.embed_dim, cfg_.num_classes, seed, layer_index++);
}

ForwardPass Model::forward(std::span<const double> feats, std::size_t n) const {
  if (feats.size() != n * cfg_.feature_dim) {
    throw std::invalid_argument("feature buffer size does not match n x feature_dim");
  }
  for (const double v : feats) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite input feature");
  }
  const auto& k = kern::ops();
  const std::size_t d = cfg_.embed_dim;

  ForwardPass p;
  p.owner_ = this;
  p.n_ = n;

  std::size_t layer_index = 0;
  p.enc_in_.resize(encoder_.size());
  p.enc_z_.resize(encoder_.size());
  p.enc_in_[0].resize(feats.size());
  const std::size_t fw = cfg_.feature_dim;
  for (std::size_t i = 0; i < feats.size(); ++i) {
    p.enc_in_[0][i] = feats[i] / in_scale_[i % fw];
  }
  for (std::size_t l = 0; l < encoder_.size(); ++l) {
    const Linear& lay = encoder_[l];
    p.enc_z_[l].resize(n * lay.out);
    linear_forward(lay, p.enc_in_[l].data(), p.enc_z_[l].data(), n);
    check_finite(p.enc_z_[l], layer_index++);
    if (l + 1 < encoder_.size()) {
      p.enc_in_[l + 1].resize(n * lay.out);
      k.relu(p.enc_z_[l].data(), p.enc_in_[l + 1].data(), n * lay.out);
    }
  }
  p.h_ = p.enc_z_.back();

  p.proj_in_.resize(projector_.size());
  p.proj_z_.resize(projector_.size());
  p.proj_in_[0] = p.h_;
  for (std::size_t l = 0; l < projector_.size(); ++l) {
    const Linear& lay = projector_[l];
    p.proj_z_[l].resize(n * lay.out);
    linear_forward(lay, p.proj_in_[l].data(), p.proj_z_[l].data(), n);
    check_finite(p.proj_z_[l], layer_index++);
    if (l + 1 < projector_.size()) {
      p.proj_in_[l + 1].resize(n * lay.out);
      k.relu(p.proj_z_[l].data(), p.proj_in_[l + 1].data(), n * lay.out);
    }
  }

  p.norms_.resize(n);
  p.embed_.assign(n * d, 0.0);
  const std::vector<double>& raw = p.proj_z_.back();
  for (std::size_t r = 0; r < n; ++r) {
    const double* pr = raw.data() + r * d;
    const double nrm = std::sqrt(k.dot(pr, pr, d));
    if (!std::isfinite(nrm)) {
      // Finite activations can still square-sum past the double range.
      throw NumericError("non-finite embedding norm", layer_index - 1);
    }
    p.norms_[r] = nrm;
    double* er = p.embed_.data() + r * d;
    if (nrm < kNormFloor) {
      er[0] = 1.0;  // fixed fallback direction, no gradient
    } else {
      for (std::size_t j = 0; j < d; ++j) er[j] = pr[j] / nrm;
    }
  }

  p.logits_.resize(n * cfg_.num_classes);
  linear_forward(classifier_, p.h_.data(), p.logits_.data(), n);
  check_finite(p.logits_, layer_index);
  return p;
}

void Model::backward(const ForwardPass& pass, std::span<const double> g_embed,
                     std::span<const double> g_logits) {
  if (!pass.valid()) {
    throw std::logic_error("backward called with an invalid forward pass");
  }
  if (pass.owner_ != this) {
    throw std::logic_error("backward called with a pass from a different model");
  }
  const std::size_t n = pass.n_;
  const std::size_t d = cfg_.embed_dim;
  if (!g_embed.empty() && g_embed.size() != n * d) {
    throw std::invalid_argument("g_embed size mismatch");
  }
  if (!g_logits.empty() && g_logits.size() != n * cfg_.num_classes) {
    throw std::invalid_argument("g_logits size mismatch");
  }
  const auto& k = kern::ops();

  std::vector<double> g_h(n * d, 0.0);

  if (!g_logits.empty()) {
    linear_backward(classifier_, pass.h_.data(), g_logits.data(), g_h.data(), n);
  }

  if (!g_embed.empty()) {
    // Through the normalization: g_p = (g - (g.y) y) / norm.
    const std::vector<double>& raw = pass.proj_z_.back();
    std::vector<double> gz(n * d, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      const double nrm = pass.norms_[r];
      if (nrm < kNormFloor) continue;
      const double* ge = g_embed.data() + r * d;
      const double* pr = raw.data() + r * d;
      double* gr = gz.data() + r * d;
      const double proj = k.dot(ge, pr, d) / (nrm * nrm);
      for (std::size_t j = 0; j < d; ++j) gr[j] = (ge[j] - proj * pr[j]) / nrm;
    }
    for (std::size_t l = projector_.size(); l-- > 0;) {
      std::vector<double> gx(n * projector_[l].in, 0.0);
      linear_backward(projector_[l], pass.proj_in_[l].data(), gz.data(), gx.data(), n);
      if (l > 0) {
        k.relu_mask(pass.proj_z_[l - 1].data(), gx.data(), gx.size());
      }
      gz = std::move(gx);
    }
    for (std::size_t i = 0; i < g_h.size(); ++i) g_h[i] += gz[i];
  }

  std::vector<double> gz = std::move(g_h);
  for (std::size_t l = encoder_.size(); l-- > 0;) {
    const bool need_gx = l > 0;
    std::vector<double> gx(need_gx ? n * encoder_[l].in : 0, 0.0);
    linear_backward(encoder_[l], pass.enc_in_[l].data(), gz.data(),
                    need_gx ? gx.data() : nullptr, n);
    if (need_gx) {
      k.relu_mask(pass.enc_z_[l - 1].data(), gx.data(), gx.size());
      gz = std::move(gx);
    }
  }
}

void Model::zero_grad() {
  for (auto t : tensors()) {
    std::fill(t.grad->begin(), t.grad->end(), 0.0);
  }
}

std::vector<Model::TensorRef> Model::tensors() {
  std::vector<TensorRef> out;
  auto add = [&out](Linear& l) {
    out.push_back({&l.w, &l.gw});
    out.push_back({&l.b, &l.gb});
  };
  for (Linear& l : encoder_) add(l);
  for (Linear& l : projector_) add(l);
  add(classifier_);
  return out;
}

std::size_t Model::num_parameters() const {
  std::size_t n = 0;
  auto add = [&n](const Linear& l) { n += l.w.size() + l.b.size(); };
  for (const Linear& l : encoder_) add(l);
  for (const Linear& l : projector_) add(l);
  add(classifier_);
  return n;
}

}  // namespace pointdr
