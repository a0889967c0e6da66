#include "pointdr/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "pointdr/rng.hpp"

namespace pointdr {
namespace {

void check_interval(const Interval& r, const char* name) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
    throw std::invalid_argument(std::string(name) + ": invalid interval");
  }
}

void check_prob(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(name) + ": probability outside [0, 1]");
  }
}

// Weak transform with draws taken from rng: rotation about Z, then uniform
// scale. Intensity, labels, weather and point order are untouched.
PointCloud apply_weak(const PointCloud& in, const AugmentConfig& cfg, Rng& rng,
                      AppliedOps* ops) {
  const double deg = rng.uniform(cfg.rotation_deg.lo, cfg.rotation_deg.hi);
  const double s = rng.uniform(cfg.scale.lo, cfg.scale.hi);
  if (ops != nullptr) {
    ops->rotation_deg = deg;
    ops->scale = s;
  }
  const double rad = deg * std::numbers::pi / 180.0;
  const double c = std::cos(rad);
  const double sn = std::sin(rad);
  PointCloud out = in;
  for (Point& p : out.points) {
    const double x = c * p.x - sn * p.y;
    const double y = sn * p.x + c * p.y;
    p.x = s * x;
    p.y = s * y;
    p.z = s * p.z;
  }
  return out;
}

}  // namespace

void AugmentConfig::validate() const {
  check_interval(rotation_deg, "rotation_deg");
  check_interval(scale, "scale");
  if (scale.lo <= 0.0) {
    throw std::invalid_argument("scale: must be positive");
  }
  check_interval(dropout_frac, "dropout_frac");
  check_interval(jitter, "jitter");
  if (dropout_frac.lo < 0.0 || dropout_frac.hi > 1.0) {
    throw std::invalid_argument("dropout_frac: fraction outside [0, 1]");
  }
  check_prob(dropout_prob, "dropout_prob");
  check_prob(noise_prob, "noise_prob");
  check_prob(flip_prob, "flip_prob");
  check_prob(jitter_prob, "jitter_prob");
  if (noise_count_min > noise_count_max) {
    throw std::invalid_argument("noise_count: min > max");
  }
}

AugmentConfig AugmentConfig::without_strong_ops() const {
  AugmentConfig c = *this;
  c.dropout_prob = 0.0;
  c.noise_prob = 0.0;
  c.flip_prob = 0.0;
  c.jitter_prob = 0.0;
  return c;
}

std::uint32_t kept_after_drop(std::uint32_t n, double frac) {
  if (!(frac >= 0.0 && frac <= 1.0)) {
    throw std::invalid_argument("drop fraction outside [0, 1]");
  }
  const auto kept = static_cast<std::uint32_t>(std::ceil((1.0 - frac) * n));
  return std::min(kept, n);
}

PointCloud weak_view(const PointCloud& in, const AugmentConfig& cfg,
                     std::uint64_t seed, AppliedOps* ops) {
  cfg.validate();
  Rng rng(mix64(seed));
  return apply_weak(in, cfg, rng, ops);
}

StrongView strong_view(const PointCloud& in, const AugmentConfig& cfg,
                       std::uint64_t seed) {
  cfg.validate();
  Rng rng(mix64(seed));
  StrongView sv;
  sv.cloud = apply_weak(in, cfg, rng, &sv.ops);
  const auto n = static_cast<std::uint32_t>(sv.cloud.size());
  const bool labeled = sv.cloud.has_labels();

  // Noise is placed in the bounding box of the weak view, measured before
  // dropout so the box does not depend on which points survive.
  const Aabb box = bounding_box(sv.cloud);

  sv.origin.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) sv.origin[i] = i;

  if (rng.bernoulli(cfg.dropout_prob)) {
    sv.ops.dropout = true;
    sv.ops.dropout_frac = rng.uniform(cfg.dropout_frac.lo, cfg.dropout_frac.hi);
    const std::uint32_t kept = kept_after_drop(n, sv.ops.dropout_frac);
    sv.ops.dropped = n - kept;
    const auto survivors = rng.sample_indices(n, kept);
    PointCloud pruned;
    pruned.weather = sv.cloud.weather;
    pruned.points.reserve(kept);
    if (labeled) pruned.labels.reserve(kept);
    std::vector<std::uint32_t> origin;
    origin.reserve(kept);
    for (const std::uint32_t idx : survivors) {
      pruned.points.push_back(sv.cloud.points[idx]);
      if (labeled) pruned.labels.push_back(sv.cloud.labels[idx]);
      origin.push_back(idx);
    }
    sv.cloud = std::move(pruned);
    sv.origin = std::move(origin);
  }

  if (rng.bernoulli(cfg.noise_prob)) {
    sv.ops.noise = true;
    sv.ops.noise_count = static_cast<std::uint32_t>(
        rng.uniform_int(cfg.noise_count_min, cfg.noise_count_max));
    if (in.points.empty()) sv.ops.noise_count = 0;  // no box to sample from
    for (std::uint32_t i = 0; i < sv.ops.noise_count; ++i) {
      Point p;
      p.x = rng.uniform(box.lo[0], box.hi[0]);
      p.y = rng.uniform(box.lo[1], box.hi[1]);
      p.z = rng.uniform(box.lo[2], box.hi[2]);
      p.intensity = rng.uniform();
      sv.cloud.points.push_back(p);
      if (labeled) sv.cloud.labels.push_back(kIgnoredLabel);
      sv.origin.push_back(kNoiseOrigin);
    }
  }

  sv.ops.flip_x = rng.bernoulli(cfg.flip_prob);
  sv.ops.flip_y = rng.bernoulli(cfg.flip_prob);
  if (sv.ops.flip_x) {
    for (Point& p : sv.cloud.points) p.x = -p.x;
  }
  if (sv.ops.flip_y) {
    for (Point& p : sv.cloud.points) p.y = -p.y;
  }

  if (rng.bernoulli(cfg.jitter_prob)) {
    sv.ops.jitter = true;
    for (Point& p : sv.cloud.points) {
      p.x += rng.uniform(cfg.jitter.lo, cfg.jitter.hi);
      p.y += rng.uniform(cfg.jitter.lo, cfg.jitter.hi);
      p.z += rng.uniform(cfg.jitter.lo, cfg.jitter.hi);
    }
  }

  return sv;
}

}  // namespace pointdr
