#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "pointdr/point_cloud.hpp"

namespace pointdr {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Randomized view generation. The weak view applies a rotation about Z
// followed by a uniform scale. The strong view starts from the same two
// draws (same seed => identical weak part, bit for bit) and then applies, in
// order: point dropout, bounding-box noise injection, axis sign flips, and
// per-coordinate jitter, each behind an independent probability gate.
// Both views are pure functions of (input, config, seed).
struct AugmentConfig {
  Interval rotation_deg{0.0, 360.0};
  Interval scale{0.95, 1.05};

  double dropout_prob = 0.5;
  Interval dropout_frac{0.0, 0.20};

  double noise_prob = 0.5;
  std::uint32_t noise_count_min = 0;
  std::uint32_t noise_count_max = 2000;

  double flip_prob = 0.5;  // drawn once per axis (x, then y)

  double jitter_prob = 0.5;
  Interval jitter{-0.05, 0.05};  // metres, per coordinate

  void validate() const;  // throws std::invalid_argument

  // Strong-view gates forced shut; the strong view then equals the weak view.
  AugmentConfig without_strong_ops() const;
};

// Origin marker for injected noise points.
inline constexpr std::uint32_t kNoiseOrigin =
    std::numeric_limits<std::uint32_t>::max();

struct AppliedOps {
  double rotation_deg = 0.0;
  double scale = 1.0;
  bool dropout = false;
  double dropout_frac = 0.0;
  std::uint32_t dropped = 0;
  bool noise = false;
  std::uint32_t noise_count = 0;
  bool flip_x = false;
  bool flip_y = false;
  bool jitter = false;
};

struct StrongView {
  PointCloud cloud;
  // origin[i] is the index of output point i in the input cloud, or
  // kNoiseOrigin for injected points. Surviving points keep their input
  // order.
  std::vector<std::uint32_t> origin;
  AppliedOps ops;
};

PointCloud weak_view(const PointCloud& in, const AugmentConfig& cfg,
                     std::uint64_t seed, AppliedOps* ops = nullptr);

StrongView strong_view(const PointCloud& in, const AugmentConfig& cfg,
                       std::uint64_t seed);

// Points kept by a fractional drop over n elements: ceil((1 - frac) * n).
std::uint32_t kept_after_drop(std::uint32_t n, double frac);

}  // namespace pointdr
