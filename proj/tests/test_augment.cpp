#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "pointdr/augment.hpp"
#include "pointdr/point_cloud.hpp"
#include "pointdr/rng.hpp"

using namespace pointdr;

namespace {

PointCloud random_cloud(std::uint64_t seed, std::size_t n, bool labels = true) {
  Rng rng(seed);
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) {
    Point p;
    p.x = rng.uniform(-40.0, 40.0);
    p.y = rng.uniform(-40.0, 40.0);
    p.z = rng.uniform(-3.0, 6.0);
    p.intensity = rng.uniform();
    c.points.push_back(p);
    if (labels) {
      c.labels.push_back(static_cast<TrainId>(rng.uniform_index(kNumTrainIds)));
    }
  }
  return c;
}

bool same_points(const PointCloud& a, const PointCloud& b) {
  if (a.size() != b.size() || a.labels != b.labels) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.points[i].x != b.points[i].x || a.points[i].y != b.points[i].y ||
        a.points[i].z != b.points[i].z ||
        a.points[i].intensity != b.points[i].intensity) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("weak view is deterministic in (input, config, seed)") {
  const PointCloud in = random_cloud(11, 500);
  const AugmentConfig cfg;
  for (std::uint64_t seed : {0ull, 1ull, 77ull, 0xdeadbeefull}) {
    const PointCloud a = weak_view(in, cfg, seed);
    const PointCloud b = weak_view(in, cfg, seed);
    CHECK(same_points(a, b));
  }
  CHECK(!same_points(weak_view(in, cfg, 1), weak_view(in, cfg, 2)));
}

TEST_CASE("weak view rotation+scale preserve pairwise geometry") {
  const PointCloud in = random_cloud(5, 300);
  const AugmentConfig cfg;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    AppliedOps ops;
    const PointCloud out = weak_view(in, cfg, seed, &ops);
    REQUIRE(out.size() == in.size());
    CHECK(out.labels == in.labels);
    CHECK(ops.rotation_deg >= 0.0);
    CHECK(ops.rotation_deg < 360.0);
    CHECK(ops.scale >= 0.95);
    CHECK(ops.scale <= 1.05);

    // Rotation about Z then uniform scale s: pairwise distances scale by s,
    // z differences scale by s, and xy radii scale by s.
    for (std::size_t i = 0; i < 40; ++i) {
      const auto& p = in.points[i];
      const auto& q = in.points[i + 40];
      const auto& P = out.points[i];
      const auto& Q = out.points[i + 40];
      const double d_in = std::hypot(p.x - q.x, p.y - q.y, p.z - q.z);
      const double d_out = std::hypot(P.x - Q.x, P.y - Q.y, P.z - Q.z);
      CHECK(std::abs(d_out - ops.scale * d_in) < 1e-6);
      CHECK(std::abs(P.z - ops.scale * p.z) < 1e-9);
      CHECK(std::abs(std::hypot(P.x, P.y) - ops.scale * std::hypot(p.x, p.y)) <
            1e-6);
      CHECK(P.intensity == p.intensity);
    }
  }
}

TEST_CASE("strong view shares the weak draws per seed and varies across seeds") {
  const PointCloud in = random_cloud(21, 400);
  const AugmentConfig cfg;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    AppliedOps weak_ops;
    weak_view(in, cfg, seed, &weak_ops);
    const StrongView sv = strong_view(in, cfg, seed);
    CHECK(sv.ops.rotation_deg == weak_ops.rotation_deg);
    CHECK(sv.ops.scale == weak_ops.scale);

    // Surviving original points carry the weak-view coordinates unless a
    // later op (flip/jitter) fired.
    if (!sv.ops.flip_x && !sv.ops.flip_y && !sv.ops.jitter) {
      const PointCloud wk = weak_view(in, cfg, seed);
      for (std::size_t i = 0; i < sv.cloud.size(); ++i) {
        if (sv.origin[i] == kNoiseOrigin) continue;
        const auto& a = sv.cloud.points[i];
        const auto& b = wk.points[sv.origin[i]];
        CHECK(a.x == b.x);
        CHECK(a.y == b.y);
        CHECK(a.z == b.z);
      }
    }
  }

  const StrongView s1 = strong_view(in, cfg, 1);
  const StrongView s2 = strong_view(in, cfg, 1);
  CHECK(same_points(s1.cloud, s2.cloud));
  CHECK(s1.origin == s2.origin);
}

TEST_CASE("strong view count arithmetic is exact") {
  const PointCloud in = random_cloud(33, 777);
  const AugmentConfig cfg;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const StrongView sv = strong_view(in, cfg, seed);
    const std::uint32_t n = static_cast<std::uint32_t>(in.size());
    const std::uint32_t kept =
        sv.ops.dropout ? kept_after_drop(n, sv.ops.dropout_frac) : n;
    CHECK(sv.ops.dropped == n - kept);
    CHECK(sv.cloud.size() == kept + sv.ops.noise_count);
    CHECK(sv.origin.size() == sv.cloud.size());
    if (!sv.ops.noise) CHECK(sv.ops.noise_count == 0);
    if (sv.ops.noise) {
      CHECK(sv.ops.noise_count >= cfg.noise_count_min);
      CHECK(sv.ops.noise_count <= cfg.noise_count_max);
    }

    // Surviving originals keep input order; noise points never carry an
    // evaluation-class label; noise intensity lies in [0, 1).
    std::uint32_t prev = 0;
    bool first = true;
    for (std::size_t i = 0; i < sv.origin.size(); ++i) {
      if (sv.origin[i] == kNoiseOrigin) {
        CHECK(sv.cloud.labels[i] == kIgnoredLabel);
        CHECK(sv.cloud.points[i].intensity >= 0.0);
        CHECK(sv.cloud.points[i].intensity < 1.0);
        continue;
      }
      CHECK(sv.cloud.labels[i] == in.labels[sv.origin[i]]);
      if (!first) CHECK(sv.origin[i] > prev);
      prev = sv.origin[i];
      first = false;
    }
  }
}

TEST_CASE("kept_after_drop") {
  CHECK(kept_after_drop(100, 0.0) == 100);
  CHECK(kept_after_drop(100, 0.2) == 80);
  CHECK(kept_after_drop(100, 0.199) == 81);  // ceil(80.1)
  CHECK(kept_after_drop(1, 0.99) == 1);      // ceil keeps at least one
  CHECK(kept_after_drop(0, 0.5) == 0);
  CHECK(kept_after_drop(7, 0.10) == 7);      // ceil(6.3)
}

TEST_CASE("noise points fall inside the post-weak bounding box") {
  const PointCloud in = random_cloud(8, 600);
  AugmentConfig cfg;
  cfg.dropout_prob = 1.0;  // force dropout so the box predates it
  cfg.noise_prob = 1.0;
  cfg.flip_prob = 0.0;
  cfg.jitter_prob = 0.0;
  cfg.noise_count_min = 500;  // guarantee noise points exist
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const PointCloud wk = weak_view(in, cfg, seed);
    const Aabb box = bounding_box(wk);
    const StrongView sv = strong_view(in, cfg, seed);
    CHECK(sv.ops.dropout);
    CHECK(sv.ops.noise);
    std::size_t noise_seen = 0;
    for (std::size_t i = 0; i < sv.origin.size(); ++i) {
      if (sv.origin[i] != kNoiseOrigin) continue;
      ++noise_seen;
      CHECK(box.contains(sv.cloud.points[i]));
    }
    CHECK(noise_seen == sv.ops.noise_count);
  }
}

TEST_CASE("gates forced shut make the strong view equal the weak view") {
  const PointCloud in = random_cloud(3, 321);
  const AugmentConfig cfg = AugmentConfig{}.without_strong_ops();
  CHECK(cfg.dropout_prob == 0.0);
  CHECK(cfg.noise_prob == 0.0);
  CHECK(cfg.flip_prob == 0.0);
  CHECK(cfg.jitter_prob == 0.0);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const PointCloud wk = weak_view(in, cfg, seed);
    const StrongView sv = strong_view(in, cfg, seed);
    CHECK(same_points(sv.cloud, wk));
    for (std::size_t i = 0; i < sv.origin.size(); ++i) {
      CHECK(sv.origin[i] == i);
    }
    CHECK(!sv.ops.dropout);
    CHECK(!sv.ops.noise);
    CHECK(!sv.ops.flip_x);
    CHECK(!sv.ops.flip_y);
    CHECK(!sv.ops.jitter);
  }
}

TEST_CASE("flips negate one coordinate axis") {
  const PointCloud in = random_cloud(9, 200);
  AugmentConfig cfg = AugmentConfig{}.without_strong_ops();
  cfg.flip_prob = 1.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PointCloud wk = weak_view(in, cfg, seed);
    const StrongView sv = strong_view(in, cfg, seed);
    CHECK(sv.ops.flip_x);
    CHECK(sv.ops.flip_y);
    REQUIRE(sv.cloud.size() == wk.size());
    for (std::size_t i = 0; i < wk.size(); ++i) {
      CHECK(sv.cloud.points[i].x == -wk.points[i].x);
      CHECK(sv.cloud.points[i].y == -wk.points[i].y);
      CHECK(sv.cloud.points[i].z == wk.points[i].z);
    }
  }
}

TEST_CASE("jitter moves every coordinate by at most the configured bound") {
  const PointCloud in = random_cloud(14, 250);
  AugmentConfig cfg = AugmentConfig{}.without_strong_ops();
  cfg.jitter_prob = 1.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PointCloud wk = weak_view(in, cfg, seed);
    const StrongView sv = strong_view(in, cfg, seed);
    CHECK(sv.ops.jitter);
    REQUIRE(sv.cloud.size() == wk.size());
    for (std::size_t i = 0; i < wk.size(); ++i) {
      CHECK(std::abs(sv.cloud.points[i].x - wk.points[i].x) <= 0.05);
      CHECK(std::abs(sv.cloud.points[i].y - wk.points[i].y) <= 0.05);
      CHECK(std::abs(sv.cloud.points[i].z - wk.points[i].z) <= 0.05);
    }
  }
}

TEST_CASE("dropout selects a uniform subset, order preserved, exact count") {
  const PointCloud in = random_cloud(40, 500);
  AugmentConfig cfg = AugmentConfig{}.without_strong_ops();
  cfg.dropout_prob = 1.0;
  std::set<std::vector<std::uint32_t>> seen;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const StrongView sv = strong_view(in, cfg, seed);
    CHECK(sv.ops.dropout);
    CHECK(sv.cloud.size() ==
          kept_after_drop(static_cast<std::uint32_t>(in.size()),
                          sv.ops.dropout_frac));
    seen.insert(sv.origin);
  }
  CHECK(seen.size() > 30);  // selections differ across seeds
}

TEST_CASE("empty input stays empty even with forced noise") {
  PointCloud empty;
  AugmentConfig cfg;
  cfg.noise_prob = 1.0;
  cfg.noise_count_min = 100;
  const StrongView sv = strong_view(empty, cfg, 4);
  CHECK(sv.cloud.size() == 0);
  CHECK(sv.ops.noise_count == 0);
  CHECK(weak_view(empty, cfg, 4).size() == 0);
}

TEST_CASE("config validation") {
  AugmentConfig ok;
  CHECK_NOTHROW(ok.validate());

  AugmentConfig bad = ok;
  bad.dropout_prob = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.dropout_frac = {0.5, 0.2};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.dropout_frac = {0.0, 1.5};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.scale = {1.05, 0.95};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.scale = {0.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.noise_count_min = 10;
  bad.noise_count_max = 5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.jitter = {0.1, -0.1};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
