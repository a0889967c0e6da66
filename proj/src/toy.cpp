#include "pointdr/toy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pointdr/rng.hpp"

namespace pointdr {
namespace {

constexpr std::uint64_t kToyStream = 0x70afu;
constexpr std::uint64_t kValOffset = std::uint64_t{1} << 32;

constexpr TrainId kCar = 0;
constexpr TrainId kRoad = 8;
constexpr TrainId kSidewalk = 10;
constexpr TrainId kBuilding = 12;
constexpr TrainId kVegetation = 14;
constexpr TrainId kTrunk = 15;
constexpr TrainId kTerrain = 16;
constexpr TrainId kPole = 17;

void add_point(PointCloud& pc, double x, double y, double z, double intensity,
               TrainId label) {
  pc.points.push_back({x, y, z, intensity});
  pc.labels.push_back(label);
}

void add_ground(PointCloud& pc, const ToyConfig& cfg, Rng& rng) {
  const double sw_edge = cfg.road_half_width + cfg.sidewalk_width;
  for (std::size_t i = 0; i < cfg.ground_points; ++i) {
    const double x = rng.uniform(-cfg.extent, cfg.extent);
    const double y = rng.uniform(-cfg.extent, cfg.extent);
    const double z = rng.uniform(-0.03, 0.03);
    const double ay = std::abs(y);
    if (ay < cfg.road_half_width) {
      add_point(pc, x, y, z, rng.uniform(0.05, 0.25), kRoad);
    } else if (ay < sw_edge) {
      add_point(pc, x, y, z + 0.12, rng.uniform(0.25, 0.45), kSidewalk);
    } else {
      add_point(pc, x, y, z, rng.uniform(0.35, 0.60), kTerrain);
    }
  }
}

// Points on the surface of a yaw-rotated box sitting on the road.
void add_vehicle(PointCloud& pc, const ToyConfig& cfg, Rng& rng) {
  const double hl = 2.0, hw = 0.9, hh = 0.6;  // half length / width / height
  const double base = 0.3;                    // ground clearance
  const double cx = rng.uniform(-cfg.extent + 3.0, cfg.extent - 3.0);
  const double cy = rng.uniform(-(cfg.road_half_width - 1.0),
                                cfg.road_half_width - 1.0);
  const double yaw = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double c = std::cos(yaw), s = std::sin(yaw);

  const double a_top = (2 * hl) * (2 * hw);
  const double a_long = (2 * hl) * (2 * hh);  // each of the two long sides
  const double a_short = (2 * hw) * (2 * hh);
  const double total = a_top + 2 * a_long + 2 * a_short;

  for (std::size_t i = 0; i < cfg.vehicle_points; ++i) {
    double lx, ly, lz;
    const double t = rng.uniform(0.0, total);
    if (t < a_top) {
      lx = rng.uniform(-hl, hl);
      ly = rng.uniform(-hw, hw);
      lz = hh;
    } else if (t < a_top + 2 * a_long) {
      lx = rng.uniform(-hl, hl);
      ly = t < a_top + a_long ? hw : -hw;
      lz = rng.uniform(-hh, hh);
    } else {
      lx = t < a_top + 2 * a_long + a_short ? hl : -hl;
      ly = rng.uniform(-hw, hw);
      lz = rng.uniform(-hh, hh);
    }
    add_point(pc, cx + c * lx - s * ly, cy + s * lx + c * ly, base + hh + lz,
              rng.uniform(0.60, 0.95), kCar);
  }
}

void add_building(PointCloud& pc, const ToyConfig& cfg, Rng& rng) {
  const double side = rng.bernoulli(0.5) ? 1.0 : -1.0;
  const double y0 = side * (cfg.road_half_width + cfg.sidewalk_width +
                            rng.uniform(1.5, 4.0));
  const double x0 = rng.uniform(-cfg.extent + 6.0, cfg.extent - 6.0);
  const double half_len = rng.uniform(3.0, 6.0);
  for (std::size_t i = 0; i < cfg.building_points; ++i) {
    add_point(pc, x0 + rng.uniform(-half_len, half_len),
              y0 + rng.uniform(-0.08, 0.08), rng.uniform(0.0, 6.0),
              rng.uniform(0.30, 0.55), kBuilding);
  }
}

void add_trunk(PointCloud& pc, const ToyConfig& cfg, Rng& rng) {
  const double side = rng.bernoulli(0.5) ? 1.0 : -1.0;
  const double cx = rng.uniform(-cfg.extent + 2.0, cfg.extent - 2.0);
  const double cy = side * rng.uniform(cfg.road_half_width + cfg.sidewalk_width + 1.5,
                                       cfg.extent - 2.0);
  for (std::size_t i = 0; i < cfg.trunk_points; ++i) {
    const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
    add_point(pc, cx + 0.25 * std::cos(th), cy + 0.25 * std::sin(th),
              rng.uniform(0.0, 2.5), rng.uniform(0.20, 0.40), kTrunk);
  }
}

void add_pole(PointCloud& pc, const ToyConfig& cfg, Rng& rng) {
  const double side = rng.bernoulli(0.5) ? 1.0 : -1.0;
  const double cx = rng.uniform(-cfg.extent + 1.0, cfg.extent - 1.0);
  const double cy = side * (cfg.road_half_width + cfg.sidewalk_width - 0.3);
  for (std::size_t i = 0; i < cfg.pole_points; ++i) {
    const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
    add_point(pc, cx + 0.06 * std::cos(th), cy + 0.06 * std::sin(th),
              rng.uniform(0.0, 5.0), rng.uniform(0.50, 0.80), kPole);
  }
}

void add_vegetation(PointCloud& pc, const ToyConfig& cfg, Rng& rng) {
  const double side = rng.bernoulli(0.5) ? 1.0 : -1.0;
  const double cx = rng.uniform(-cfg.extent + 3.0, cfg.extent - 3.0);
  const double cy = side * rng.uniform(cfg.road_half_width + cfg.sidewalk_width + 2.0,
                                       cfg.extent - 3.0);
  const double cz = rng.uniform(2.5, 3.5);
  const double a = rng.uniform(1.2, 2.2);  // horizontal semi-axis
  const double cax = rng.uniform(0.8, 1.5);
  for (std::size_t i = 0; i < cfg.veg_points; ++i) {
    double dx, dy, dz;
    do {
      dx = rng.uniform(-1.0, 1.0);
      dy = rng.uniform(-1.0, 1.0);
      dz = rng.uniform(-1.0, 1.0);
    } while (dx * dx + dy * dy + dz * dz > 1.0);
    add_point(pc, cx + a * dx, cy + a * dy, cz + cax * dz,
              rng.uniform(0.45, 0.75), kVegetation);
  }
}

PointCloud make_scene(const ToyConfig& cfg, std::uint64_t scene_seed) {
  Rng rng(scene_seed);
  PointCloud pc;
  pc.weather = Weather::clear;
  add_ground(pc, cfg, rng);
  for (std::size_t i = 0; i < cfg.vehicles; ++i) add_vehicle(pc, cfg, rng);
  for (std::size_t i = 0; i < cfg.buildings; ++i) add_building(pc, cfg, rng);
  for (std::size_t i = 0; i < cfg.trunks; ++i) add_trunk(pc, cfg, rng);
  for (std::size_t i = 0; i < cfg.poles; ++i) add_pole(pc, cfg, rng);
  for (std::size_t i = 0; i < cfg.veg_blobs; ++i) add_vegetation(pc, cfg, rng);
  return pc;
}

}  // namespace

void ToyConfig::validate() const {
  if (ground_points == 0) {
    throw std::invalid_argument("toy scenes need at least one ground point");
  }
  if (!(road_half_width >= 1.0)) {
    throw std::invalid_argument("road_half_width must be >= 1");
  }
  if (!(sidewalk_width > 0.0)) {
    throw std::invalid_argument("sidewalk_width must be positive");
  }
  if (!(extent >= road_half_width + sidewalk_width + 6.0)) {
    throw std::invalid_argument("extent too small for the band layout");
  }
  if (train_scenes == 0 || val_scenes == 0) {
    throw std::invalid_argument("both splits need at least one scene");
  }
}

std::vector<PointCloud> generate_toy(const ToyConfig& cfg, ToySplit split,
                                     std::uint64_t seed) {
  cfg.validate();
  const std::size_t count = split == ToySplit::train ? cfg.train_scenes : cfg.val_scenes;
  const std::uint64_t offset = split == ToySplit::val ? kValOffset : 0;
  std::vector<PointCloud> scenes;
  scenes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    scenes.push_back(make_scene(cfg, derive_seed(seed, kToyStream, offset + i)));
  }
  return scenes;
}

}  // namespace pointdr
