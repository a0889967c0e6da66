#pragma once

#include <cstdint>
#include <vector>

#include "pointdr/point_cloud.hpp"

namespace pointdr {

// Procedural street scenes for the desk-scale benchmark. A scene is a square
// ground patch split lengthwise into road / sidewalk / terrain bands, plus
// cars on the road, building facades behind the sidewalks, trunks, poles and
// vegetation blobs in the terrain band. Geometry and intensity bands are
// chosen so the classes are separable by the voxel features. Scenes are pure
// functions of (config, seed); the validation split draws from a disjoint
// seed stream.
struct ToyConfig {
  std::size_t train_scenes = 12;
  std::size_t val_scenes = 4;

  double extent = 24.0;           // half-size of the ground square, metres
  double road_half_width = 4.0;   // road occupies |y| < this
  double sidewalk_width = 2.5;

  std::size_t ground_points = 360;
  std::size_t vehicles = 3;
  std::size_t vehicle_points = 40;
  std::size_t buildings = 3;
  std::size_t building_points = 60;
  std::size_t trunks = 2;
  std::size_t trunk_points = 18;
  std::size_t poles = 2;
  std::size_t pole_points = 14;
  std::size_t veg_blobs = 3;
  std::size_t veg_points = 30;

  void validate() const;  // throws std::invalid_argument
};

enum class ToySplit { train, val };

std::vector<PointCloud> generate_toy(const ToyConfig& cfg, ToySplit split,
                                     std::uint64_t seed);

}  // namespace pointdr
