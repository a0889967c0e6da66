#pragma once

#include <cstdint>

#include "pointdr/point_cloud.hpp"

namespace pointdr {

// Synthetic adverse-weather corruption for labeled scans. These are
// distribution-shift generators, not physical simulations:
//
//   dense_fog / light_fog  remove every point with sensor range beyond
//                          range_cap; survivors keep their order.
//   rain                   drop a fraction of ground points (wet surfaces
//                          absorb returns) and append ignored-labeled
//                          clutter uniform in the scan bounding box.
//   snow                   relabel a fraction of ground points as the
//                          invalid class (covered surfaces) and append
//                          invalid-labeled clutter near the sensor.
//
// Ground classes: road, parking, sidewalk, other-ground, terrain. Injected
// intensities are uniform in [0, 1]. The output carries the matching
// weather tag. corrupt() is a pure function of (input, config, seed) and
// requires a labeled cloud.
struct WeatherConfig {
  Weather mode = Weather::dense_fog;

  double fog_range_cap = 30.0;  // metres; light_fog preset uses 60

  double rain_ground_drop_frac = 0.3;
  std::uint32_t rain_noise_count = 300;

  double snow_invalid_frac = 0.3;
  std::uint32_t snow_noise_count = 1000;
  double snow_noise_radius = 10.0;  // metres around the sensor

  static WeatherConfig preset(Weather mode);
  void validate() const;  // throws std::invalid_argument
};

constexpr bool is_ground_class(TrainId id) {
  return id == 8 || id == 9 || id == 10 || id == 11 || id == 16;
}

PointCloud corrupt(const PointCloud& in, const WeatherConfig& cfg,
                   std::uint64_t seed);

}  // namespace pointdr
