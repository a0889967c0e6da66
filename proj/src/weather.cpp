#include "pointdr/weather.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pointdr/augment.hpp"
#include "pointdr/rng.hpp"

namespace pointdr {
namespace {

// Uniform point in the upper half-ball of the given radius, by rejection.
Point sample_near_sensor(Rng& rng, double radius) {
  for (;;) {
    Point p;
    p.x = rng.uniform(-radius, radius);
    p.y = rng.uniform(-radius, radius);
    p.z = rng.uniform(0.0, radius);
    if (p.x * p.x + p.y * p.y + p.z * p.z <= radius * radius) {
      p.intensity = rng.uniform();
      return p;
    }
  }
}

std::vector<std::uint32_t> ground_indices(const PointCloud& cloud) {
  std::vector<std::uint32_t> idx;
  for (std::uint32_t i = 0; i < cloud.size(); ++i) {
    if (is_ground_class(cloud.labels[i])) idx.push_back(i);
  }
  return idx;
}

PointCloud filter_by_range(const PointCloud& in, double cap) {
  PointCloud out;
  out.weather = in.weather;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in.points[i].range() <= cap) {
      out.points.push_back(in.points[i]);
      out.labels.push_back(in.labels[i]);
    }
  }
  return out;
}

}  // namespace

WeatherConfig WeatherConfig::preset(Weather mode) {
  WeatherConfig c;
  c.mode = mode;
  if (mode == Weather::light_fog) c.fog_range_cap = 60.0;
  return c;
}

void WeatherConfig::validate() const {
  if (!(fog_range_cap > 0.0) || !std::isfinite(fog_range_cap)) {
    throw std::invalid_argument("fog_range_cap must be positive");
  }
  if (!(rain_ground_drop_frac >= 0.0 && rain_ground_drop_frac <= 1.0)) {
    throw std::invalid_argument("rain_ground_drop_frac outside [0, 1]");
  }
  if (!(snow_invalid_frac >= 0.0 && snow_invalid_frac <= 1.0)) {
    throw std::invalid_argument("snow_invalid_frac outside [0, 1]");
  }
  if (!(snow_noise_radius > 0.0) || !std::isfinite(snow_noise_radius)) {
    throw std::invalid_argument("snow_noise_radius must be positive");
  }
}

PointCloud corrupt(const PointCloud& in, const WeatherConfig& cfg,
                   std::uint64_t seed) {
  cfg.validate();
  if (!in.has_labels() && !in.points.empty()) {
    throw std::invalid_argument("weather corruption requires a labeled cloud");
  }
  in.validate();
  if (in.points.empty()) {
    PointCloud out = in;
    out.weather = cfg.mode;
    return out;
  }
  Rng rng(mix64(seed));

  switch (cfg.mode) {
    case Weather::clear: {
      PointCloud out = in;
      out.weather = Weather::clear;
      return out;
    }
    case Weather::dense_fog:
    case Weather::light_fog: {
      PointCloud out = filter_by_range(in, cfg.fog_range_cap);
      out.weather = cfg.mode;
      return out;
    }
    case Weather::rain: {
      const auto ground = ground_indices(in);
      const auto n_g = static_cast<std::uint32_t>(ground.size());
      const std::uint32_t n_drop = n_g - kept_after_drop(n_g, cfg.rain_ground_drop_frac);
      const auto drop_pos = rng.sample_indices(n_g, n_drop);
      std::vector<bool> dropped(in.size(), false);
      for (const std::uint32_t pos : drop_pos) dropped[ground[pos]] = true;

      const Aabb box = bounding_box(in);
      PointCloud out;
      out.weather = Weather::rain;
      for (std::size_t i = 0; i < in.size(); ++i) {
        if (dropped[i]) continue;
        out.points.push_back(in.points[i]);
        out.labels.push_back(in.labels[i]);
      }
      for (std::uint32_t i = 0; i < cfg.rain_noise_count; ++i) {
        Point p;
        p.x = rng.uniform(box.lo[0], box.hi[0]);
        p.y = rng.uniform(box.lo[1], box.hi[1]);
        p.z = rng.uniform(box.lo[2], box.hi[2]);
        p.intensity = rng.uniform();
        out.points.push_back(p);
        out.labels.push_back(kIgnoredLabel);
      }
      return out;
    }
    case Weather::snow: {
      const auto ground = ground_indices(in);
      const auto n_g = static_cast<std::uint32_t>(ground.size());
      const std::uint32_t n_invalid = n_g - kept_after_drop(n_g, cfg.snow_invalid_frac);
      const auto inv_pos = rng.sample_indices(n_g, n_invalid);

      PointCloud out = in;
      out.weather = Weather::snow;
      for (const std::uint32_t pos : inv_pos) {
        out.labels[ground[pos]] = kInvalidClass;
      }
      for (std::uint32_t i = 0; i < cfg.snow_noise_count; ++i) {
        out.points.push_back(sample_near_sensor(rng, cfg.snow_noise_radius));
        out.labels.push_back(kInvalidClass);
      }
      return out;
    }
  }
  throw std::invalid_argument("unknown weather mode");
}

}  // namespace pointdr
