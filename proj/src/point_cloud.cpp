#include "pointdr/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pointdr {

std::string_view weather_name(Weather w) {
  switch (w) {
    case Weather::clear: return "clear";
    case Weather::dense_fog: return "dense_fog";
    case Weather::light_fog: return "light_fog";
    case Weather::rain: return "rain";
    case Weather::snow: return "snow";
  }
  return "unknown";
}

std::optional<Weather> weather_from_name(std::string_view name) {
  if (name == "clear") return Weather::clear;
  if (name == "dense_fog") return Weather::dense_fog;
  if (name == "light_fog") return Weather::light_fog;
  if (name == "rain") return Weather::rain;
  if (name == "snow") return Weather::snow;
  return std::nullopt;
}

Aabb bounding_box(const PointCloud& cloud) {
  Aabb b;
  if (cloud.points.empty()) return b;
  b.lo[0] = b.hi[0] = cloud.points[0].x;
  b.lo[1] = b.hi[1] = cloud.points[0].y;
  b.lo[2] = b.hi[2] = cloud.points[0].z;
  for (const Point& p : cloud.points) {
    b.lo[0] = std::min(b.lo[0], p.x);
    b.hi[0] = std::max(b.hi[0], p.x);
    b.lo[1] = std::min(b.lo[1], p.y);
    b.hi[1] = std::max(b.hi[1], p.y);
    b.lo[2] = std::min(b.lo[2], p.z);
    b.hi[2] = std::max(b.hi[2], p.z);
  }
  return b;
}

void PointCloud::validate() const {
  if (has_labels() && labels.size() != points.size()) {
    throw std::invalid_argument(
        "point cloud has " + std::to_string(points.size()) + " points but " +
        std::to_string(labels.size()) + " labels");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& p = points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) ||
        !std::isfinite(p.intensity)) {
      throw std::invalid_argument("non-finite point at index " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!is_valid_train_id(labels[i])) {
      throw std::invalid_argument("train-id " + std::to_string(labels[i]) +
                                  " out of range at index " + std::to_string(i));
    }
  }
}

}  // namespace pointdr
