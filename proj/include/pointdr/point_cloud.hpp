#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace pointdr {

// Train-id space: 0..18 are the scored classes, in the fixed evaluation
// order (car ... traffic-sign). Two sentinels follow:
//   kInvalidClass (19): content a sensor cannot discern under adverse
//     weather (snowy ground, injected snow clutter). Scored as a 20th class
//     under a supervised protocol; collapsed into ignored for the
//     domain-generalization metrics here.
//   kIgnoredLabel (20): never scored, no loss contribution.
using TrainId = std::uint8_t;

inline constexpr std::size_t kNumEvalClasses = 19;
inline constexpr TrainId kInvalidClass = 19;
inline constexpr TrainId kIgnoredLabel = 20;
inline constexpr std::size_t kNumTrainIds = 21;

constexpr bool is_eval_class(TrainId id) { return id < kNumEvalClasses; }
constexpr bool is_valid_train_id(TrainId id) { return id < kNumTrainIds; }

enum class Weather : std::uint8_t { clear, dense_fog, light_fog, rain, snow };

std::string_view weather_name(Weather w);
std::optional<Weather> weather_from_name(std::string_view name);

struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;

  double range() const { return std::sqrt(x * x + y * y + z * z); }
};

struct PointCloud {
  std::vector<Point> points;
  std::vector<TrainId> labels;  // empty when the scan is unlabeled
  std::optional<Weather> weather;

  std::size_t size() const { return points.size(); }
  bool has_labels() const { return !labels.empty(); }

  // Checks the structural invariants: labels either absent or one per
  // point with valid train-ids, coordinates and intensities finite.
  // Throws std::invalid_argument naming the first offending point.
  void validate() const;
};

struct Aabb {
  double lo[3] = {0.0, 0.0, 0.0};
  double hi[3] = {0.0, 0.0, 0.0};

  bool contains(const Point& p, double tol = 0.0) const {
    return p.x >= lo[0] - tol && p.x <= hi[0] + tol && p.y >= lo[1] - tol &&
           p.y <= hi[1] + tol && p.z >= lo[2] - tol && p.z <= hi[2] + tol;
  }
};

// Axis-aligned bounding box; the zero box for an empty cloud.
Aabb bounding_box(const PointCloud& cloud);

}  // namespace pointdr
