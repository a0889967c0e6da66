#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>

#include "pointdr/point_cloud.hpp"

namespace pointdr {

// Raw-id to train-id remapping. The mapping is total: raw ids without an
// entry resolve to kIgnoredLabel. Each train id reports one canonical raw id
// (the lowest raw id mapping to it) for serialization, and the class name
// used in reports.
//
// Text format, one entry per line, '#' starts a comment:
//   raw_id train_id name
class LabelMap {
 public:
  static const LabelMap& semantic_kitti();
  static LabelMap load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  // raw is the semantic id, i.e. the lower 16 bits of a label word.
  TrainId train_id(std::uint16_t raw) const;

  // Lowest raw id mapping to this train id. Throws std::invalid_argument
  // when the train id is out of range or has no raw entry.
  std::uint16_t canonical_raw(TrainId id) const;

  std::string_view class_name(TrainId id) const;
  std::size_t num_entries() const { return to_train_.size(); }

 private:
  LabelMap();
  void insert(std::uint16_t raw, TrainId train, std::string name);

  std::unordered_map<std::uint16_t, TrainId> to_train_;
  std::array<std::uint32_t, kNumTrainIds> canonical_;  // 0x10000 = none
  std::array<std::string, kNumTrainIds> names_;
};

}  // namespace pointdr
