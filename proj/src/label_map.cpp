#include "pointdr/label_map.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pointdr/errors.hpp"

namespace pointdr {
namespace {

constexpr std::uint32_t kNoCanonical = 0x10000;

struct Entry {
  std::uint16_t raw;
  TrainId train;
  const char* name;
};

// SemanticKITTI 19-class remapping. Moving variants fold into their static
// classes; structure/object leftovers are ignored. Raw 200 is unused by the
// dataset and carries the weather-invalid class.
constexpr Entry kSemanticKitti[] = {
    {0, 20, "ignored"},        {1, 20, "ignored"},
    {10, 0, "car"},            {11, 1, "bicycle"},
    {13, 4, "other-vehicle"},  {15, 2, "motorcycle"},
    {16, 4, "other-vehicle"},  {18, 3, "truck"},
    {20, 4, "other-vehicle"},  {30, 5, "person"},
    {31, 6, "bicyclist"},      {32, 7, "motorcyclist"},
    {40, 8, "road"},           {44, 9, "parking"},
    {48, 10, "sidewalk"},      {49, 11, "other-ground"},
    {50, 12, "building"},      {51, 13, "fence"},
    {52, 20, "ignored"},       {60, 8, "road"},
    {70, 14, "vegetation"},    {71, 15, "trunk"},
    {72, 16, "terrain"},       {80, 17, "pole"},
    {81, 18, "traffic-sign"},  {99, 20, "ignored"},
    {200, 19, "invalid"},      {252, 0, "car"},
    {253, 6, "bicyclist"},     {254, 5, "person"},
    {255, 7, "motorcyclist"},  {256, 4, "other-vehicle"},
    {257, 4, "other-vehicle"}, {258, 3, "truck"},
    {259, 4, "other-vehicle"},
};

}  // namespace

LabelMap::LabelMap() {
  canonical_.fill(kNoCanonical);
}

void LabelMap::insert(std::uint16_t raw, TrainId train, std::string name) {
  if (!is_valid_train_id(train)) {
    throw FormatError("label map: train-id " + std::to_string(train) +
                      " out of range for raw id " + std::to_string(raw));
  }
  const auto it = to_train_.find(raw);
  if (it != to_train_.end() && it->second != train) {
    throw FormatError("label map: raw id " + std::to_string(raw) +
                      " mapped to two train-ids");
  }
  to_train_[raw] = train;
  if (raw < canonical_[train]) {
    canonical_[train] = raw;
    names_[train] = std::move(name);
  }
}

const LabelMap& LabelMap::semantic_kitti() {
  static const LabelMap map = [] {
    LabelMap m;
    for (const Entry& e : kSemanticKitti) m.insert(e.raw, e.train, e.name);
    return m;
  }();
  return map;
}

LabelMap LabelMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open label map: " + path.string());
  LabelMap map;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream ls(line);
    long long raw = 0, train = 0;
    std::string name;
    if (!(ls >> raw)) continue;  // blank or comment-only line
    if (!(ls >> train >> name)) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) +
                        ": expected 'raw_id train_id name'");
    }
    std::string extra;
    if (ls >> extra) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) +
                        ": trailing tokens after name");
    }
    if (raw < 0 || raw > 0xffff) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) +
                        ": raw id out of 16-bit range");
    }
    if (train < 0 || train >= static_cast<long long>(kNumTrainIds)) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) +
                        ": train-id out of range");
    }
    map.insert(static_cast<std::uint16_t>(raw), static_cast<TrainId>(train),
               std::move(name));
  }
  if (map.to_train_.empty()) {
    throw FormatError("label map has no entries: " + path.string());
  }
  return map;
}

void LabelMap::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write label map: " + path.string());
  // Stable order: by raw id.
  std::vector<std::pair<std::uint16_t, TrainId>> entries(to_train_.begin(),
                                                         to_train_.end());
  std::sort(entries.begin(), entries.end());
  for (const auto& [raw, train] : entries) {
    out << raw << ' ' << static_cast<unsigned>(train) << ' '
        << class_name(train) << '\n';
  }
}

TrainId LabelMap::train_id(std::uint16_t raw) const {
  const auto it = to_train_.find(raw);
  return it == to_train_.end() ? kIgnoredLabel : it->second;
}

std::uint16_t LabelMap::canonical_raw(TrainId id) const {
  if (!is_valid_train_id(id)) {
    throw std::invalid_argument("train-id " + std::to_string(id) +
                                " out of range");
  }
  if (canonical_[id] == kNoCanonical) {
    throw std::invalid_argument("no raw id maps to train-id " +
                                std::to_string(id));
  }
  return static_cast<std::uint16_t>(canonical_[id]);
}

std::string_view LabelMap::class_name(TrainId id) const {
  if (!is_valid_train_id(id)) return "?";
  return names_[id].empty() ? "?" : std::string_view(names_[id]);
}

}  // namespace pointdr
