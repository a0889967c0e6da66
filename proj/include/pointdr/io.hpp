#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "pointdr/label_map.hpp"
#include "pointdr/point_cloud.hpp"

namespace pointdr {

// Scan files are N consecutive little-endian float32 records
// (x, y, z, intensity), 16 bytes per point. Label files are one
// little-endian uint32 per point; the lower 16 bits are the semantic raw id,
// the upper 16 bits an instance id that is ignored on read and written as
// zero. Malformed files raise FormatError; out-of-range train-ids on write
// raise std::invalid_argument.

PointCloud read_scan(const std::filesystem::path& path);
void write_scan(const PointCloud& cloud, const std::filesystem::path& path);

std::vector<TrainId> read_labels(const std::filesystem::path& path,
                                 const LabelMap& map);
void write_labels(std::span<const TrainId> labels,
                  const std::filesystem::path& path, const LabelMap& map);

}  // namespace pointdr
