#pragma once

#include <cstdint>
#include <vector>

#include "pointdr/point_cloud.hpp"

namespace pointdr {

// Regular voxel hash over a cloud. Voxel coordinates are floor(c / size),
// so the grid is stable under translation-free relabeling and handles
// negative coordinates. Cell order is the order of first encounter while
// scanning points 0..n-1, which makes it independent of the hash layout.
class VoxelGrid {
 public:
  struct Cell {
    double centroid[3] = {0.0, 0.0, 0.0};
    double corner[3] = {0.0, 0.0, 0.0};  // lower corner of the voxel
    std::uint32_t count = 0;
  };

  VoxelGrid(const PointCloud& cloud, double voxel_size);

  double voxel_size() const { return voxel_size_; }
  std::size_t num_cells() const { return cells_.size(); }
  std::uint32_t cell_index(std::uint32_t point) const { return point_cell_[point]; }
  const Cell& cell(std::uint32_t index) const { return cells_[index]; }
  const Cell& cell_for_point(std::uint32_t point) const {
    return cells_[point_cell_[point]];
  }

 private:
  double voxel_size_;
  std::vector<Cell> cells_;
  std::vector<std::uint32_t> point_cell_;
};

// Per-point input features, kFeatureWidth values per point, row-major:
//   [0..2]  point minus voxel centroid
//   [3]     intensity
//   [4]     sensor range
//   [5]     voxel occupancy count
//   [6..8]  voxel centroid minus voxel lower corner
// A point alone in its voxel yields zero centroid offset and occupancy 1.
inline constexpr std::size_t kFeatureWidth = 9;

std::vector<double> featurize(const PointCloud& cloud, const VoxelGrid& grid);

}  // namespace pointdr
