#include "pointdr/voxel.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace pointdr {
namespace {

// 21 bits per axis, biased to keep keys positive.
constexpr std::int64_t kAxisBound = std::int64_t{1} << 20;

std::int64_t voxel_coord(double c, double size, std::uint32_t point) {
  const auto v = static_cast<std::int64_t>(std::floor(c / size));
  if (v <= -kAxisBound || v >= kAxisBound) {
    throw std::invalid_argument("point " + std::to_string(point) +
                                " outside the addressable voxel volume");
  }
  return v;
}

}  // namespace

VoxelGrid::VoxelGrid(const PointCloud& cloud, double voxel_size)
    : voxel_size_(voxel_size) {
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) {
    throw std::invalid_argument("voxel_size must be positive");
  }
  const auto n = static_cast<std::uint32_t>(cloud.size());
  point_cell_.resize(n);
  std::unordered_map<std::uint64_t, std::uint32_t> index;
  index.reserve(n);
  std::vector<std::int64_t> coords;  // ix, iy, iz per cell
  coords.reserve(3 * static_cast<std::size_t>(n));

  for (std::uint32_t i = 0; i < n; ++i) {
    const Point& p = cloud.points[i];
    const std::int64_t ix = voxel_coord(p.x, voxel_size, i);
    const std::int64_t iy = voxel_coord(p.y, voxel_size, i);
    const std::int64_t iz = voxel_coord(p.z, voxel_size, i);
    const std::uint64_t key =
        (static_cast<std::uint64_t>(ix + kAxisBound) << 42) |
        (static_cast<std::uint64_t>(iy + kAxisBound) << 21) |
        static_cast<std::uint64_t>(iz + kAxisBound);
    auto [it, inserted] =
        index.try_emplace(key, static_cast<std::uint32_t>(cells_.size()));
    if (inserted) {
      cells_.emplace_back();
      coords.push_back(ix);
      coords.push_back(iy);
      coords.push_back(iz);
    }
    const std::uint32_t ci = it->second;
    Cell& cell = cells_[ci];
    cell.centroid[0] += p.x;
    cell.centroid[1] += p.y;
    cell.centroid[2] += p.z;
    cell.count += 1;
    point_cell_[i] = ci;
  }

  for (std::size_t ci = 0; ci < cells_.size(); ++ci) {
    Cell& cell = cells_[ci];
    for (int a = 0; a < 3; ++a) {
      cell.centroid[a] /= cell.count;
      cell.corner[a] = static_cast<double>(coords[3 * ci + a]) * voxel_size;
    }
  }
}

std::vector<double> featurize(const PointCloud& cloud, const VoxelGrid& grid) {
  const auto n = static_cast<std::uint32_t>(cloud.size());
  std::vector<double> feats(static_cast<std::size_t>(n) * kFeatureWidth);
  for (std::uint32_t i = 0; i < n; ++i) {
    const Point& p = cloud.points[i];
    const VoxelGrid::Cell& cell = grid.cell_for_point(i);
    double* f = feats.data() + static_cast<std::size_t>(i) * kFeatureWidth;
    f[0] = p.x - cell.centroid[0];
    f[1] = p.y - cell.centroid[1];
    f[2] = p.z - cell.centroid[2];
    f[3] = p.intensity;
    f[4] = p.range();
    f[5] = cell.count;
    f[6] = cell.centroid[0] - cell.corner[0];
    f[7] = cell.centroid[1] - cell.corner[1];
    f[8] = cell.centroid[2] - cell.corner[2];
  }
  return feats;
}

}  // namespace pointdr
