#include "pforge/pointcloud/point_cloud.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pforge {

bool PointCloud::any_stale_normals() const {
  return std::any_of(stale_normals.begin(), stale_normals.end(), [](std::uint8_t s) { return s != 0; });
}

void PointCloud::validate() const {
  const std::size_t n = positions.size();
  if (colors.size() != n) throw std::invalid_argument("pointcloud: color count does not match point count");
  if (!normals.empty() && normals.size() != n)
    throw std::invalid_argument("pointcloud: normal count does not match point count");
  if (!stale_normals.empty() && stale_normals.size() != n)
    throw std::invalid_argument("pointcloud: stale-flag count does not match point count");
  for (std::size_t i = 0; i < n; ++i) {
    if (!positions[i].allFinite())
      throw std::invalid_argument("pointcloud: non-finite position at index " + std::to_string(i));
    if ((colors[i].array() < 0.0).any() || (colors[i].array() > 1.0).any())
      throw std::invalid_argument("pointcloud: color outside [0,1] at index " + std::to_string(i));
    if (!normals.empty() && std::abs(normals[i].norm() - 1.0) > 1e-6)
      throw std::invalid_argument("pointcloud: non-unit normal at index " + std::to_string(i));
  }
}

BoundingBox bounding_box(const std::vector<Vec3>& points) {
  BoundingBox box;
  if (points.empty()) return box;
  box.min = box.max = points.front();
  for (const Vec3& p : points) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

Similarity unit_cube_transform(const std::vector<Vec3>& points) {
  if (points.empty()) throw std::invalid_argument("pointcloud: empty");
  const BoundingBox box = bounding_box(points);
  const double longest = box.extent().maxCoeff();
  Similarity s;
  s.center = box.center();
  s.scale = longest > 0.0 ? 2.0 / longest : 1.0;
  return s;
}

std::pair<PointCloud, Similarity> normalize_to_unit_cube(const PointCloud& pc) {
  const Similarity s = unit_cube_transform(pc.positions);
  PointCloud out = pc;
  for (Vec3& p : out.positions) p = s.apply(p);
  return {std::move(out), s};
}

}  // namespace pforge
