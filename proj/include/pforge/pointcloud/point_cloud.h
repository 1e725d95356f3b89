#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace pforge {

using Vec3 = Eigen::Vector3d;

/// Positions, linear RGB colors in [0,1] and optional unit normals.
/// An empty cloud is a valid value (e.g. after deleting every point); stages
/// that need geometry reject it.
struct PointCloud {
  std::vector<Vec3> positions;
  std::vector<Vec3> colors;
  std::vector<Vec3> normals;                // empty or size()
  std::vector<std::uint8_t> stale_normals;  // empty or size(); 1 = needs re-estimation

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
  bool has_normals() const { return !normals.empty(); }
  bool any_stale_normals() const;

  /// Throws std::invalid_argument when array sizes disagree, colors leave
  /// [0,1], or normals are not unit length.
  void validate() const;

  friend bool operator==(const PointCloud&, const PointCloud&) = default;
};

/// Uniform-scale + translation map `x -> (x - center) * scale`.
struct Similarity {
  Vec3 center = Vec3::Zero();
  double scale = 1.0;

  Vec3 apply(const Vec3& x) const { return (x - center) * scale; }
  Vec3 invert(const Vec3& y) const { return y / scale + center; }
  bool is_identity() const { return center.isZero(0.0) && scale == 1.0; }
};

struct BoundingBox {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();
  Vec3 extent() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }
};

BoundingBox bounding_box(const std::vector<Vec3>& points);

/// Centers the bounding box at the origin and scales uniformly so the
/// longest axis spans [-1, 1]. Zero-extent clouds are translated to the
/// origin with scale 1. Throws on an empty cloud.
std::pair<PointCloud, Similarity> normalize_to_unit_cube(const PointCloud& pc);
Similarity unit_cube_transform(const std::vector<Vec3>& points);

}  // namespace pforge
