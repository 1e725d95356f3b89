#pragma once

#include <cstdint>
#include <vector>

#include "pforge/pointcloud/point_cloud.h"

namespace pforge {

struct Neighbor {
  std::uint32_t index = 0;
  double distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Squared Euclidean distance, evaluated in a fixed order so callers can
/// reproduce it bit-for-bit.
inline double squared_distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

/// Static k-d tree over a point set. Read-only after construction and safe
/// for concurrent queries.
class KnnIndex {
 public:
  KnnIndex() = default;
  explicit KnnIndex(std::vector<Vec3> points);

  std::size_t size() const { return points_.size(); }
  const std::vector<Vec3>& points() const { return points_; }

  /// The min(k, n) nearest points sorted by (distance, index).
  std::vector<Neighbor> knn(const Vec3& query, std::size_t k) const;
  /// Nearest point; the index must be non-empty.
  Neighbor nearest(const Vec3& query) const;
  /// All points with distance <= radius, sorted by (distance, index).
  std::vector<Neighbor> radius(const Vec3& query, double radius) const;

 private:
  struct Node {
    std::uint32_t begin = 0, end = 0;  // range in order_
    std::int32_t left = -1, right = -1;
    int axis = -1;  // -1 for leaves
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end, int depth);
  template <typename Visitor>
  void search(std::int32_t node, const Vec3& q, Visitor& visit) const;

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace pforge
