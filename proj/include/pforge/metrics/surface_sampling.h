#pragma once

#include <cstdint>
#include <vector>

#include "pforge/isosurface/tri_mesh.h"
#include "pforge/pointcloud/knn.h"

namespace pforge::metrics {

inline constexpr std::size_t kDefaultSurfaceSamples = 10000;

/// Area-weighted uniform samples on the mesh surface. Throws on a mesh
/// with zero total area.
std::vector<Vec3> sample_surface(const TriMesh& mesh, std::size_t n, std::uint64_t seed);

/// Exact Euclidean distance from p to the closed triangle abc.
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Exact point-to-surface distance queries. Candidates come from a k-d tree
/// over triangle centroids: if the nearest centroid is at distance d, only
/// triangles whose centroid lies within d + R can be closer, where R is the
/// largest centroid-to-vertex radius in the mesh.
class MeshDistance {
 public:
  explicit MeshDistance(const TriMesh& mesh);
  double distance(const Vec3& p) const;

 private:
  std::vector<Vec3> a_, b_, c_;
  KnnIndex centroids_;
  double max_radius_ = 0.0;
};

}  // namespace pforge::metrics
