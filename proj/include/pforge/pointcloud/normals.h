#pragma once

#include <vector>

#include "pforge/pointcloud/knn.h"
#include "pforge/pointcloud/point_cloud.h"

namespace pforge {

struct NormalEstimate {
  PointCloud cloud;
  /// Points whose neighborhood was (near-)collinear and received the
  /// centroid-radial fallback direction instead of a PCA normal.
  std::vector<std::size_t> fallback;
};

/// PCA normals from the k-NN covariance, oriented away from the cloud
/// centroid, or along the previous normal when the cloud already has one. When `only_stale` is set, points with valid non-stale normals
/// keep them. Requires n >= k >= 3.
NormalEstimate estimate_normals(const PointCloud& pc, std::size_t k = 8, bool only_stale = false);

}  // namespace pforge
