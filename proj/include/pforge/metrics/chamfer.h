#pragma once

#include <vector>

#include "pforge/pointcloud/point_cloud.h"

namespace pforge::metrics {

/// Distance from each point of `from` to its nearest point in `to`.
std::vector<double> directed_distances(const std::vector<Vec3>& from, const std::vector<Vec3>& to);

/// Mean of the two directed mean nearest-neighbor distances, each halved:
/// sum_x min_y |x-y| / (2|A|) + sum_y min_x |x-y| / (2|B|).
/// Throws std::invalid_argument on an empty set.
double chamfer(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

struct FScore {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

/// Precision counts predicted points within `threshold` (inclusive) of the
/// ground truth, recall the converse. F is 0 when P + R is 0.
FScore fscore(const std::vector<Vec3>& pred, const std::vector<Vec3>& gt, double threshold);

/// max over both directed distance sets.
double hausdorff(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

}  // namespace pforge::metrics
