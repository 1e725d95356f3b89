#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "pforge/pointcloud/point_cloud.h"

namespace pforge::metrics {

struct AlignSettings {
  int azimuth_steps = 24;   // about +y
  int elevation_steps = 8;  // about +x
  int roll_steps = 4;       // about +z
  std::size_t subsample = 512;
  int icp_iterations = 50;
  double icp_relative_tolerance = 1e-7;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Maps a raw predicted point x into the normalized ground-truth frame as
/// rotation * pred_normalization(x) + translation. `scale` is the
/// normalization scale of pred divided by that of gt, kept for reporting.
struct AlignmentResult {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Vec3 translation = Vec3::Zero();
  double scale = 1.0;
  Similarity pred_normalization;
  Similarity gt_normalization;
  std::size_t grid_index = 0;
  double grid_chamfer = 0.0;  // on the subsampled clouds
  double residual = 0.0;      // RMS nearest-neighbor distance after refinement
  int icp_iterations = 0;
  bool icp_diverged = false;  // refinement made things worse; grid result returned

  Vec3 apply(const Vec3& pred_point) const { return rotation * pred_normalization.apply(pred_point) + translation; }
};

/// Grid candidate `index`: R_y(azimuth) * R_x(elevation) * R_z(roll), with
/// index = (azimuth * elevation_steps + elevation) * roll_steps + roll.
Eigen::Matrix3d grid_rotation(const AlignSettings& s, std::size_t index);

/// Normalizes both clouds to the unit cube, searches the rotation grid by
/// Chamfer on seeded subsamples (lowest index wins ties), then refines with
/// point-to-point ICP against the full normalized ground truth.
AlignmentResult align(const std::vector<Vec3>& pred, const std::vector<Vec3>& gt, const AlignSettings& s = {});

/// Least-squares rigid motion (Kabsch) taking src onto dst, paired by index.
void kabsch(const std::vector<Vec3>& src, const std::vector<Vec3>& dst, Eigen::Matrix3d& r, Vec3& t);

}  // namespace pforge::metrics
