#include "pforge/pointcloud/normals.h"

#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace pforge {

NormalEstimate estimate_normals(const PointCloud& pc, std::size_t k, bool only_stale) {
  if (k < 3) throw std::invalid_argument("normals: k must be >= 3");
  if (pc.size() < k) throw std::invalid_argument("normals: fewer points than k");

  const KnnIndex index(pc.positions);
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : pc.positions) centroid += p;
  centroid /= static_cast<double>(pc.size());

  NormalEstimate out;
  out.cloud = pc;
  const bool keep_existing = only_stale && pc.has_normals();
  out.cloud.normals.resize(pc.size(), Vec3::UnitZ());
  out.cloud.stale_normals.clear();

  for (std::size_t i = 0; i < pc.size(); ++i) {
    if (keep_existing && (pc.stale_normals.empty() || pc.stale_normals[i] == 0)) continue;

    const std::vector<Neighbor> nbrs = index.knn(pc.positions[i], k);
    Vec3 mean = Vec3::Zero();
    for (const Neighbor& nb : nbrs) mean += pc.positions[nb.index];
    mean /= static_cast<double>(nbrs.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const Neighbor& nb : nbrs) {
      const Vec3 d = pc.positions[nb.index] - mean;
      cov += d * d.transpose();
    }

    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    const Vec3 lambda = eig.eigenvalues();  // ascending
    const Vec3 radial = pc.positions[i] - centroid;

    // A neighborhood spanning fewer than two directions has no defined plane.
    const bool degenerate = !(lambda[2] > 0.0) || lambda[1] <= 1e-10 * lambda[2];
    Vec3 n;
    if (degenerate) {
      out.fallback.push_back(i);
      n = radial.norm() > 0.0 ? radial.normalized() : Vec3::UnitZ();
    } else {
      n = eig.eigenvectors().col(0).normalized();
      // A previous (stale) normal is a better orientation hint than the centroid.
      const Vec3 hint = pc.has_normals() ? pc.normals[i] : radial;
      if (n.dot(hint) < 0.0) n = -n;
    }
    out.cloud.normals[i] = n;
  }
  return out;
}

}  // namespace pforge
