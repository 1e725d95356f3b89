#include "pforge/sdf/fitted.h"

#include <stdexcept>
#include <string>

#include "pforge/pointcloud/normals.h"

namespace pforge::sdf {

FittedPointSdf::FittedPointSdf(PointCloud cloud, FitParams params)
    : cloud_(std::move(cloud)), params_(params), index_(cloud_.positions) {
  if (cloud_.normals.size() != cloud_.size()) throw std::invalid_argument("sdf: fitted field needs normals");
  if (params_.k == 0) throw std::invalid_argument("sdf: k must be positive");
}

FieldSample FittedPointSdf::eval(const Vec3& x) const {
  const std::vector<Neighbor> nbrs = index_.knn(x, params_.k);
  double wsum = 0.0, dsum = 0.0;
  Vec3 csum = Vec3::Zero(), nsum = Vec3::Zero();
  for (const Neighbor& nb : nbrs) {
    const double w = 1.0 / (nb.distance + params_.weight_epsilon);
    const Vec3& p = cloud_.positions[nb.index];
    const Vec3& n = cloud_.normals[nb.index];
    wsum += w;
    dsum += w * (x - p).dot(n);
    csum += w * cloud_.colors[nb.index];
    nsum += w * n;
  }
  FieldSample s;
  s.distance = dsum / wsum;
  s.color = csum / wsum;
  const double nn = nsum.norm();
  s.normal = nn > 0.0 ? Vec3(nsum / nn) : Vec3::UnitZ();
  return s;
}

double FittedPointSdf::distance(const Vec3& x) const {
  const std::vector<Neighbor> nbrs = index_.knn(x, params_.k);
  double wsum = 0.0, dsum = 0.0;
  for (const Neighbor& nb : nbrs) {
    const double w = 1.0 / (nb.distance + params_.weight_epsilon);
    wsum += w;
    dsum += w * (x - cloud_.positions[nb.index]).dot(cloud_.normals[nb.index]);
  }
  return dsum / wsum;
}

FittedPointSdf fit_sdf(const PointCloud& pc, const FitParams& params) {
  if (pc.empty()) throw std::invalid_argument("pointcloud: empty");
  if (pc.size() < kMinFitPoints)
    throw std::invalid_argument("sdf: need at least " + std::to_string(kMinFitPoints) + " points, got " +
                                std::to_string(pc.size()));
  pc.validate();
  if (!pc.has_normals() || pc.any_stale_normals()) {
    NormalEstimate est = estimate_normals(pc, params.normal_k, /*only_stale=*/pc.has_normals());
    return FittedPointSdf(std::move(est.cloud), params);
  }
  PointCloud clean = pc;
  clean.stale_normals.clear();
  return FittedPointSdf(std::move(clean), params);
}

}  // namespace pforge::sdf
