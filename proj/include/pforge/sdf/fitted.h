#pragma once

#include "pforge/pointcloud/knn.h"
#include "pforge/pointcloud/point_cloud.h"
#include "pforge/sdf/field.h"

namespace pforge::sdf {

struct FitParams {
  std::size_t k = 8;
  double weight_epsilon = 1e-9;
  std::size_t normal_k = 8;  // neighborhood for normal estimation when needed
};

inline constexpr std::size_t kMinFitPoints = 50;

/// Signed distance proxy from oriented points: the inverse-distance weighted
/// mean of the signed point-to-tangent-plane distances (x - p_i) . n_i over
/// the k nearest points. Color and normal use the same weights.
class FittedPointSdf final : public ScalarField {
 public:
  FittedPointSdf(PointCloud cloud, FitParams params);

  FieldSample eval(const Vec3& x) const override;
  double distance(const Vec3& x) const override;

  const PointCloud& cloud() const { return cloud_; }
  const FitParams& params() const { return params_; }

 private:
  PointCloud cloud_;
  FitParams params_;
  KnnIndex index_;
};

/// Requires at least kMinFitPoints points. Missing or stale normals are
/// (re-)estimated first.
FittedPointSdf fit_sdf(const PointCloud& pc, const FitParams& params = {});

}  // namespace pforge::sdf
