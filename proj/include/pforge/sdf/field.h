#pragma once

#include "pforge/pointcloud/point_cloud.h"

namespace pforge::sdf {

struct FieldSample {
  double distance = 0.0;  // negative inside
  Vec3 color = Vec3::Ones();
  Vec3 normal = Vec3::UnitZ();
};

/// Signed scalar field with color and normal attributes. Implementations are
/// immutable and safe to evaluate concurrently.
class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual FieldSample eval(const Vec3& x) const = 0;
  virtual double distance(const Vec3& x) const { return eval(x).distance; }
};

}  // namespace pforge::sdf
