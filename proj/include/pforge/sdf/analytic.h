#pragma once

#include <memory>
#include <vector>

#include "pforge/sdf/field.h"

namespace pforge::sdf {

enum class Axis { X, Y, Z };

class SphereSdf final : public ScalarField {
 public:
  SphereSdf(double radius, Vec3 center = Vec3::Zero(), Vec3 color = Vec3(0.8, 0.3, 0.2));
  FieldSample eval(const Vec3& x) const override;

 private:
  double radius_;
  Vec3 center_, color_;
};

/// Axis-aligned box with half extents `half`.
class BoxSdf final : public ScalarField {
 public:
  BoxSdf(Vec3 half, Vec3 center = Vec3::Zero(), Vec3 color = Vec3(0.2, 0.5, 0.8));
  FieldSample eval(const Vec3& x) const override;

 private:
  Vec3 half_, center_, color_;
};

/// Ring of major radius `major` in the plane orthogonal to `axis`, tube radius `minor`.
class TorusSdf final : public ScalarField {
 public:
  TorusSdf(double major, double minor, Vec3 center = Vec3::Zero(), Axis axis = Axis::Z,
           Vec3 color = Vec3(0.3, 0.7, 0.3));
  FieldSample eval(const Vec3& x) const override;

 private:
  double major_, minor_;
  Vec3 center_;
  Axis axis_;
  Vec3 color_;
};

/// Capped cylinder along z.
class CylinderSdf final : public ScalarField {
 public:
  CylinderSdf(double radius, double half_height, Vec3 center = Vec3::Zero(), Vec3 color = Vec3(0.9, 0.9, 0.85));
  FieldSample eval(const Vec3& x) const override;

 private:
  double radius_, half_height_;
  Vec3 center_, color_;
};

class CapsuleSdf final : public ScalarField {
 public:
  CapsuleSdf(Vec3 a, Vec3 b, double radius, Vec3 color = Vec3(0.7, 0.6, 0.2));
  FieldSample eval(const Vec3& x) const override;

 private:
  Vec3 a_, b_;
  double radius_;
  Vec3 color_;
};

/// Minimum of the children; attributes come from the closest child.
class UnionSdf final : public ScalarField {
 public:
  explicit UnionSdf(std::vector<std::shared_ptr<const ScalarField>> children);
  FieldSample eval(const Vec3& x) const override;

 private:
  std::vector<std::shared_ptr<const ScalarField>> children_;
};

/// Constant field, useful for empty-surface checks.
class ConstantField final : public ScalarField {
 public:
  explicit ConstantField(double value) : value_(value) {}
  FieldSample eval(const Vec3&) const override { return {value_, Vec3::Ones(), Vec3::UnitZ()}; }

 private:
  double value_;
};

}  // namespace pforge::sdf
