#include "pforge/sdf/analytic.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <limits>
#include <stdexcept>

namespace pforge::sdf {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string("sdf: ") + what + " must be positive");
}

// Unit vector along d, or `fallback` when d vanishes.
Vec3 safe_normalized(const Vec3& d, const Vec3& fallback) {
  const double n = d.norm();
  return n > 0.0 ? Vec3(d / n) : fallback;
}

}  // namespace

SphereSdf::SphereSdf(double radius, Vec3 center, Vec3 color) : radius_(radius), center_(center), color_(color) {
  require_positive(radius, "sphere radius");
}

FieldSample SphereSdf::eval(const Vec3& x) const {
  const Vec3 d = x - center_;
  return {d.norm() - radius_, color_, safe_normalized(d, Vec3::UnitZ())};
}

BoxSdf::BoxSdf(Vec3 half, Vec3 center, Vec3 color) : half_(half), center_(center), color_(color) {
  require_positive(half.minCoeff(), "box half extent");
}

FieldSample BoxSdf::eval(const Vec3& x) const {
  const Vec3 p = x - center_;
  const Vec3 q = p.cwiseAbs() - half_;
  const Vec3 sign(p.x() < 0 ? -1.0 : 1.0, p.y() < 0 ? -1.0 : 1.0, p.z() < 0 ? -1.0 : 1.0);
  const Vec3 outside = q.cwiseMax(0.0);
  FieldSample s;
  s.color = color_;
  if (outside.squaredNorm() > 0.0) {
    s.distance = outside.norm();
    s.normal = outside.cwiseProduct(sign) / s.distance;
  } else {
    int axis = 0;
    s.distance = q.maxCoeff(&axis);
    s.normal = Vec3::Zero();
    s.normal[axis] = sign[axis];
  }
  return s;
}

TorusSdf::TorusSdf(double major, double minor, Vec3 center, Axis axis, Vec3 color)
    : major_(major), minor_(minor), center_(center), axis_(axis), color_(color) {
  require_positive(major, "torus major radius");
  require_positive(minor, "torus minor radius");
}

FieldSample TorusSdf::eval(const Vec3& x) const {
  const int a = static_cast<int>(axis_);
  const Vec3 p = x - center_;
  Vec3 planar = p;
  planar[a] = 0.0;
  const double ring = planar.norm();
  // Nearest point on the core circle; any direction works on the axis itself.
  const Vec3 radial = ring > 0.0 ? Vec3(planar / ring) : Vec3::Unit((a + 1) % 3);
  const Vec3 core = major_ * radial;
  const Vec3 d = p - core;
  return {d.norm() - minor_, color_, safe_normalized(d, radial)};
}

CylinderSdf::CylinderSdf(double radius, double half_height, Vec3 center, Vec3 color)
    : radius_(radius), half_height_(half_height), center_(center), color_(color) {
  require_positive(radius, "cylinder radius");
  require_positive(half_height, "cylinder half height");
}

FieldSample CylinderSdf::eval(const Vec3& x) const {
  const Vec3 p = x - center_;
  const double r = std::hypot(p.x(), p.y());
  const Vec3 radial = r > 0.0 ? Vec3(p.x() / r, p.y() / r, 0.0) : Vec3::UnitX();
  const double zsign = p.z() < 0 ? -1.0 : 1.0;
  const double dr = r - radius_;
  const double dz = std::abs(p.z()) - half_height_;
  FieldSample s;
  s.color = color_;
  if (dr > 0.0 || dz > 0.0) {
    const double a = std::max(dr, 0.0), b = std::max(dz, 0.0);
    s.distance = std::hypot(a, b);
    s.normal = (a * radial + b * zsign * Vec3::UnitZ()) / s.distance;
  } else if (dr > dz) {
    s.distance = dr;
    s.normal = radial;
  } else {
    s.distance = dz;
    s.normal = zsign * Vec3::UnitZ();
  }
  return s;
}

CapsuleSdf::CapsuleSdf(Vec3 a, Vec3 b, double radius, Vec3 color) : a_(a), b_(b), radius_(radius), color_(color) {
  require_positive(radius, "capsule radius");
}

FieldSample CapsuleSdf::eval(const Vec3& x) const {
  const Vec3 ab = b_ - a_;
  const double len2 = ab.squaredNorm();
  const double h = len2 > 0.0 ? std::clamp((x - a_).dot(ab) / len2, 0.0, 1.0) : 0.0;
  const Vec3 d = x - (a_ + h * ab);
  return {d.norm() - radius_, color_, safe_normalized(d, Vec3::UnitZ())};
}

UnionSdf::UnionSdf(std::vector<std::shared_ptr<const ScalarField>> children) : children_(std::move(children)) {
  if (children_.empty()) throw std::invalid_argument("sdf: empty union");
}

FieldSample UnionSdf::eval(const Vec3& x) const {
  FieldSample best;
  best.distance = std::numeric_limits<double>::infinity();
  for (const auto& c : children_) {
    const FieldSample s = c->eval(x);
    if (s.distance < best.distance) best = s;
  }
  return best;
}

}  // namespace pforge::sdf
