#include "pforge/render/sampling.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pforge::render {

namespace {
constexpr double kPi = std::numbers::pi;
}

void SampleCounts::validate() const {
  if (ggx < 0 || env < 0 || hemisphere < 0) throw std::invalid_argument("render: sample counts must be >= 0");
  if (total() == 0) throw std::invalid_argument("render: at least one sample per pixel required");
}

void tangent_frame(const Vec3& n, Vec3& t, Vec3& b) {
  const double sign = std::copysign(1.0, n.z());
  const double a = -1.0 / (sign + n.z());
  const double c = n.x() * n.y() * a;
  t = Vec3(1.0 + sign * n.x() * n.x() * a, sign * c, -sign * n.x());
  b = Vec3(c, sign + n.y() * n.y() * a, -n.y());
}

DirectionSample sample_ggx(const Vec3& n, const Vec3& v, double roughness, double u1, double u2) {
  const double r = std::clamp(roughness, kMinRoughness, 1.0);
  const double alpha = r * r;
  const double cos_h = std::sqrt((1.0 - u1) / (1.0 + (alpha * alpha - 1.0) * u1));
  const double sin_h = std::sqrt(std::max(0.0, 1.0 - cos_h * cos_h));
  const double phi = 2.0 * kPi * u2;
  Vec3 t, b;
  tangent_frame(n, t, b);
  const Vec3 h = (sin_h * std::cos(phi) * t + sin_h * std::sin(phi) * b + cos_h * n).normalized();
  const double vh = v.dot(h);
  const Vec3 l = (2.0 * vh * h - v).normalized();
  if (!(vh > 0.0)) return {l, 0.0};
  return {l, ggx_d(cos_h, alpha) * cos_h / (4.0 * vh)};
}

double pdf_ggx(const Vec3& n, const Vec3& v, const Vec3& l, double roughness) {
  const Vec3 hs = v + l;
  const double hn = hs.norm();
  if (!(hn > 0.0)) return 0.0;
  const Vec3 h = hs / hn;
  const double nh = n.dot(h);
  const double vh = v.dot(h);
  if (!(nh > 0.0) || !(vh > 0.0)) return 0.0;
  const double r = std::clamp(roughness, kMinRoughness, 1.0);
  return ggx_d(nh, r * r) * nh / (4.0 * vh);
}

DirectionSample sample_hemisphere(const Vec3& n, double u1, double u2) {
  const double rr = std::sqrt(u1);
  const double phi = 2.0 * kPi * u2;
  const double z = std::sqrt(std::max(0.0, 1.0 - u1));
  Vec3 t, b;
  tangent_frame(n, t, b);
  const Vec3 l = (rr * std::cos(phi) * t + rr * std::sin(phi) * b + z * n).normalized();
  return {l, z / kPi};
}

double pdf_hemisphere(const Vec3& n, const Vec3& l) { return std::max(0.0, n.dot(l)) / kPi; }

double mis_weight(std::span<const double> pdfs, std::span<const int> counts, std::size_t chosen) {
  if (pdfs.size() != counts.size() || chosen >= pdfs.size()) throw std::invalid_argument("mis_weight: size mismatch");
  double denom = 0.0;
  for (std::size_t j = 0; j < pdfs.size(); ++j) denom += counts[j] * pdfs[j];
  if (!(denom > 0.0)) return 0.0;
  return counts[chosen] * pdfs[chosen] / denom;
}

}  // namespace pforge::render
