#include "pforge/render/brdf.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pforge::render {

namespace {

constexpr double kPi = std::numbers::pi;

// Smith lambda for GGX and its derivative with respect to alpha.
double smith_lambda(double cos_theta, double alpha, double* d_alpha) {
  // Callers pass cosines already clamped to >= kBrdfEpsilon, the same clamp
  // used in the specular denominator, so G / (4 n.v n.l) stays bounded.
  const double c2 = cos_theta * cos_theta;
  const double t2 = std::max(0.0, (1.0 - c2) / c2);
  const double root = std::sqrt(1.0 + alpha * alpha * t2);
  if (d_alpha) *d_alpha = alpha * t2 / (2.0 * root);
  return 0.5 * (root - 1.0);
}

}  // namespace

double ggx_d(double n_dot_h, double alpha) {
  const double a2 = alpha * alpha;
  const double d = n_dot_h * n_dot_h * (a2 - 1.0) + 1.0;
  return a2 / (kPi * d * d);
}

double smith_g(double n_dot_v, double n_dot_l, double alpha) {
  const double v = std::max(n_dot_v, kBrdfEpsilon), l = std::max(n_dot_l, kBrdfEpsilon);
  return 1.0 / (1.0 + smith_lambda(v, alpha, nullptr) + smith_lambda(l, alpha, nullptr));
}

Vec3 fresnel_schlick(const Vec3& f0, double h_dot_v) {
  const double s = std::pow(std::clamp(1.0 - h_dot_v, 0.0, 1.0), 5.0);
  return f0 + (Vec3::Ones() - f0) * s;
}

BrdfGradient brdf_eval_grad(const Material& m, const Vec3& n, const Vec3& v, const Vec3& l, BrdfLobes lobes) {
  BrdfGradient g;
  const double nl = n.dot(l);
  if (!(nl > 0.0)) return g;
  const double nv = std::max(n.dot(v), kBrdfEpsilon);

  const double metallic = std::clamp(m.metallic, 0.0, 1.0);
  const bool metallic_free = m.metallic >= 0.0 && m.metallic <= 1.0;
  const double roughness = std::clamp(m.roughness, kMinRoughness, 1.0);
  const bool roughness_free = m.roughness >= kMinRoughness && m.roughness <= 1.0;
  const Vec3 albedo = m.albedo.cwiseMax(0.0).cwiseMin(1.0);
  Vec3 albedo_free;
  for (int c = 0; c < 3; ++c) albedo_free[c] = (m.albedo[c] >= 0.0 && m.albedo[c] <= 1.0) ? 1.0 : 0.0;

  if (lobes.diffuse) {
    g.value += (1.0 - metallic) * albedo / kPi;
    g.d_albedo += Vec3::Constant((1.0 - metallic) / kPi);
    g.d_metallic -= albedo / kPi;
  }

  if (lobes.specular) {
    const Vec3 hsum = v + l;
    const double hn = hsum.norm();
    if (hn > 0.0) {
      const Vec3 h = hsum / hn;
      const double nh = std::clamp(n.dot(h), 0.0, 1.0);
      const double hv = std::clamp(h.dot(v), 0.0, 1.0);
      const double alpha = roughness * roughness;
      const double a2 = alpha * alpha;
      const double dd = nh * nh * (a2 - 1.0) + 1.0;
      const double D = a2 / (kPi * dd * dd);
      const double dD_dalpha = 2.0 * alpha / (kPi * dd * dd) * (1.0 - 2.0 * a2 * nh * nh / dd);
      double dlv, dll;
      const double nl_c = std::max(nl, kBrdfEpsilon);
      const double lv = smith_lambda(nv, alpha, &dlv);
      const double ll = smith_lambda(nl_c, alpha, &dll);
      const double G = 1.0 / (1.0 + lv + ll);
      const double dG_dalpha = -G * G * (dlv + dll);

      const double s = std::pow(1.0 - hv, 5.0);
      const Vec3 f0 = Vec3::Constant(0.04) * (1.0 - metallic) + albedo * metallic;
      const Vec3 F = f0 + (Vec3::Ones() - f0) * s;
      const double denom = 4.0 * nv * nl_c;
      const double spec = D * G / denom;

      g.value += spec * F;
      g.d_albedo += Vec3::Constant(spec * metallic * (1.0 - s));
      g.d_metallic += spec * (1.0 - s) * (albedo - Vec3::Constant(0.04));
      const double dspec_dalpha = (dD_dalpha * G + D * dG_dalpha) / denom;
      g.d_roughness += dspec_dalpha * 2.0 * roughness * F;
    }
  }

  g.d_albedo = g.d_albedo.cwiseProduct(albedo_free);
  if (!metallic_free) g.d_metallic.setZero();
  if (!roughness_free) g.d_roughness.setZero();
  return g;
}

Vec3 brdf_eval(const Material& m, const Vec3& n, const Vec3& v, const Vec3& l, BrdfLobes lobes) {
  return brdf_eval_grad(m, n, v, l, lobes).value;
}

}  // namespace pforge::render
