#pragma once

#include "pforge/pointcloud/point_cloud.h"

namespace pforge::render {

inline constexpr double kMinRoughness = 0.03;
inline constexpr double kBrdfEpsilon = 1e-7;

struct Material {
  Vec3 albedo = Vec3::Constant(0.8);
  double metallic = 0.0;
  double roughness = 0.5;
};

/// Lobe toggles; the diffuse-only setting backs the white-furnace check.
struct BrdfLobes {
  bool diffuse = true;
  bool specular = true;
};

double ggx_d(double n_dot_h, double alpha);
/// Smith height-correlated masking-shadowing, 1 / (1 + L(v) + L(l)).
double smith_g(double n_dot_v, double n_dot_l, double alpha);
Vec3 fresnel_schlick(const Vec3& f0, double h_dot_v);

/// Lambert diffuse plus GGX specular. Zero for n.l <= 0. Roughness is
/// clamped to [kMinRoughness, 1] and metallic to [0, 1].
Vec3 brdf_eval(const Material& m, const Vec3& n, const Vec3& v, const Vec3& l, BrdfLobes lobes = {});

/// Per-channel partial derivatives of brdf_eval. Albedo is diagonal, so
/// d_albedo[c] is d f_c / d albedo_c. Outside a clamp range the derivative
/// is zero; on the boundary the inside derivative is used.
struct BrdfGradient {
  Vec3 value = Vec3::Zero();
  Vec3 d_albedo = Vec3::Zero();
  Vec3 d_metallic = Vec3::Zero();
  Vec3 d_roughness = Vec3::Zero();
};

BrdfGradient brdf_eval_grad(const Material& m, const Vec3& n, const Vec3& v, const Vec3& l, BrdfLobes lobes = {});

}  // namespace pforge::render
