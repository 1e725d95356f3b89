#pragma once

#include <array>
#include <span>

#include "pforge/render/brdf.h"
#include "pforge/render/envmap.h"

namespace pforge::render {

enum class Strategy { Ggx = 0, Env = 1, Hemisphere = 2 };
inline constexpr int kStrategyCount = 3;

struct SampleCounts {
  int ggx = 6;
  int env = 6;
  int hemisphere = 4;

  int total() const { return ggx + env + hemisphere; }
  std::array<int, kStrategyCount> as_array() const { return {ggx, env, hemisphere}; }
  void validate() const;
};

/// Orthonormal tangent frame around n (Duff et al. branchless construction).
void tangent_frame(const Vec3& n, Vec3& t, Vec3& b);

/// GGX half-vector sampling reflected about v. pdf is D(h)(n.h)/(4 v.h); a
/// half-vector facing away from v yields pdf 0 (rejected sample).
DirectionSample sample_ggx(const Vec3& n, const Vec3& v, double roughness, double u1, double u2);
double pdf_ggx(const Vec3& n, const Vec3& v, const Vec3& l, double roughness);

/// Cosine-weighted hemisphere around n, pdf cos(theta) / pi.
DirectionSample sample_hemisphere(const Vec3& n, double u1, double u2);
double pdf_hemisphere(const Vec3& n, const Vec3& l);

/// Balance heuristic with sample counts: n_c p_c / sum_j n_j p_j.
double mis_weight(std::span<const double> pdfs, std::span<const int> counts, std::size_t chosen);

}  // namespace pforge::render
