#pragma once

#include <cstdint>
#include <vector>

#include "pforge/render/envmap.h"
#include "pforge/render/raster.h"
#include "pforge/render/sampling.h"
#include "pforge/render/shadow.h"

namespace pforge::render {

struct ShadeSettings {
  SampleCounts counts;
  ShadowSettings shadow;
  BrdfLobes lobes;
  double clamp_max = 1e4;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One drawn direction with everything that does not depend on the
/// material: environment radiance times visibility, and the MIS
/// denominator sum_k n_k p_k(l) over all strategies.
struct LightSample {
  Vec3 direction = Vec3::UnitZ();
  Vec3 radiance = Vec3::Zero();
  double denominator = 1.0;
  Strategy strategy = Strategy::Hemisphere;
};

/// A pixel's fixed sample set. Re-evaluating the estimate or its gradients
/// against this state treats the directions as constants.
struct PixelState {
  Vec3 normal = Vec3::UnitZ();
  Vec3 view = Vec3::UnitZ();
  Material material;
  std::vector<LightSample> samples;
};

PixelState gather_pixel(const GBuffer& g, std::size_t pixel, const EnvMap& env, const MaterialParams& mat,
                        const Camera& cam, const ShadeSettings& s);

/// sum over samples of f(l) L(l) V(l) (n.l) / sum_k n_k p_k(l), which is the
/// balance-heuristic weighted sum of f L V cos / p_chosen divided by n_chosen.
Vec3 estimate_radiance(const PixelState& st, BrdfLobes lobes = {});

/// Analytic derivatives of estimate_radiance with respect to the material,
/// sample set held fixed. d_albedo is per channel (diagonal).
BrdfGradient shading_gradients(const PixelState& st, BrdfLobes lobes = {});

struct ShadeResult {
  Image hdr;
  std::vector<double> opacity;
  std::size_t clamped = 0;    // pixels with a channel above clamp_max
  std::size_t nonfinite = 0;  // pixels whose estimate was NaN or inf (written as 0)
};

ShadeResult shade(const GBuffer& g, const EnvMap& env, const MaterialParams& mat, const Camera& cam,
                  const ShadeSettings& s);

}  // namespace pforge::render
