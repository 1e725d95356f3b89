#include "pforge/render/shade.h"

#include <cmath>
#include <stdexcept>

#include <tbb/parallel_for.h>

#include "pforge/common/rng.h"

namespace pforge::render {

void ShadeSettings::validate() const {
  counts.validate();
  shadow.validate();
  if (!(clamp_max > 0.0)) throw std::invalid_argument("render: clamp_max must be positive");
}

PixelState gather_pixel(const GBuffer& g, std::size_t pixel, const EnvMap& env, const MaterialParams& mat,
                        const Camera& cam, const ShadeSettings& s) {
  PixelState st;
  st.view = (cam.position - g.position[pixel]).normalized();
  // Interpolated normals can tip away from the viewer near silhouettes; the
  // geometric normal always faces the camera.
  st.normal = g.normal[pixel].dot(st.view) > 0.0 ? g.normal[pixel] : g.geo_normal[pixel];
  st.material = Material{g.albedo[pixel], mat.metallic, mat.roughness};

  const std::array<int, kStrategyCount> counts = s.counts.as_array();
  const CounterRng rng(derive_seed(s.seed, static_cast<std::uint64_t>(pixel)));
  const Vec3& n = st.normal;
  const Vec3& v = st.view;
  std::uint64_t counter = 0;
  st.samples.reserve(s.counts.total());
  for (int strat = 0; strat < kStrategyCount; ++strat) {
    for (int k = 0; k < counts[strat]; ++k) {
      const double u1 = rng.uniform(counter++);
      const double u2 = rng.uniform(counter++);
      DirectionSample ds;
      switch (static_cast<Strategy>(strat)) {
        case Strategy::Ggx: ds = sample_ggx(n, v, mat.roughness, u1, u2); break;
        case Strategy::Env: ds = env.sample(u1, u2); break;
        case Strategy::Hemisphere: ds = sample_hemisphere(n, u1, u2); break;
      }
      if (!(ds.pdf > 0.0)) continue;
      const Vec3& l = ds.direction;
      if (!(n.dot(l) > 0.0)) continue;  // brdf is zero below the horizon
      const double denom = counts[0] * pdf_ggx(n, v, l, mat.roughness) + counts[1] * env.pdf(l) +
                           counts[2] * pdf_hemisphere(n, l);
      if (!(denom > 0.0)) continue;
      Vec3 radiance = env.lookup(l);
      if (radiance.isZero(0.0)) continue;
      if (s.shadow.enabled && shadow_test(g, pixel, l, cam, s.shadow)) continue;
      st.samples.push_back(LightSample{l, radiance, denom, static_cast<Strategy>(strat)});
    }
  }
  return st;
}

BrdfGradient shading_gradients(const PixelState& st, BrdfLobes lobes) {
  BrdfGradient out;
  for (const LightSample& ls : st.samples) {
    const BrdfGradient f = brdf_eval_grad(st.material, st.normal, st.view, ls.direction, lobes);
    const Vec3 w = ls.radiance * (std::max(0.0, st.normal.dot(ls.direction)) / ls.denominator);
    out.value += f.value.cwiseProduct(w);
    out.d_albedo += f.d_albedo.cwiseProduct(w);
    out.d_metallic += f.d_metallic.cwiseProduct(w);
    out.d_roughness += f.d_roughness.cwiseProduct(w);
  }
  return out;
}

Vec3 estimate_radiance(const PixelState& st, BrdfLobes lobes) {
  Vec3 sum = Vec3::Zero();
  for (const LightSample& ls : st.samples) {
    const Vec3 f = brdf_eval(st.material, st.normal, st.view, ls.direction, lobes);
    sum += f.cwiseProduct(ls.radiance) * (std::max(0.0, st.normal.dot(ls.direction)) / ls.denominator);
  }
  return sum;
}

ShadeResult shade(const GBuffer& g, const EnvMap& env, const MaterialParams& mat, const Camera& cam,
                  const ShadeSettings& s) {
  s.validate();
  ShadeResult r;
  r.hdr = Image(g.width, g.height);
  r.opacity.assign(g.pixel_count(), 0.0);
  std::vector<std::uint8_t> clamped(g.pixel_count(), 0), bad(g.pixel_count(), 0);
  tbb::parallel_for(0, g.height, [&](int y) {
    for (int x = 0; x < g.width; ++x) {
      const std::size_t i = g.index(x, y);
      if (!g.mask[i]) continue;
      r.opacity[i] = 1.0;
      Vec3 L = estimate_radiance(gather_pixel(g, i, env, mat, cam, s), s.lobes);
      if (!L.allFinite()) {
        L.setZero();
        bad[i] = 1;
      }
      if ((L.array() > s.clamp_max).any()) {
        L = L.cwiseMin(s.clamp_max);
        clamped[i] = 1;
      }
      r.hdr.at(x, y) = L;
    }
  });
  for (std::size_t i = 0; i < clamped.size(); ++i) {
    r.clamped += clamped[i];
    r.nonfinite += bad[i];
  }
  return r;
}

}  // namespace pforge::render
