#include "pforge/render/shadow.h"

#include <cmath>
#include <stdexcept>

namespace pforge::render {

void ShadowSettings::validate() const {
  if (!(distance > 0.0) || !std::isfinite(distance)) throw std::invalid_argument("shadow: distance must be positive");
  if (steps < 1) throw std::invalid_argument("shadow: steps must be >= 1");
  if (!(bias >= 0.0)) throw std::invalid_argument("shadow: bias must be >= 0");
}

bool shadow_test(const GBuffer& g, std::size_t pixel, const Vec3& direction, const Camera& cam,
                 const ShadowSettings& s) {
  if (!g.mask[pixel]) return false;
  const Vec3 origin = g.position[pixel];
  for (int k = 1; k <= s.steps; ++k) {
    const Vec3 q = origin + direction * (s.distance * k / s.steps);
    const auto sp = cam.project(q);
    if (!sp) continue;
    const double fx = std::floor(sp->x), fy = std::floor(sp->y);
    if (fx < 0.0 || fy < 0.0 || fx >= g.width || fy >= g.height) continue;
    const std::size_t j = g.index(static_cast<int>(fx), static_cast<int>(fy));
    if (!g.mask[j]) continue;
    if (sp->depth > g.depth[j] + s.bias) return true;
  }
  return false;
}

}  // namespace pforge::render
