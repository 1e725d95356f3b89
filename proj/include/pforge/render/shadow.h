#pragma once

#include "pforge/render/raster.h"

namespace pforge::render {

struct ShadowSettings {
  bool enabled = true;
  double distance = 0.25;
  int steps = 6;
  double bias = 1e-3;  // in linear view depth

  void validate() const;
};

/// Screen-space visibility: marches `steps` equal steps of the segment from
/// the pixel's surface point along `direction`, projects each sample, and
/// reports shadowed when a sample lies deeper than the depth buffer at its
/// pixel by more than the bias. Samples behind the near plane, off-screen
/// or over background are ignored, so off-screen occluders are missed.
bool shadow_test(const GBuffer& g, std::size_t pixel, const Vec3& direction, const Camera& cam,
                 const ShadowSettings& s);

}  // namespace pforge::render
