#pragma once

#include <functional>
#include <vector>

#include "pforge/render/image.h"

namespace pforge::render {

/// Optional perceptual distance on tone-mapped images.
using PerceptualFn = std::function<double(const Image&, const Image&)>;

struct LossWeights {
  double image = 1.0;
  double mask = 0.5;
  double perceptual = 0.0;
  PerceptualFn perceptual_fn;  // used only when perceptual > 0
};

struct LossBreakdown {
  double total = 0.0;
  double image = 0.0;       // unweighted MSE of tone-mapped RGB
  double mask = 0.0;        // unweighted MSE of opacity vs mask
  double perceptual = 0.0;  // unweighted, 0 when disabled
};

/// Both images are HDR; each is clamped at `hdr_clamp` and tone mapped
/// before the image MSE.
LossBreakdown render_loss(const Image& rendered, const std::vector<double>& opacity, const Image& target,
                          const std::vector<double>& target_mask, const LossWeights& w = {}, double hdr_clamp = 1e4);

}  // namespace pforge::render
