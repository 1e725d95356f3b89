#include "pforge/render/loss.h"

#include <algorithm>
#include <stdexcept>

namespace pforge::render {

LossBreakdown render_loss(const Image& rendered, const std::vector<double>& opacity, const Image& target,
                          const std::vector<double>& target_mask, const LossWeights& w, double hdr_clamp) {
  if (rendered.width != target.width || rendered.height != target.height || rendered.size() != target.size() ||
      opacity.size() != rendered.size() || target_mask.size() != rendered.size())
    throw std::invalid_argument("render_loss: dimension mismatch");
  LossBreakdown out;
  if (rendered.size() == 0) return out;
  Image a = rendered, b = target;
  for (Vec3& p : a.pixels) p = tonemap(Vec3(p.cwiseMin(hdr_clamp)));
  for (Vec3& p : b.pixels) p = tonemap(Vec3(p.cwiseMin(hdr_clamp)));
  double img = 0.0, msk = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    img += (a.pixels[i] - b.pixels[i]).squaredNorm();
    const double d = opacity[i] - target_mask[i];
    msk += d * d;
  }
  out.image = img / (3.0 * a.size());
  out.mask = msk / a.size();
  if (w.perceptual > 0.0) {
    if (!w.perceptual_fn) throw std::invalid_argument("render_loss: perceptual weight set without a metric");
    out.perceptual = w.perceptual_fn(a, b);
  }
  out.total = w.image * out.image + w.mask * out.mask + w.perceptual * out.perceptual;
  return out;
}

}  // namespace pforge::render
