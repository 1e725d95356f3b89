#pragma once

#include <limits>

#include "pforge/render/image.h"

namespace pforge::metrics {

/// Returned by psnr for identical images.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

/// 10 log10(1 / MSE) over all channels, for images in [0, 1].
double psnr(const render::Image& a, const render::Image& b);

/// Mean SSIM over all fully contained 11x11 windows (Gaussian, sigma 1.5),
/// C1 = 0.01^2, C2 = 0.03^2, averaged over the three channels. Images must
/// be at least 11x11.
double ssim(const render::Image& a, const render::Image& b);

}  // namespace pforge::metrics
