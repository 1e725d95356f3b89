#include "pforge/metrics/image_metrics.h"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pforge::metrics {

namespace {

constexpr int kWindow = 11;
constexpr int kRadius = kWindow / 2;

void require_same(const render::Image& a, const render::Image& b) {
  if (a.width != b.width || a.height != b.height || a.size() != b.size())
    throw std::invalid_argument("image metrics: dimension mismatch");
  if (a.size() == 0) throw std::invalid_argument("image metrics: empty image");
}

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> w{};
  double s = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double x = i - kRadius;
    w[i] = std::exp(-x * x / (2.0 * 1.5 * 1.5));
    s += w[i];
  }
  for (double& v : w) v /= s;
  return w;
}

// Separable valid-region filter: output is (w-10) x (h-10).
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h, const std::array<double, kWindow>& k) {
  const int ow = w - 2 * kRadius, oh = h - 2 * kRadius;
  std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < kWindow; ++i) s += k[i] * src[static_cast<std::size_t>(y) * w + x + i];
      tmp[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < kWindow; ++i) s += k[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

}  // namespace

double psnr(const render::Image& a, const render::Image& b) {
  require_same(a, b);
  double se = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) se += (a.pixels[i] - b.pixels[i]).squaredNorm();
  const double mse = se / (3.0 * a.size());
  if (mse == 0.0) return kPsnrIdentical;
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const render::Image& a, const render::Image& b) {
  require_same(a, b);
  if (a.width < kWindow || a.height < kWindow) throw std::invalid_argument("ssim: image smaller than 11x11");
  constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  const auto k = gaussian_taps();
  const std::size_t n = a.size();
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = a.pixels[i][c];
      y[i] = b.pixels[i][c];
      xx[i] = x[i] * x[i];
      yy[i] = y[i] * y[i];
      xy[i] = x[i] * y[i];
    }
    const auto mx = filter_valid(x, a.width, a.height, k);
    const auto my = filter_valid(y, a.width, a.height, k);
    const auto sxx = filter_valid(xx, a.width, a.height, k);
    const auto syy = filter_valid(yy, a.width, a.height, k);
    const auto sxy = filter_valid(xy, a.width, a.height, k);
    double acc = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const double vx = sxx[i] - mx[i] * mx[i];
      const double vy = syy[i] - my[i] * my[i];
      const double cov = sxy[i] - mx[i] * my[i];
      acc += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    total += acc / mx.size();
  }
  return total / 3.0;
}

}  // namespace pforge::metrics
