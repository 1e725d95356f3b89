#pragma once

#include <vector>

#include "pforge/pointcloud/point_cloud.h"

namespace pforge::render {

/// Row-major RGB image, row 0 at the top.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<Vec3> pixels;

  Image() = default;
  Image(int w, int h, const Vec3& fill = Vec3::Zero()) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  Vec3& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  const Vec3& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::size_t size() const { return pixels.size(); }

  friend bool operator==(const Image&, const Image&) = default;
};

/// Reinhard x / (1 + x) per channel followed by the sRGB transfer curve.
double tonemap_channel(double linear);
Vec3 tonemap(const Vec3& linear);
Image tonemap(const Image& hdr);

}  // namespace pforge::render
