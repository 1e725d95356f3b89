#pragma once

#include <string>
#include <vector>

#include "pforge/render/image.h"

namespace pforge::render {

struct DirectionSample {
  Vec3 direction = Vec3::UnitZ();
  double pdf = 0.0;  // solid-angle density; 0 marks a rejected sample
};

double luminance(const Vec3& rgb);

/// Equirectangular map, +y up. Row r spans polar angle [r, r+1) * pi / H
/// from +y; column c spans azimuth [c, c+1) * 2pi / W, with azimuth 0 on +x
/// turning toward +z.
Vec3 direction_from_uv(double u, double v);
void uv_from_direction(const Vec3& dir, double& u, double& v);

/// Radiance is piecewise constant per texel. Sampling picks texels in
/// proportion to luminance * sin(theta) through a row marginal and per-row
/// conditional CDF, then places the sample uniformly inside the texel in
/// (u, v). The matching solid-angle pdf is p_uv / (2 pi^2 sin theta).
class EnvMap {
 public:
  EnvMap() : EnvMap(Image(1, 1)) {}
  explicit EnvMap(Image radiance);

  static EnvMap constant(const Vec3& radiance, int width = 8, int height = 4);

  const Image& image() const { return image_; }
  int width() const { return image_.width; }
  int height() const { return image_.height; }

  Vec3 lookup(const Vec3& dir) const;
  DirectionSample sample(double u1, double u2) const;
  double pdf(const Vec3& dir) const;

  /// True when total weighted luminance is zero and sampling is uniform on
  /// the sphere.
  bool uniform_fallback() const { return uniform_; }
  const std::vector<double>& marginal_cdf() const { return marginal_cdf_; }
  const std::vector<double>& conditional_cdf(int row) const { return conditional_cdf_[row]; }

 private:
  Image image_;
  bool uniform_ = false;
  std::vector<double> marginal_cdf_;                  // H + 1 entries
  std::vector<std::vector<double>> conditional_cdf_;  // H rows of W + 1 entries
  std::vector<double> texel_prob_;                    // H * W probabilities
};

/// PFM color maps. Reading accepts either endianness; writing emits
/// little-endian with rows stored bottom to top.
Image read_pfm_bytes(const std::string& bytes);
std::string write_pfm_bytes(const Image& image);
Image load_pfm(const std::string& path);
void save_pfm(const std::string& path, const Image& image);

}  // namespace pforge::render
