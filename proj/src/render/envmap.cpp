#include "pforge/render/envmap.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pforge/common/fileio.h"

namespace pforge::render {

namespace {

constexpr double kPi = std::numbers::pi;

// Bin i with cdf[i] <= u < cdf[i+1]; never a zero-width bin.
int find_bin(const std::vector<double>& cdf, double u) {
  const int n = static_cast<int>(cdf.size()) - 1;
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  int i = std::clamp(static_cast<int>(it - cdf.begin()) - 1, 0, n - 1);
  while (i > 0 && !(cdf[i + 1] > cdf[i])) --i;
  return i;
}

std::vector<double> build_cdf(const double* w, int n, double& total) {
  std::vector<double> cdf(n + 1, 0.0);
  for (int i = 0; i < n; ++i) cdf[i + 1] = cdf[i] + w[i];
  total = cdf[n];
  if (total > 0.0) {
    for (double& c : cdf) c /= total;
  } else {
    for (int i = 0; i <= n; ++i) cdf[i] = static_cast<double>(i) / n;
  }
  cdf[n] = 1.0;
  return cdf;
}

}  // namespace

double luminance(const Vec3& rgb) { return 0.2126 * rgb.x() + 0.7152 * rgb.y() + 0.0722 * rgb.z(); }

Vec3 direction_from_uv(double u, double v) {
  const double theta = v * kPi;
  const double phi = u * 2.0 * kPi;
  const double s = std::sin(theta);
  return Vec3(s * std::cos(phi), std::cos(theta), s * std::sin(phi));
}

void uv_from_direction(const Vec3& dir, double& u, double& v) {
  const double theta = std::acos(std::clamp(dir.y(), -1.0, 1.0));
  double phi = std::atan2(dir.z(), dir.x());
  if (phi < 0.0) phi += 2.0 * kPi;
  u = phi / (2.0 * kPi);
  v = theta / kPi;
}

EnvMap::EnvMap(Image radiance) : image_(std::move(radiance)) {
  const int w = image_.width, h = image_.height;
  if (w <= 0 || h <= 0 || image_.pixels.size() != static_cast<std::size_t>(w) * h)
    throw std::invalid_argument("envmap: bad dimensions");
  for (const Vec3& p : image_.pixels) {
    if (!p.allFinite() || (p.array() < 0.0).any()) throw std::invalid_argument("envmap: radiance must be finite and >= 0");
  }
  std::vector<double> weights(static_cast<std::size_t>(w) * h);
  std::vector<double> row_sums(h);
  for (int r = 0; r < h; ++r) {
    const double s = std::sin((r + 0.5) * kPi / h);
    for (int c = 0; c < w; ++c) weights[static_cast<std::size_t>(r) * w + c] = luminance(image_.at(c, r)) * s;
  }
  conditional_cdf_.resize(h);
  for (int r = 0; r < h; ++r) conditional_cdf_[r] = build_cdf(&weights[static_cast<std::size_t>(r) * w], w, row_sums[r]);
  double total = 0.0;
  marginal_cdf_ = build_cdf(row_sums.data(), h, total);
  uniform_ = !(total > 0.0);
  texel_prob_.assign(weights.size(), 0.0);
  if (!uniform_) {
    for (std::size_t i = 0; i < weights.size(); ++i) texel_prob_[i] = weights[i] / total;
  }
}

EnvMap EnvMap::constant(const Vec3& radiance, int width, int height) { return EnvMap(Image(width, height, radiance)); }

Vec3 EnvMap::lookup(const Vec3& dir) const {
  double u, v;
  uv_from_direction(dir, u, v);
  const int c = std::clamp(static_cast<int>(u * width()), 0, width() - 1);
  const int r = std::clamp(static_cast<int>(v * height()), 0, height() - 1);
  return image_.at(c, r);
}

DirectionSample EnvMap::sample(double u1, double u2) const {
  if (uniform_) {
    const double z = 1.0 - 2.0 * u1;
    const double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = 2.0 * kPi * u2;
    return {Vec3(rr * std::cos(phi), z, rr * std::sin(phi)), 1.0 / (4.0 * kPi)};
  }
  const int h = height(), w = width();
  const int r = find_bin(marginal_cdf_, u1);
  const double rw = marginal_cdf_[r + 1] - marginal_cdf_[r];
  const double fr = rw > 0.0 ? std::clamp((u1 - marginal_cdf_[r]) / rw, 0.0, 1.0) : 0.5;
  const std::vector<double>& cc = conditional_cdf_[r];
  const int c = find_bin(cc, u2);
  const double cw = cc[c + 1] - cc[c];
  const double fc = cw > 0.0 ? std::clamp((u2 - cc[c]) / cw, 0.0, 1.0) : 0.5;
  const double u = (c + fc) / w;
  const double v = (r + fr) / h;
  const double s = std::sin(v * kPi);
  const double p_uv = texel_prob_[static_cast<std::size_t>(r) * w + c] * w * h;
  if (!(s > 0.0) || !(p_uv > 0.0)) return {direction_from_uv(u, v), 0.0};
  return {direction_from_uv(u, v), p_uv / (2.0 * kPi * kPi * s)};
}

double EnvMap::pdf(const Vec3& dir) const {
  if (uniform_) return 1.0 / (4.0 * kPi);
  double u, v;
  uv_from_direction(dir, u, v);
  const double s = std::sin(v * kPi);
  if (!(s > 0.0)) return 0.0;
  const int c = std::clamp(static_cast<int>(u * width()), 0, width() - 1);
  const int r = std::clamp(static_cast<int>(v * height()), 0, height() - 1);
  const double p_uv = texel_prob_[static_cast<std::size_t>(r) * width() + c] * width() * height();
  return p_uv / (2.0 * kPi * kPi * s);
}

Image read_pfm_bytes(const std::string& bytes) {
  std::istringstream in(bytes);
  std::string magic;
  int w = 0, h = 0;
  double scale = 0.0;
  in >> magic >> w >> h >> scale;
  if (!in || magic != "PF") throw std::runtime_error("pfm: expected color 'PF' header");
  if (w <= 0 || h <= 0 || scale == 0.0) throw std::runtime_error("pfm: bad dimensions or scale");
  in.get();  // single whitespace byte before the raster
  const std::size_t offset = static_cast<std::size_t>(in.tellg());
  const std::size_t need = static_cast<std::size_t>(w) * h * 3 * sizeof(float);
  if (bytes.size() < offset + need) throw std::runtime_error("pfm: truncated raster");
  const bool little = scale < 0.0;
  const bool swap = little != (std::endian::native == std::endian::little);
  Image img(w, h);
  const char* p = bytes.data() + offset;
  for (int row = 0; row < h; ++row) {
    const int y = h - 1 - row;
    for (int x = 0; x < w; ++x) {
      for (int ch = 0; ch < 3; ++ch) {
        uint32_t bits;
        std::memcpy(&bits, p, 4);
        p += 4;
        if (swap) bits = __builtin_bswap32(bits);
        float f;
        std::memcpy(&f, &bits, 4);
        img.at(x, y)[ch] = f;
      }
    }
  }
  return img;
}

std::string write_pfm_bytes(const Image& image) {
  std::string out = "PF\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n-1.0\n";
  const std::size_t header = out.size();
  out.resize(header + image.size() * 3 * sizeof(float));
  char* p = out.data() + header;
  for (int row = 0; row < image.height; ++row) {
    const int y = image.height - 1 - row;
    for (int x = 0; x < image.width; ++x) {
      for (int ch = 0; ch < 3; ++ch) {
        const float f = static_cast<float>(image.at(x, y)[ch]);
        uint32_t bits;
        std::memcpy(&bits, &f, 4);
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
        std::memcpy(p, &bits, 4);
        p += 4;
      }
    }
  }
  return out;
}

Image load_pfm(const std::string& path) { return read_pfm_bytes(read_file(path)); }
void save_pfm(const std::string& path, const Image& image) { write_file_atomic(path, write_pfm_bytes(image)); }

}  // namespace pforge::render
