#include "pforge/render/camera.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pforge/render/image.h"

namespace pforge::render {

double tonemap_channel(double linear) {
  const double x = std::max(linear, 0.0);
  const double r = x / (1.0 + x);
  return r <= 0.0031308 ? 12.92 * r : 1.055 * std::pow(r, 1.0 / 2.4) - 0.055;
}

Vec3 tonemap(const Vec3& linear) {
  return Vec3(tonemap_channel(linear.x()), tonemap_channel(linear.y()), tonemap_channel(linear.z()));
}

Image tonemap(const Image& hdr) {
  Image out = hdr;
  for (Vec3& p : out.pixels) p = tonemap(p);
  return out;
}

void Camera::validate() const {
  if (!(fov_y > 0.0 && fov_y < std::numbers::pi)) throw std::invalid_argument("camera: fov outside (0, pi)");
  if (width <= 0 || height <= 0) throw std::invalid_argument("camera: image size must be positive");
  if (!(near_plane > 0.0)) throw std::invalid_argument("camera: near plane must be positive");
  const Vec3 f = target - position;
  if (!(f.norm() > 0.0)) throw std::invalid_argument("camera: position equals target");
  if (!(f.normalized().cross(up).norm() > 1e-9)) throw std::invalid_argument("camera: up parallel to view direction");
}

Vec3 Camera::forward() const { return (target - position).normalized(); }
Vec3 Camera::right() const { return forward().cross(up).normalized(); }
Vec3 Camera::true_up() const { return right().cross(forward()); }
double Camera::focal_pixels() const { return 0.5 * height / std::tan(0.5 * fov_y); }

double Camera::view_depth(const Vec3& world) const { return (world - position).dot(forward()); }

std::optional<ScreenPoint> Camera::project(const Vec3& world) const {
  const Vec3 d = world - position;
  const double z = d.dot(forward());
  if (!(z > near_plane)) return std::nullopt;
  const double f = focal_pixels();
  return ScreenPoint{0.5 * width + f * d.dot(right()) / z, 0.5 * height - f * d.dot(true_up()) / z, z};
}

Camera Camera::orbit(double azimuth_deg, double elevation_deg, double distance, const Vec3& target, double fov_y,
                     int width, int height) {
  const double az = azimuth_deg * std::numbers::pi / 180.0;
  const double el = elevation_deg * std::numbers::pi / 180.0;
  Camera c;
  c.target = target;
  c.position = target + distance * Vec3(std::cos(el) * std::sin(az), std::sin(el), std::cos(el) * std::cos(az));
  c.up = std::abs(std::sin(el)) > 0.999 ? Vec3(-std::sin(az), 0.0, -std::cos(az)) : Vec3(Vec3::UnitY());
  c.fov_y = fov_y;
  c.width = width;
  c.height = height;
  c.validate();
  return c;
}

}  // namespace pforge::render
