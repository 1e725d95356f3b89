#pragma once

#include <optional>

#include "pforge/pointcloud/point_cloud.h"

namespace pforge::render {

/// Continuous pixel coordinates (x right, y down; pixel centers at +0.5)
/// and linear view-space depth along the viewing direction.
struct ScreenPoint {
  double x = 0.0;
  double y = 0.0;
  double depth = 0.0;
};

struct Camera {
  Vec3 position = Vec3(0.0, 0.0, 3.0);
  Vec3 target = Vec3::Zero();
  Vec3 up = Vec3::UnitY();
  double fov_y = 0.8;  // radians
  int width = 64;
  int height = 64;
  double near_plane = 0.05;

  /// Throws std::invalid_argument for a degenerate basis, FOV outside
  /// (0, pi) or non-positive image size.
  void validate() const;

  Vec3 forward() const;
  Vec3 right() const;
  Vec3 true_up() const;
  double focal_pixels() const;

  /// Empty when the point lies at or behind the near plane.
  std::optional<ScreenPoint> project(const Vec3& world) const;
  double view_depth(const Vec3& world) const;

  /// Camera on a sphere of `distance` around `target`; azimuth about +y
  /// measured from +z, elevation toward +y, both in degrees.
  static Camera orbit(double azimuth_deg, double elevation_deg, double distance, const Vec3& target, double fov_y,
                      int width, int height);
};

}  // namespace pforge::render
