#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "pforge/isosurface/tri_mesh.h"
#include "pforge/pointcloud/point_cloud.h"
#include "pforge/render/image.h"
#include "pforge/sdf/field.h"

namespace pforge::app {

/// Generated ground-truth shapes, all inside [-1, 1]^3.
///   sphere  radius 1
///   torus   ring radius 0.7 in the xz-plane, tube radius 0.3
///   box     half extents (0.8, 0.5, 0.6)
///   mug     capped cylinder along z (radius 0.55, half height 0.7) with a
///           torus handle on the +x side
enum class Shape { Sphere, Torus, Box, Mug };

Shape shape_from_string(const std::string& name);
const char* to_string(Shape s);

inline constexpr double kTorusMajor = 0.7;
inline constexpr double kTorusMinor = 0.3;

std::shared_ptr<const sdf::ScalarField> fixture_field(Shape s);

/// Procedural color, smooth in position and inside [0.1, 0.9].
Vec3 fixture_color(const Vec3& p);

/// Area-uniform surface samples with analytic normals and procedural
/// colors. Same (shape, n, seed) gives identical clouds.
PointCloud fixture_cloud(Shape s, std::size_t n, std::uint64_t seed);

/// Dense reference mesh: parametric tessellation for sphere, torus and box;
/// the mug is extracted from its field at resolution 128.
TriMesh fixture_mesh(Shape s);

/// Equirectangular sun-and-sky radiance: a sky gradient, a darker ground
/// and a small bright sun disk.
render::Image fixture_env(int width = 64, int height = 32);

}  // namespace pforge::app
