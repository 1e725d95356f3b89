#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "pforge/isosurface/tet_grid.h"
#include "pforge/isosurface/tri_mesh.h"

namespace pforge::iso {

/// Undirected lattice edge key: lo * vertex_count + hi.
using EdgeKey = std::uint64_t;

/// Unwelded marching-tets output: three corners per triangle, each tagged
/// with the lattice edge it was interpolated on.
struct TriangleSoup {
  std::vector<Vec3> positions;
  std::vector<Vec3> colors;
  std::vector<Vec3> normals;  // empty when the grid has no field normals
  std::vector<EdgeKey> keys;
  std::vector<Vec3> outward;  // per triangle, from the negative toward the positive side

  std::size_t triangle_count() const { return outward.size(); }
};

/// Interpolation parameter s_a / (s_a - s_b); 0.5 when both values are equal.
double crossing_parameter(double sa, double sb);

/// (p_a + o_a) + tau * ((p_b + o_b) - (p_a + o_a)).
Vec3 crossing_position(const Vec3& pa, const Vec3& oa, double sa, const Vec3& pb, const Vec3& ob, double sb);

/// Derivatives of the crossing vertex with respect to both SDF values and
/// both (effective) offsets.
struct EdgeJacobian {
  double tau = 0.5;
  Vec3 d_sa = Vec3::Zero();
  Vec3 d_sb = Vec3::Zero();
  Eigen::Matrix3d d_oa = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d d_ob = Eigen::Matrix3d::Zero();
};

/// Throws std::invalid_argument unless s_a * s_b < 0.
EdgeJacobian vertex_position_jacobian(const Vec3& pa, const Vec3& oa, double sa, const Vec3& pb, const Vec3& ob,
                                      double sb);
EdgeJacobian vertex_position_jacobian(const TetGrid& grid, std::size_t a, std::size_t b);

/// Per-tet triangles at isolevel 0 (negative = inside). Cubes are visited in
/// lattice order, so the output is deterministic.
TriangleSoup extract_triangle_soup(const TetGrid& grid);

struct WeldReport {
  std::size_t boundary_edges = 0;
  std::size_t nonmanifold_edges = 0;
  std::size_t dropped_degenerate = 0;
};

/// Triangles with area at or below this are not emitted.
inline constexpr double kDegenerateArea = 1e-18;

/// Merges corners sharing an edge key, winds every triangle so its normal
/// points to the positive side, and fills normals (interpolated field
/// normals when present, area-weighted otherwise). Non-manifold edges are
/// counted in the report but left as they are.
TriMesh weld_and_orient(const TriangleSoup& soup, WeldReport* report = nullptr);

/// extract_triangle_soup followed by weld_and_orient. Throws on non-finite
/// SDF values.
TriMesh marching_tets(const TetGrid& grid, WeldReport* report = nullptr);

}  // namespace pforge::iso
