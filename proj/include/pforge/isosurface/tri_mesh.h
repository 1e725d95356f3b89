#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pforge/pointcloud/point_cloud.h"

namespace pforge {

using Triangle = std::array<std::uint32_t, 3>;

/// Scene-level material scalars carried with the mesh.
struct MaterialParams {
  double metallic = 0.0;
  double roughness = 0.5;

  friend bool operator==(const MaterialParams&, const MaterialParams&) = default;
};

/// Indexed triangle mesh with per-vertex color and unit normal.
struct TriMesh {
  std::vector<Vec3> positions;
  std::vector<Vec3> colors;
  std::vector<Vec3> normals;
  std::vector<Triangle> indices;
  MaterialParams material;

  std::size_t vertex_count() const { return positions.size(); }
  std::size_t face_count() const { return indices.size(); }
  bool empty() const { return indices.empty(); }

  /// Throws std::invalid_argument on out-of-range indices or attribute
  /// arrays whose size differs from the vertex count.
  void validate() const;

  friend bool operator==(const TriMesh&, const TriMesh&) = default;
};

Vec3 face_normal_unnormalized(const TriMesh& m, std::size_t face);  // 2 * area * unit normal
double triangle_area(const TriMesh& m, std::size_t face);
double surface_area(const TriMesh& m);

/// Area-weighted vertex normals; vertices without faces get +z.
std::vector<Vec3> area_weighted_normals(const TriMesh& m);

struct EdgeTopology {
  std::size_t edges = 0;
  std::size_t boundary_edges = 0;     // used by one face
  std::size_t nonmanifold_edges = 0;  // used by more than two faces
};

EdgeTopology edge_topology(const TriMesh& m);

/// V - E + F over referenced vertices.
long euler_characteristic(const TriMesh& m);

}  // namespace pforge
