#include "pforge/isosurface/tri_mesh.h"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace pforge {

void TriMesh::validate() const {
  const std::size_t n = positions.size();
  if (!colors.empty() && colors.size() != n) throw std::invalid_argument("mesh: color count mismatch");
  if (!normals.empty() && normals.size() != n) throw std::invalid_argument("mesh: normal count mismatch");
  for (std::size_t f = 0; f < indices.size(); ++f)
    for (std::uint32_t v : indices[f])
      if (v >= n) throw std::invalid_argument("mesh: face " + std::to_string(f) + " index out of range");
}

Vec3 face_normal_unnormalized(const TriMesh& m, std::size_t face) {
  const Triangle& t = m.indices[face];
  const Vec3& a = m.positions[t[0]];
  return (m.positions[t[1]] - a).cross(m.positions[t[2]] - a);
}

double triangle_area(const TriMesh& m, std::size_t face) { return 0.5 * face_normal_unnormalized(m, face).norm(); }

double surface_area(const TriMesh& m) {
  double a = 0.0;
  for (std::size_t f = 0; f < m.face_count(); ++f) a += triangle_area(m, f);
  return a;
}

std::vector<Vec3> area_weighted_normals(const TriMesh& m) {
  std::vector<Vec3> acc(m.vertex_count(), Vec3::Zero());
  for (std::size_t f = 0; f < m.face_count(); ++f) {
    const Vec3 n = face_normal_unnormalized(m, f);
    for (std::uint32_t v : m.indices[f]) acc[v] += n;
  }
  for (Vec3& n : acc) {
    const double len = n.norm();
    n = len > 0.0 ? Vec3(n / len) : Vec3::UnitZ();
  }
  return acc;
}

EdgeTopology edge_topology(const TriMesh& m) {
  std::unordered_map<std::uint64_t, std::uint32_t> uses;
  uses.reserve(m.face_count() * 2);
  for (const Triangle& t : m.indices)
    for (int e = 0; e < 3; ++e) {
      const std::uint64_t a = t[e], b = t[(e + 1) % 3];
      ++uses[std::min(a, b) << 32 | std::max(a, b)];
    }
  EdgeTopology topo;
  topo.edges = uses.size();
  for (const auto& [_, count] : uses) {
    if (count == 1) ++topo.boundary_edges;
    if (count > 2) ++topo.nonmanifold_edges;
  }
  return topo;
}

long euler_characteristic(const TriMesh& m) {
  std::vector<std::uint8_t> used(m.vertex_count(), 0);
  for (const Triangle& t : m.indices)
    for (std::uint32_t v : t) used[v] = 1;
  const long v = std::count(used.begin(), used.end(), std::uint8_t{1});
  return v - static_cast<long>(edge_topology(m).edges) + static_cast<long>(m.face_count());
}

}  // namespace pforge
