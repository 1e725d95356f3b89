#include "pforge/isosurface/marching_tets.h"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace pforge::iso {

double crossing_parameter(double sa, double sb) {
  if (sa == sb) return 0.5;
  return sa / (sa - sb);
}

Vec3 crossing_position(const Vec3& pa, const Vec3& oa, double sa, const Vec3& pb, const Vec3& ob, double sb) {
  const Vec3 a = pa + oa;
  const Vec3 b = pb + ob;
  return a + crossing_parameter(sa, sb) * (b - a);
}

EdgeJacobian vertex_position_jacobian(const Vec3& pa, const Vec3& oa, double sa, const Vec3& pb, const Vec3& ob,
                                      double sb) {
  if (!(sa * sb < 0.0)) throw std::invalid_argument("iso: jacobian requested on a non-crossing edge");
  const Vec3 a = pa + oa;
  const Vec3 b = pb + ob;
  const double denom = sa - sb;
  EdgeJacobian j;
  j.tau = sa / denom;
  j.d_sa = (b - a) * (-sb / (denom * denom));
  j.d_sb = (b - a) * (sa / (denom * denom));
  j.d_oa = (1.0 - j.tau) * Eigen::Matrix3d::Identity();
  j.d_ob = j.tau * Eigen::Matrix3d::Identity();
  return j;
}

EdgeJacobian vertex_position_jacobian(const TetGrid& grid, std::size_t a, std::size_t b) {
  const auto& lat = grid.lattice();
  return vertex_position_jacobian(lat.position(a), grid.offsets()[a], grid.sdf()[a], lat.position(b),
                                  grid.offsets()[b], grid.sdf()[b]);
}

namespace {

struct SoupBuilder {
  const TetGrid& grid;
  TriangleSoup& soup;

  void corner(std::size_t u, std::size_t v) {
    // Canonical orientation so an edge yields bit-identical data from every tet.
    const std::size_t a = std::min(u, v), b = std::max(u, v);
    const double sa = grid.sdf()[a], sb = grid.sdf()[b];
    const double tau = crossing_parameter(sa, sb);
    const Vec3 pa = grid.vertex_position(a), pb = grid.vertex_position(b);
    soup.positions.push_back(pa + tau * (pb - pa));
    soup.colors.push_back(grid.colors()[a] + tau * (grid.colors()[b] - grid.colors()[a]));
    if (grid.has_normals()) soup.normals.push_back(grid.normals()[a] + tau * (grid.normals()[b] - grid.normals()[a]));
    soup.keys.push_back(static_cast<EdgeKey>(a) * grid.vertex_count() + b);
  }

  void triangle(std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1, std::size_t c0, std::size_t c1,
                const Vec3& outward) {
    corner(a0, a1);
    corner(b0, b1);
    corner(c0, c1);
    soup.outward.push_back(outward);
  }
};

}  // namespace

TriangleSoup extract_triangle_soup(const TetGrid& grid) {
  const auto& sdf = grid.sdf();
  for (double s : sdf)
    if (!std::isfinite(s)) throw std::invalid_argument("iso: grid contains non-finite SDF values");

  TriangleSoup soup;
  SoupBuilder builder{grid, soup};
  const auto& lat = grid.lattice();
  const int res = lat.res;
  const auto& tmpl = cube_tet_template();

  for (int k = 0; k < res; ++k)
    for (int j = 0; j < res; ++j)
      for (int i = 0; i < res; ++i) {
        int negatives = 0;
        for (int c = 0; c < 8; ++c)
          negatives += sdf[lat.index(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1))] < 0.0;
        if (negatives == 0 || negatives == 8) continue;

        for (int t = 0; t < kTetsPerCube; ++t) {
          std::array<std::size_t, 4> v{};
          for (int c = 0; c < 4; ++c) v[c] = lat.index(i + tmpl[t][c][0], j + tmpl[t][c][1], k + tmpl[t][c][2]);
          std::array<std::size_t, 4> neg{}, pos{};
          int nn = 0, np = 0;
          for (int c = 0; c < 4; ++c) {
            if (sdf[v[c]] < 0.0) neg[nn++] = v[c];
            else pos[np++] = v[c];
          }
          if (nn == 0 || np == 0) continue;

          Vec3 neg_mean = Vec3::Zero(), pos_mean = Vec3::Zero();
          for (int c = 0; c < nn; ++c) neg_mean += grid.vertex_position(neg[c]);
          for (int c = 0; c < np; ++c) pos_mean += grid.vertex_position(pos[c]);
          const Vec3 outward = pos_mean / np - neg_mean / nn;

          if (nn == 1) {
            builder.triangle(neg[0], pos[0], neg[0], pos[1], neg[0], pos[2], outward);
          } else if (np == 1) {
            builder.triangle(pos[0], neg[0], pos[0], neg[1], pos[0], neg[2], outward);
          } else {
            // Quad a-c, a-d, b-d, b-c split along (a-c, b-d).
            const std::size_t a = neg[0], b = neg[1], c = pos[0], d = pos[1];
            builder.triangle(a, c, a, d, b, d, outward);
            builder.triangle(a, c, b, d, b, c, outward);
          }
        }
      }
  return soup;
}

TriMesh weld_and_orient(const TriangleSoup& soup, WeldReport* report) {
  TriMesh mesh;
  WeldReport local;
  std::unordered_map<EdgeKey, std::uint32_t> lookup;
  lookup.reserve(soup.keys.size() / 2 + 1);
  const bool field_normals = !soup.normals.empty();

  std::vector<Vec3> normal_acc;
  for (std::size_t t = 0; t < soup.triangle_count(); ++t) {
    Triangle tri{};
    for (int c = 0; c < 3; ++c) {
      const std::size_t corner = 3 * t + static_cast<std::size_t>(c);
      const auto [it, inserted] = lookup.try_emplace(soup.keys[corner], static_cast<std::uint32_t>(mesh.positions.size()));
      if (inserted) {
        mesh.positions.push_back(soup.positions[corner]);
        mesh.colors.push_back(soup.colors[corner]);
        if (field_normals) normal_acc.push_back(soup.normals[corner]);
      }
      tri[c] = it->second;
    }
    const Vec3& p0 = mesh.positions[tri[0]];
    const Vec3 n = (mesh.positions[tri[1]] - p0).cross(mesh.positions[tri[2]] - p0);
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] || 0.5 * n.norm() <= kDegenerateArea) {
      ++local.dropped_degenerate;
      continue;
    }
    if (n.dot(soup.outward[t]) < 0.0) std::swap(tri[1], tri[2]);
    mesh.indices.push_back(tri);
  }

  if (field_normals) {
    mesh.normals.resize(normal_acc.size());
    const std::vector<Vec3> geometric = area_weighted_normals(mesh);
    for (std::size_t v = 0; v < normal_acc.size(); ++v) {
      const double len = normal_acc[v].norm();
      mesh.normals[v] = len > 1e-12 ? Vec3(normal_acc[v] / len) : geometric[v];
    }
  } else {
    mesh.normals = area_weighted_normals(mesh);
  }

  const EdgeTopology topo = edge_topology(mesh);
  local.boundary_edges = topo.boundary_edges;
  local.nonmanifold_edges = topo.nonmanifold_edges;
  if (report) *report = local;
  return mesh;
}

TriMesh marching_tets(const TetGrid& grid, WeldReport* report) {
  return weld_and_orient(extract_triangle_soup(grid), report);
}

}  // namespace pforge::iso
