#include "pforge/render/raster.h"

#include <algorithm>
#include <array>
#include <cmath>

namespace pforge::render {

GBuffer::GBuffer(int w, int h)
    : width(w),
      height(h),
      depth(static_cast<std::size_t>(w) * h, std::numeric_limits<double>::infinity()),
      position(depth.size(), Vec3::Zero()),
      normal(depth.size(), Vec3::Zero()),
      geo_normal(depth.size(), Vec3::Zero()),
      albedo(depth.size(), Vec3::Zero()),
      mask(depth.size(), 0),
      triangle(depth.size(), -1) {}

std::size_t GBuffer::covered() const { return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1)); }

namespace {

double edge_fn(const ScreenPoint& a, const ScreenPoint& b, double px, double py) {
  return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

// With the triangle wound to positive area, an edge owns its zero set when
// it runs downward, or is horizontal and runs leftward. A shared edge is
// traversed in opposite directions by its two triangles, so exactly one of
// them claims pixel centers lying on it.
bool owns_edge(const ScreenPoint& a, const ScreenPoint& b) {
  const double dy = b.y - a.y;
  const double dx = b.x - a.x;
  return dy > 0.0 || (dy == 0.0 && dx < 0.0);
}

}  // namespace

GBuffer rasterize(const TriMesh& mesh, const Camera& cam) {
  cam.validate();
  GBuffer g(cam.width, cam.height);
  const Vec3 eye = cam.position;
  const bool has_colors = mesh.colors.size() == mesh.positions.size();
  const bool has_normals = mesh.normals.size() == mesh.positions.size();

  for (std::size_t f = 0; f < mesh.indices.size(); ++f) {
    std::array<std::uint32_t, 3> vi = mesh.indices[f];
    std::array<ScreenPoint, 3> s;
    bool clipped = false;
    for (int k = 0; k < 3; ++k) {
      const auto p = cam.project(mesh.positions[vi[k]]);
      if (!p) {
        clipped = true;
        break;
      }
      s[k] = *p;
    }
    if (clipped) continue;
    double area = edge_fn(s[0], s[1], s[2].x, s[2].y);
    if (area == 0.0 || !std::isfinite(area)) continue;
    if (area < 0.0) {
      std::swap(s[1], s[2]);
      std::swap(vi[1], vi[2]);
      area = -area;
    }
    const Vec3& P0 = mesh.positions[vi[0]];
    const Vec3& P1 = mesh.positions[vi[1]];
    const Vec3& P2 = mesh.positions[vi[2]];
    const Vec3 face_n = (P1 - P0).cross(P2 - P0).normalized();

    const bool own0 = owns_edge(s[1], s[2]);
    const bool own1 = owns_edge(s[2], s[0]);
    const bool own2 = owns_edge(s[0], s[1]);

    const double min_x = std::min({s[0].x, s[1].x, s[2].x});
    const double max_x = std::max({s[0].x, s[1].x, s[2].x});
    const double min_y = std::min({s[0].y, s[1].y, s[2].y});
    const double max_y = std::max({s[0].y, s[1].y, s[2].y});
    const int x0 = std::max(0, static_cast<int>(std::ceil(min_x - 0.5)));
    const int x1 = std::min(g.width - 1, static_cast<int>(std::floor(max_x - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(min_y - 0.5)));
    const int y1 = std::min(g.height - 1, static_cast<int>(std::floor(max_y - 0.5)));

    for (int y = y0; y <= y1; ++y) {
      const double py = y + 0.5;
      for (int x = x0; x <= x1; ++x) {
        const double px = x + 0.5;
        const double w0 = edge_fn(s[1], s[2], px, py);
        const double w1 = edge_fn(s[2], s[0], px, py);
        const double w2 = edge_fn(s[0], s[1], px, py);
        if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
        if ((w0 == 0.0 && !own0) || (w1 == 0.0 && !own1) || (w2 == 0.0 && !own2)) continue;

        // Screen-space barycentrics to perspective-correct weights.
        const double q0 = w0 / area / s[0].depth;
        const double q1 = w1 / area / s[1].depth;
        const double q2 = w2 / area / s[2].depth;
        const double qs = q0 + q1 + q2;
        const double z = 1.0 / qs;
        const std::size_t i = g.index(x, y);
        if (!(z < g.depth[i])) continue;
        const double b0 = q0 * z, b1 = q1 * z, b2 = q2 * z;

        const Vec3 pos = b0 * P0 + b1 * P1 + b2 * P2;
        Vec3 geo = face_n;
        Vec3 nrm = has_normals ? Vec3(b0 * mesh.normals[vi[0]] + b1 * mesh.normals[vi[1]] + b2 * mesh.normals[vi[2]])
                               : face_n;
        if (!(nrm.norm() > 1e-12)) nrm = face_n;
        nrm.normalize();
        if (geo.dot(eye - pos) < 0.0) geo = -geo;
        if (nrm.dot(geo) < 0.0) nrm = -nrm;
        Vec3 alb = Vec3::Ones();
        if (has_colors) alb = b0 * mesh.colors[vi[0]] + b1 * mesh.colors[vi[1]] + b2 * mesh.colors[vi[2]];

        g.depth[i] = z;
        g.position[i] = pos;
        g.normal[i] = nrm;
        g.geo_normal[i] = geo;
        g.albedo[i] = alb.cwiseMax(0.0).cwiseMin(1.0);
        g.mask[i] = 1;
        g.triangle[i] = static_cast<std::int32_t>(f);
      }
    }
  }
  return g;
}

}  // namespace pforge::render
