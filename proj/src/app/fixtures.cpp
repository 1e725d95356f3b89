#include "pforge/app/fixtures.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>

#include "pforge/isosurface/marching_tets.h"
#include "pforge/isosurface/tet_grid.h"
#include "pforge/render/envmap.h"
#include "pforge/sdf/analytic.h"
#include "pforge/sdf/grid.h"

namespace pforge::app {

namespace {

constexpr double kPi = std::numbers::pi;
const Vec3 kBoxHalf(0.8, 0.5, 0.6);
constexpr double kMugRadius = 0.55;
constexpr double kMugHalfHeight = 0.7;
const Vec3 kHandleCenter(0.55, 0.0, 0.0);
constexpr double kHandleMajor = 0.32;
constexpr double kHandleMinor = 0.08;

double canonical(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

// Torus with its ring in the xz-plane around `c`: point and outward normal.
void torus_point(const Vec3& c, double major, double minor, double theta, double phi, Vec3& p, Vec3& n) {
  const Vec3 radial(std::cos(phi), 0.0, std::sin(phi));
  n = std::cos(theta) * radial + std::sin(theta) * Vec3::UnitY();
  p = c + major * radial + minor * n;
}

// Area-uniform torus sample by rejection on the (R + r cos theta) density.
void sample_torus(std::mt19937_64& gen, const Vec3& c, double major, double minor, Vec3& p, Vec3& n) {
  for (;;) {
    const double theta = 2.0 * kPi * canonical(gen);
    const double phi = 2.0 * kPi * canonical(gen);
    if (canonical(gen) * (major + minor) <= major + minor * std::cos(theta)) {
      torus_point(c, major, minor, theta, phi, p, n);
      return;
    }
  }
}

void sample_box(std::mt19937_64& gen, const Vec3& half, Vec3& p, Vec3& n) {
  const double axy = half.x() * half.y(), ayz = half.y() * half.z(), axz = half.x() * half.z();
  const double u = canonical(gen) * 2.0 * (axy + ayz + axz);
  const double s = canonical(gen) < 0.5 ? -1.0 : 1.0;
  const double a = 2.0 * canonical(gen) - 1.0, b = 2.0 * canonical(gen) - 1.0;
  if (u < 2.0 * axy) {
    p = Vec3(a * half.x(), b * half.y(), s * half.z());
    n = Vec3(0, 0, s);
  } else if (u < 2.0 * (axy + ayz)) {
    p = Vec3(s * half.x(), a * half.y(), b * half.z());
    n = Vec3(s, 0, 0);
  } else {
    p = Vec3(a * half.x(), s * half.y(), b * half.z());
    n = Vec3(0, s, 0);
  }
}

// Capped cylinder along z.
void sample_cylinder(std::mt19937_64& gen, double r, double hh, Vec3& p, Vec3& n) {
  const double side = 2.0 * kPi * r * 2.0 * hh, cap = kPi * r * r;
  const double u = canonical(gen) * (side + 2.0 * cap);
  const double phi = 2.0 * kPi * canonical(gen);
  if (u < side) {
    const double z = (2.0 * canonical(gen) - 1.0) * hh;
    n = Vec3(std::cos(phi), std::sin(phi), 0.0);
    p = Vec3(r * n.x(), r * n.y(), z);
  } else {
    const double s = u < side + cap ? 1.0 : -1.0;
    const double rr = r * std::sqrt(canonical(gen));
    p = Vec3(rr * std::cos(phi), rr * std::sin(phi), s * hh);
    n = Vec3(0, 0, s);
  }
}

TriMesh grid_mesh(int nu, int nv, bool wrap_u, bool wrap_v, const std::function<void(double, double, Vec3&, Vec3&)>& f) {
  TriMesh m;
  const int cu = wrap_u ? nu : nu + 1;
  const int cv = wrap_v ? nv : nv + 1;
  for (int j = 0; j < cv; ++j) {
    for (int i = 0; i < cu; ++i) {
      Vec3 p, n;
      f(static_cast<double>(i) / nu, static_cast<double>(j) / nv, p, n);
      m.positions.push_back(p);
      m.normals.push_back(n);
      m.colors.push_back(fixture_color(p));
    }
  }
  auto id = [&](int i, int j) { return static_cast<std::uint32_t>((j % cv) * cu + (i % cu)); };
  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < nu; ++i) {
      const std::uint32_t a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      m.indices.push_back({a, b, c});
      m.indices.push_back({a, c, d});
    }
  }
  return m;
}

// Drops zero-area faces (pole fans) and orients every face with its normal
// agreeing with the analytic vertex normals.
TriMesh tidy(TriMesh m) {
  std::vector<Triangle> keep;
  for (std::size_t f = 0; f < m.indices.size(); ++f) {
    const Vec3 fn = face_normal_unnormalized(m, f);
    if (!(fn.norm() > 1e-14)) continue;
    Triangle t = m.indices[f];
    const Vec3 avg = m.normals[t[0]] + m.normals[t[1]] + m.normals[t[2]];
    if (fn.dot(avg) < 0.0) std::swap(t[1], t[2]);
    keep.push_back(t);
  }
  m.indices = std::move(keep);
  return m;
}

}  // namespace

Shape shape_from_string(const std::string& name) {
  if (name == "sphere") return Shape::Sphere;
  if (name == "torus") return Shape::Torus;
  if (name == "box") return Shape::Box;
  if (name == "mug") return Shape::Mug;
  throw std::invalid_argument("fixture: unknown shape '" + name + "' (sphere, torus, box, mug)");
}

const char* to_string(Shape s) {
  switch (s) {
    case Shape::Sphere: return "sphere";
    case Shape::Torus: return "torus";
    case Shape::Box: return "box";
    case Shape::Mug: return "mug";
  }
  return "?";
}

std::shared_ptr<const sdf::ScalarField> fixture_field(Shape s) {
  switch (s) {
    case Shape::Sphere: return std::make_shared<sdf::SphereSdf>(1.0);
    case Shape::Torus: return std::make_shared<sdf::TorusSdf>(kTorusMajor, kTorusMinor, Vec3::Zero(), sdf::Axis::Y);
    case Shape::Box: return std::make_shared<sdf::BoxSdf>(kBoxHalf);
    case Shape::Mug:
      return std::make_shared<sdf::UnionSdf>(std::vector<std::shared_ptr<const sdf::ScalarField>>{
          std::make_shared<sdf::CylinderSdf>(kMugRadius, kMugHalfHeight),
          std::make_shared<sdf::TorusSdf>(kHandleMajor, kHandleMinor, kHandleCenter, sdf::Axis::Y)});
  }
  throw std::invalid_argument("fixture: bad shape");
}

Vec3 fixture_color(const Vec3& p) {
  const Vec3 c(0.5 + 0.4 * std::sin(2.1 * p.x() + 0.3), 0.5 + 0.4 * std::sin(1.7 * p.y() + 1.9),
               0.5 + 0.4 * std::sin(2.6 * p.z() + 4.1));
  return c.cwiseMax(0.1).cwiseMin(0.9);
}

PointCloud fixture_cloud(Shape s, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("fixture: n must be positive");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  PointCloud pc;
  pc.positions.reserve(n);
  const sdf::CylinderSdf body(kMugRadius, kMugHalfHeight);
  const sdf::TorusSdf handle(kHandleMajor, kHandleMinor, kHandleCenter, sdf::Axis::Y);
  const double body_area = 2.0 * kPi * kMugRadius * 2.0 * kMugHalfHeight + 2.0 * kPi * kMugRadius * kMugRadius;
  const double handle_area = 4.0 * kPi * kPi * kHandleMajor * kHandleMinor;
  while (pc.positions.size() < n) {
    Vec3 p, nrm;
    switch (s) {
      case Shape::Sphere: {
        Vec3 g(normal(gen), normal(gen), normal(gen));
        if (!(g.norm() > 1e-12)) continue;
        nrm = g.normalized();
        p = nrm;
        break;
      }
      case Shape::Torus: sample_torus(gen, Vec3::Zero(), kTorusMajor, kTorusMinor, p, nrm); break;
      case Shape::Box: sample_box(gen, kBoxHalf, p, nrm); break;
      case Shape::Mug: {
        // Sample the union boundary: pick a part by area, reject points buried in the other part.
        if (canonical(gen) * (body_area + handle_area) < body_area) {
          sample_cylinder(gen, kMugRadius, kMugHalfHeight, p, nrm);
          if (handle.distance(p) < 0.0) continue;
        } else {
          sample_torus(gen, kHandleCenter, kHandleMajor, kHandleMinor, p, nrm);
          if (body.distance(p) < 0.0) continue;
        }
        break;
      }
    }
    pc.positions.push_back(p);
    pc.normals.push_back(nrm);
    pc.colors.push_back(fixture_color(p));
  }
  return pc;
}

TriMesh fixture_mesh(Shape s) {
  switch (s) {
    case Shape::Sphere:
      return tidy(grid_mesh(128, 64, true, false, [](double u, double v, Vec3& p, Vec3& n) {
        const double th = v * kPi, ph = u * 2.0 * kPi;
        n = Vec3(std::sin(th) * std::cos(ph), std::cos(th), std::sin(th) * std::sin(ph));
        p = n;
      }));
    case Shape::Torus:
      return tidy(grid_mesh(128, 48, true, true, [](double u, double v, Vec3& p, Vec3& n) {
        torus_point(Vec3::Zero(), kTorusMajor, kTorusMinor, v * 2.0 * kPi, u * 2.0 * kPi, p, n);
      }));
    case Shape::Box: {
      TriMesh m;
      constexpr int k = 16;
      for (int axis = 0; axis < 3; ++axis) {
        for (double side : {-1.0, 1.0}) {
          const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
          const std::uint32_t base = static_cast<std::uint32_t>(m.positions.size());
          for (int j = 0; j <= k; ++j) {
            for (int i = 0; i <= k; ++i) {
              Vec3 p = Vec3::Zero();
              p[axis] = side * kBoxHalf[axis];
              p[a1] = (2.0 * i / k - 1.0) * kBoxHalf[a1];
              p[a2] = (2.0 * j / k - 1.0) * kBoxHalf[a2];
              Vec3 n = Vec3::Zero();
              n[axis] = side;
              m.positions.push_back(p);
              m.normals.push_back(n);
              m.colors.push_back(fixture_color(p));
            }
          }
          for (int j = 0; j < k; ++j) {
            for (int i = 0; i < k; ++i) {
              const std::uint32_t a = base + j * (k + 1) + i;
              m.indices.push_back({a, a + 1, a + k + 2});
              m.indices.push_back({a, a + k + 2, a + k + 1});
            }
          }
        }
      }
      return tidy(std::move(m));
    }
    case Shape::Mug: {
      iso::TetGrid grid(sdf::sample_grid(*fixture_field(Shape::Mug), 128));
      TriMesh m = iso::marching_tets(grid);
      for (std::size_t i = 0; i < m.positions.size(); ++i) m.colors[i] = fixture_color(m.positions[i]);
      return m;
    }
  }
  throw std::invalid_argument("fixture: bad shape");
}

render::Image fixture_env(int width, int height) {
  if (width < 4 || height < 2) throw std::invalid_argument("fixture: env map too small");
  render::Image img(width, height);
  const Vec3 sun = Vec3(0.4, 0.8, 0.45).normalized();
  const double sun_cos = std::cos(4.0 * kPi / 180.0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Vec3 d = render::direction_from_uv((x + 0.5) / width, (y + 0.5) / height);
      Vec3 L;
      if (d.y() >= 0.0) {
        const double t = d.y();
        L = (1.0 - t) * Vec3(0.9, 0.95, 1.0) + t * Vec3(0.35, 0.55, 0.95);
      } else {
        L = Vec3(0.25, 0.2, 0.15);
      }
      if (d.dot(sun) >= sun_cos) L += Vec3(60.0, 55.0, 45.0);
      img.at(x, y) = L;
    }
  }
  // The texel holding the sun center is always lit, even on coarse maps.
  double su, sv;
  render::uv_from_direction(sun, su, sv);
  const int sx = std::min(width - 1, static_cast<int>(su * width));
  const int sy = std::min(height - 1, static_cast<int>(sv * height));
  if (img.at(sx, sy).x() < 10.0) img.at(sx, sy) += Vec3(60.0, 55.0, 45.0);
  return img;
}

}  // namespace pforge::app
