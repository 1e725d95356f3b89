#include "pforge/metrics/surface_sampling.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace pforge::metrics {

namespace {
double canonical(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
}  // namespace

std::vector<Vec3> sample_surface(const TriMesh& mesh, std::size_t n, std::uint64_t seed) {
  std::vector<double> cdf(mesh.face_count() + 1, 0.0);
  for (std::size_t f = 0; f < mesh.face_count(); ++f) cdf[f + 1] = cdf[f] + triangle_area(mesh, f);
  const double total = cdf.back();
  if (!(total > 0.0)) throw std::invalid_argument("sample_surface: mesh has zero area");
  std::mt19937_64 gen(seed);
  std::vector<Vec3> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = canonical(gen) * total;
    auto it = std::upper_bound(cdf.begin() + 1, cdf.end(), u);
    std::size_t f = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()) - 1, mesh.face_count() - 1);
    while (f > 0 && !(cdf[f + 1] > cdf[f])) --f;
    double r1 = canonical(gen), r2 = canonical(gen);
    if (r1 + r2 > 1.0) {
      r1 = 1.0 - r1;
      r2 = 1.0 - r2;
    }
    const Triangle& t = mesh.indices[f];
    const Vec3& a = mesh.positions[t[0]];
    out.push_back(a + r1 * (mesh.positions[t[1]] - a) + r2 * (mesh.positions[t[2]] - a));
  }
  return out;
}

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Voronoi-region walk (Ericson, Real-Time Collision Detection 5.1.5).
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return (p - a).norm();
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return (p - b).norm();
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return (p - (a + v * ab)).norm();
  }
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return (p - c).norm();
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return (p - (a + w * ac)).norm();
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return (p - (b + w * (c - b))).norm();
  }
  const double denom = va + vb + vc;
  if (!(std::abs(denom) > 0.0)) {
    // Degenerate triangle: nearest of its three edges.
    auto seg = [&](const Vec3& s0, const Vec3& s1) {
      const Vec3 d = s1 - s0;
      const double l2 = d.squaredNorm();
      const double t = l2 > 0.0 ? std::clamp((p - s0).dot(d) / l2, 0.0, 1.0) : 0.0;
      return (p - (s0 + t * d)).norm();
    };
    return std::min({seg(a, b), seg(b, c), seg(c, a)});
  }
  const double v = vb / denom, w = vc / denom;
  return (p - (a + ab * v + ac * w)).norm();
}

MeshDistance::MeshDistance(const TriMesh& mesh) {
  if (mesh.empty()) throw std::invalid_argument("MeshDistance: empty mesh");
  std::vector<Vec3> cent;
  cent.reserve(mesh.face_count());
  for (const Triangle& t : mesh.indices) {
    const Vec3& a = mesh.positions[t[0]];
    const Vec3& b = mesh.positions[t[1]];
    const Vec3& c = mesh.positions[t[2]];
    a_.push_back(a);
    b_.push_back(b);
    c_.push_back(c);
    const Vec3 m = (a + b + c) / 3.0;
    cent.push_back(m);
    max_radius_ = std::max({max_radius_, (a - m).norm(), (b - m).norm(), (c - m).norm()});
  }
  centroids_ = KnnIndex(std::move(cent));
}

double MeshDistance::distance(const Vec3& p) const {
  const Neighbor nn = centroids_.nearest(p);
  double best = point_triangle_distance(p, a_[nn.index], b_[nn.index], c_[nn.index]);
  for (const Neighbor& cand : centroids_.radius(p, best + max_radius_ * (1.0 + 1e-9) + 1e-12)) {
    if (cand.distance - max_radius_ > best) break;
    best = std::min(best, point_triangle_distance(p, a_[cand.index], b_[cand.index], c_[cand.index]));
  }
  return best;
}

}  // namespace pforge::metrics
