#include "pforge/metrics/align.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include <tbb/parallel_for.h>

#include "pforge/metrics/chamfer.h"
#include "pforge/common/rng.h"
#include "pforge/pointcloud/knn.h"

namespace pforge::metrics {

namespace {

std::vector<Vec3> subsample(const std::vector<Vec3>& pts, std::size_t n, std::uint64_t seed) {
  if (pts.size() <= n) return pts;
  std::vector<std::size_t> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 gen(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + gen() % (idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  std::vector<Vec3> out;
  out.reserve(n);
  for (std::size_t i : idx) out.push_back(pts[i]);
  return out;
}

std::vector<Vec3> transform(const std::vector<Vec3>& pts, const Eigen::Matrix3d& r, const Vec3& t) {
  std::vector<Vec3> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = r * pts[i] + t;
  return out;
}

double rms_to(const std::vector<Vec3>& pts, const KnnIndex& index) {
  double s = 0.0;
  for (const Vec3& p : pts) {
    const double d = index.nearest(p).distance;
    s += d * d;
  }
  return std::sqrt(s / pts.size());
}

}  // namespace

void AlignSettings::validate() const {
  if (azimuth_steps < 1 || elevation_steps < 1 || roll_steps < 1)
    throw std::invalid_argument("align: rotation grid steps must be >= 1");
  if (subsample < 1) throw std::invalid_argument("align: subsample must be >= 1");
  if (icp_iterations < 0) throw std::invalid_argument("align: icp_iterations must be >= 0");
}

Eigen::Matrix3d grid_rotation(const AlignSettings& s, std::size_t index) {
  const std::size_t roll = index % s.roll_steps;
  const std::size_t el = (index / s.roll_steps) % s.elevation_steps;
  const std::size_t az = index / (static_cast<std::size_t>(s.roll_steps) * s.elevation_steps);
  const double two_pi = 2.0 * std::numbers::pi;
  const Eigen::AngleAxisd ry(two_pi * az / s.azimuth_steps, Vec3::UnitY());
  const Eigen::AngleAxisd rx(two_pi * el / s.elevation_steps, Vec3::UnitX());
  const Eigen::AngleAxisd rz(two_pi * roll / s.roll_steps, Vec3::UnitZ());
  return (ry * rx * rz).toRotationMatrix();
}

void kabsch(const std::vector<Vec3>& src, const std::vector<Vec3>& dst, Eigen::Matrix3d& r, Vec3& t) {
  Vec3 cs = Vec3::Zero(), cd = Vec3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    cs += src[i];
    cd += dst[i];
  }
  cs /= static_cast<double>(src.size());
  cd /= static_cast<double>(dst.size());
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) h += (src[i] - cs) * (dst[i] - cd).transpose();
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  r = svd.matrixV() * d * svd.matrixU().transpose();
  t = cd - r * cs;
}

AlignmentResult align(const std::vector<Vec3>& pred, const std::vector<Vec3>& gt, const AlignSettings& s) {
  s.validate();
  if (pred.empty() || gt.empty()) throw std::invalid_argument("metrics: empty point set");
  AlignmentResult res;
  res.pred_normalization = unit_cube_transform(pred);
  res.gt_normalization = unit_cube_transform(gt);
  res.scale = res.pred_normalization.scale / res.gt_normalization.scale;

  std::vector<Vec3> p(pred.size()), g(gt.size());
  for (std::size_t i = 0; i < pred.size(); ++i) p[i] = res.pred_normalization.apply(pred[i]);
  for (std::size_t i = 0; i < gt.size(); ++i) g[i] = res.gt_normalization.apply(gt[i]);

  const std::vector<Vec3> ps = subsample(p, s.subsample, derive_seed(s.seed, 1ULL));
  const std::vector<Vec3> gs = subsample(g, s.subsample, derive_seed(s.seed, 2ULL));
  const std::size_t candidates = static_cast<std::size_t>(s.azimuth_steps) * s.elevation_steps * s.roll_steps;
  std::vector<double> scores(candidates);
  tbb::parallel_for(std::size_t{0}, candidates, [&](std::size_t c) {
    scores[c] = chamfer(transform(ps, grid_rotation(s, c), Vec3::Zero()), gs);
  });
  res.grid_index = static_cast<std::size_t>(std::min_element(scores.begin(), scores.end()) - scores.begin());
  res.grid_chamfer = scores[res.grid_index];
  res.rotation = grid_rotation(s, res.grid_index);

  const KnnIndex gindex(g);
  const double grid_rms = rms_to(transform(p, res.rotation, Vec3::Zero()), gindex);
  Eigen::Matrix3d r = res.rotation;
  Vec3 t = Vec3::Zero();
  double prev = grid_rms;
  int it = 0;
  for (; it < s.icp_iterations; ++it) {
    const std::vector<Vec3> cur = transform(p, r, t);
    std::vector<Vec3> matched(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i) matched[i] = g[gindex.nearest(cur[i]).index];
    Eigen::Matrix3d dr;
    Vec3 dt;
    kabsch(cur, matched, dr, dt);
    r = dr * r;
    t = dr * t + dt;
    const double now = rms_to(transform(p, r, t), gindex);
    const double rel = std::abs(prev - now) / std::max(prev, 1e-300);
    prev = now;
    if (rel < s.icp_relative_tolerance) {
      ++it;
      break;
    }
  }
  res.icp_iterations = it;
  if (!std::isfinite(prev) || prev > grid_rms) {
    res.icp_diverged = true;
    res.residual = grid_rms;
    return res;
  }
  res.rotation = r;
  res.translation = t;
  res.residual = prev;
  return res;
}

}  // namespace pforge::metrics
