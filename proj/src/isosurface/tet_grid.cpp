#include "pforge/isosurface/tet_grid.h"

#include <algorithm>
#include <stdexcept>

#include <Eigen/Dense>

namespace pforge::iso {

namespace {

using Template = std::array<std::array<std::array<int, 3>, 4>, kTetsPerCube>;

Template make_template() {
  const std::array<std::array<int, 3>, 6> perms = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  Template out{};
  for (std::size_t p = 0; p < perms.size(); ++p) {
    std::array<int, 3> corner = {0, 0, 0};
    out[p][0] = corner;
    for (int step = 0; step < 3; ++step) {
      corner[perms[p][step]] = 1;
      out[p][step + 1] = corner;
    }
    const auto vec = [&](int a) {
      return Eigen::Vector3d(out[p][a][0] - out[p][0][0], out[p][a][1] - out[p][0][1], out[p][a][2] - out[p][0][2]);
    };
    Eigen::Matrix3d m;
    m << vec(1), vec(2), vec(3);
    if (m.determinant() < 0.0) std::swap(out[p][2], out[p][3]);
  }
  return out;
}

}  // namespace

const Template& cube_tet_template() {
  static const Template t = make_template();
  return t;
}

TetGrid::TetGrid(sdf::GridSamples samples, bool use_field_normals)
    : lattice_(samples.lattice),
      sdf_(std::move(samples.sdf)),
      offsets_(sdf_.size(), Vec3::Zero()),
      colors_(std::move(samples.color)) {
  if (use_field_normals) normals_ = std::move(samples.normal);
  if (colors_.size() != sdf_.size()) colors_.assign(sdf_.size(), Vec3::Ones());
  if (!normals_.empty() && normals_.size() != sdf_.size()) normals_.clear();
}

std::size_t TetGrid::tet_count() const {
  const auto r = static_cast<std::size_t>(lattice_.res);
  return r * r * r * kTetsPerCube;
}

std::array<std::size_t, 4> TetGrid::tet(std::size_t t) const {
  const auto r = static_cast<std::size_t>(lattice_.res);
  const std::size_t cube = t / kTetsPerCube;
  const auto i = static_cast<int>(cube % r);
  const auto j = static_cast<int>((cube / r) % r);
  const auto k = static_cast<int>(cube / (r * r));
  const auto& tmpl = cube_tet_template()[t % kTetsPerCube];
  std::array<std::size_t, 4> out{};
  for (int c = 0; c < 4; ++c) out[c] = lattice_.index(i + tmpl[c][0], j + tmpl[c][1], k + tmpl[c][2]);
  return out;
}

Vec3 TetGrid::vertex_position(std::size_t v) const { return lattice_.position(v) + offsets_[v]; }

void TetGrid::set_offset(std::size_t v, const Vec3& offset) {
  const double limit = max_offset();
  const double len = offset.norm();
  offsets_[v] = len > limit ? Vec3(offset * (limit / len)) : offset;
}

void TetGrid::set_offsets(std::vector<Vec3> offsets) {
  if (offsets.size() != sdf_.size()) throw std::invalid_argument("tetgrid: offset count mismatch");
  offsets_ = std::move(offsets);
  for (std::size_t v = 0; v < offsets_.size(); ++v) set_offset(v, offsets_[v]);
}

}  // namespace pforge::iso
