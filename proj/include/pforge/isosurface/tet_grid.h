#pragma once

#include <array>
#include <vector>

#include "pforge/sdf/grid.h"

namespace pforge::iso {

/// Offsets are clamped to this fraction of the cell size so tetrahedra
/// keep their orientation.
inline constexpr double kMaxOffsetFraction = 0.45;
inline constexpr int kTetsPerCube = 6;

/// Tetrahedral lattice: every cube is split into six tetrahedra around its
/// main diagonal (Kuhn split), which makes shared faces of neighboring
/// cubes agree. Tetrahedra are generated on the fly from their index.
class TetGrid {
 public:
  TetGrid() = default;
  /// Takes sdf/color/normal from the samples; offsets start at zero.
  explicit TetGrid(sdf::GridSamples samples, bool use_field_normals = true);

  const sdf::Lattice& lattice() const { return lattice_; }
  std::size_t vertex_count() const { return sdf_.size(); }
  std::size_t tet_count() const;

  /// Lattice vertex indices of tet `t`, positively oriented.
  std::array<std::size_t, 4> tet(std::size_t t) const;

  /// Lattice position plus (clamped) offset.
  Vec3 vertex_position(std::size_t v) const;

  const std::vector<double>& sdf() const { return sdf_; }
  const std::vector<Vec3>& offsets() const { return offsets_; }
  const std::vector<Vec3>& colors() const { return colors_; }
  const std::vector<Vec3>& normals() const { return normals_; }
  bool has_normals() const { return !normals_.empty(); }

  std::vector<double>& mutable_sdf() { return sdf_; }
  /// Stores offsets after clamping each to kMaxOffsetFraction * cell size.
  void set_offsets(std::vector<Vec3> offsets);
  void set_offset(std::size_t v, const Vec3& offset);
  double max_offset() const { return kMaxOffsetFraction * lattice_.cell_size(); }

 private:
  sdf::Lattice lattice_;
  std::vector<double> sdf_;
  std::vector<Vec3> offsets_;
  std::vector<Vec3> colors_;
  std::vector<Vec3> normals_;
};

/// Corner offsets (0/1 per axis) of the six tetrahedra of a unit cube.
const std::array<std::array<std::array<int, 3>, 4>, kTetsPerCube>& cube_tet_template();

}  // namespace pforge::iso
