#pragma once

#include <filesystem>
#include <vector>

#include "pforge/sdf/field.h"

namespace pforge::sdf {

/// Half-width of the sampled cube [-kGridBound, kGridBound]^3.
inline constexpr double kGridBound = 1.1;

/// Regular (res+1)^3 vertex lattice; vertex (i,j,k) has linear index
/// i + (res+1) * (j + (res+1) * k).
struct Lattice {
  int res = 0;
  double bound = kGridBound;

  int vertices_per_axis() const { return res + 1; }
  std::size_t vertex_count() const;
  double cell_size() const { return 2.0 * bound / res; }
  std::size_t index(int i, int j, int k) const;
  Vec3 position(int i, int j, int k) const;
  Vec3 position(std::size_t index) const;
};

/// Field values at every lattice vertex.
struct GridSamples {
  Lattice lattice;
  std::vector<double> sdf;
  std::vector<Vec3> color;
  std::vector<Vec3> normal;
};

inline constexpr int kMinGridRes = 8;

/// Evaluates the field on the lattice in parallel. Each vertex is written
/// by exactly one task, so the result does not depend on scheduling.
/// Throws std::runtime_error naming the first non-finite vertex.
GridSamples sample_grid(const ScalarField& field, int res, double bound = kGridBound);

/// Little-endian dump: int32 res, float64 bound, then float32 sdf values in
/// lattice order.
void write_grid_dump(const std::filesystem::path& path, const GridSamples& grid);

}  // namespace pforge::sdf
