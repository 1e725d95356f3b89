#include "pforge/app/pipeline.h"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "pforge/isosurface/tet_grid.h"
#include "pforge/sdf/grid.h"

namespace pforge::app {

namespace {
double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}
// Keeps an existing stage prefix, otherwise adds `stage`.
std::runtime_error stage_error(const char* stage, const std::exception& e) {
  const std::string msg = e.what();
  for (const char* known : {"pointcloud:", "normals:", "sdf:", "iso:", "isosurface:"}) {
    if (msg.rfind(known, 0) == 0) return std::runtime_error(msg);
  }
  return std::runtime_error(std::string(stage) + ": " + msg);
}

// The normalized cloud lies in [-1, 1]^3 while the lattice reaches 1.1, so
// a zero set touching the lattice shell is a spurious sheet (typically from
// badly oriented normals). Marking the shell as outside closes it off.
void close_at_lattice_shell(iso::TetGrid& grid) {
  const sdf::Lattice& lat = grid.lattice();
  const int n = lat.vertices_per_axis();
  const double outside = 1e-6 * lat.cell_size();
  std::vector<double>& s = grid.mutable_sdf();
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        if (i != 0 && j != 0 && k != 0 && i != n - 1 && j != n - 1 && k != n - 1) continue;
        double& v = s[lat.index(i, j, k)];
        v = std::max(v, outside);
      }
    }
  }
}

}  // namespace

void ReconstructParams::validate() const {
  if (resolution < sdf::kMinGridRes || resolution > 512)
    throw std::invalid_argument("reconstruct: resolution must be in [8, 512]");
  if (fit.k < 1 || fit.normal_k < 3) throw std::invalid_argument("reconstruct: fit k >= 1 and normal_k >= 3 required");
  if (!(fit.weight_epsilon > 0.0)) throw std::invalid_argument("reconstruct: weight_epsilon must be positive");
}

ReconstructResult reconstruct(const PointCloud& pc, const ReconstructParams& params) {
  params.validate();
  if (pc.empty()) throw std::invalid_argument("pointcloud: empty");
  ReconstructResult out;
  auto t0 = std::chrono::steady_clock::now();
  auto [normalized, sim] = normalize_to_unit_cube(pc);
  out.normalization = sim;
  const sdf::FittedPointSdf field = [&] {
    try {
      return sdf::fit_sdf(normalized, params.fit);
    } catch (const std::exception& e) {
      throw stage_error("sdf", e);
    }
  }();
  out.fit_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  iso::TetGrid grid = [&] {
    try {
      return iso::TetGrid(sdf::sample_grid(field, params.resolution));
    } catch (const std::exception& e) {
      throw stage_error("sdf", e);
    }
  }();
  close_at_lattice_shell(grid);
  out.grid_ms = ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  try {
    out.mesh = iso::marching_tets(grid, &out.weld);
  } catch (const std::exception& e) {
    throw stage_error("isosurface", e);
  }
  for (Vec3& p : out.mesh.positions) p = sim.invert(p);
  out.extract_ms = ms_since(t0);
  return out;
}

}  // namespace pforge::app
