#include "pforge/sdf/grid.h"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include <tbb/parallel_for.h>

#include "pforge/common/fileio.h"

namespace pforge::sdf {

std::size_t Lattice::vertex_count() const {
  const auto n = static_cast<std::size_t>(vertices_per_axis());
  return n * n * n;
}

std::size_t Lattice::index(int i, int j, int k) const {
  const auto n = static_cast<std::size_t>(vertices_per_axis());
  return static_cast<std::size_t>(i) + n * (static_cast<std::size_t>(j) + n * static_cast<std::size_t>(k));
}

Vec3 Lattice::position(int i, int j, int k) const {
  const double h = cell_size();
  return Vec3(-bound + h * i, -bound + h * j, -bound + h * k);
}

Vec3 Lattice::position(std::size_t index) const {
  const auto n = static_cast<std::size_t>(vertices_per_axis());
  const auto i = static_cast<int>(index % n);
  const auto j = static_cast<int>((index / n) % n);
  const auto k = static_cast<int>(index / (n * n));
  return position(i, j, k);
}

GridSamples sample_grid(const ScalarField& field, int res, double bound) {
  if (res < kMinGridRes) throw std::invalid_argument("sdf: grid resolution must be >= 8");
  GridSamples g;
  g.lattice = Lattice{res, bound};
  const std::size_t n = g.lattice.vertex_count();
  g.sdf.resize(n);
  g.color.resize(n);
  g.normal.resize(n);

  tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n, 4096), [&](const tbb::blocked_range<std::size_t>& r) {
    for (std::size_t v = r.begin(); v != r.end(); ++v) {
      const FieldSample s = field.eval(g.lattice.position(v));
      g.sdf[v] = s.distance;
      g.color[v] = s.color;
      g.normal[v] = s.normal;
    }
  });

  for (std::size_t v = 0; v < n; ++v) {
    if (!std::isfinite(g.sdf[v])) {
      const Vec3 p = g.lattice.position(v);
      std::ostringstream msg;
      msg << "sdf: non-finite field value at vertex " << v << " (" << p.x() << ", " << p.y() << ", " << p.z() << ")";
      throw std::runtime_error(msg.str());
    }
  }
  return g;
}

void write_grid_dump(const std::filesystem::path& path, const GridSamples& grid) {
  std::string bytes;
  const auto put = [&](const void* p, std::size_t n) { bytes.append(static_cast<const char*>(p), n); };
  const std::int32_t res = grid.lattice.res;
  const double bound = grid.lattice.bound;
  put(&res, sizeof res);
  put(&bound, sizeof bound);
  for (double v : grid.sdf) {
    const auto f = static_cast<float>(v);
    put(&f, sizeof f);
  }
  write_file_atomic(path, bytes);
}

}  // namespace pforge::sdf
