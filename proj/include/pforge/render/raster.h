#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "pforge/isosurface/tri_mesh.h"
#include "pforge/render/camera.h"

namespace pforge::render {

/// Per-pixel surface attributes, row-major with row 0 at the top. Depth is
/// linear view-space depth and +inf on background pixels.
struct GBuffer {
  int width = 0;
  int height = 0;
  std::vector<double> depth;
  std::vector<Vec3> position;
  std::vector<Vec3> normal;      // interpolated, facing the viewer
  std::vector<Vec3> geo_normal;  // face normal, facing the viewer
  std::vector<Vec3> albedo;
  std::vector<std::uint8_t> mask;
  std::vector<std::int32_t> triangle;  // -1 on background

  GBuffer() = default;
  GBuffer(int w, int h);

  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
  std::size_t pixel_count() const { return mask.size(); }
  std::size_t covered() const;
};

/// Z-buffered rasterization with pixel-center sampling, a top-left fill
/// rule on shared edges, perspective-correct interpolation and no backface
/// culling. Triangles crossing the near plane are skipped. Missing vertex
/// colors read as white; missing normals fall back to the face normal.
GBuffer rasterize(const TriMesh& mesh, const Camera& cam);

}  // namespace pforge::render
