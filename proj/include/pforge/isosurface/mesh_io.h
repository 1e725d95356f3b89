#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "pforge/isosurface/tri_mesh.h"

namespace pforge {

/// OBJ with per-vertex colors as `v x y z r g b`, `vn` normals and
/// `f a//a b//b c//c` faces (1-based).
std::string write_obj(const TriMesh& mesh);

/// Accepts v (with optional colors), vn, and f in any of the v, v/vt,
/// v//vn, v/vt/vn forms; polygons are fan-triangulated. Normals are
/// matched per vertex when faces reference them, otherwise recomputed.
TriMesh read_obj(std::string_view text);

/// Binary little-endian PLY with vertex (xyz, normal, uchar rgb) and face lists.
std::string write_mesh_ply(const TriMesh& mesh);

TriMesh load_obj(const std::filesystem::path& path);
/// Writes `path` and a sidecar `path` with extension .ply.
void save_obj(const std::filesystem::path& path, const TriMesh& mesh, bool with_ply_sidecar = true);

}  // namespace pforge
