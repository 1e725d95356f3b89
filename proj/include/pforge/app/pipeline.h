#pragma once

#include "pforge/isosurface/marching_tets.h"
#include "pforge/isosurface/tri_mesh.h"
#include "pforge/pointcloud/point_cloud.h"
#include "pforge/sdf/fitted.h"

namespace pforge::app {

struct ReconstructParams {
  int resolution = 96;
  sdf::FitParams fit;

  void validate() const;
};

struct ReconstructResult {
  TriMesh mesh;  // in the input cloud's frame
  iso::WeldReport weld;
  Similarity normalization;
  double fit_ms = 0.0;
  double grid_ms = 0.0;
  double extract_ms = 0.0;
};

/// Point cloud to mesh: normalize to the unit cube, fit the point SDF,
/// sample the lattice, run marching tetrahedra, weld, then map vertices
/// back to the cloud's frame. The lattice shell is forced outside so
/// the result is always closed. Errors carry a stage prefix ("pointcloud:",
/// "sdf:", "isosurface:").
ReconstructResult reconstruct(const PointCloud& pc, const ReconstructParams& params);

}  // namespace pforge::app
