#include "pforge/service/session.h"

#include <chrono>
#include <cmath>
#include <numbers>

#include "pforge/app/fixtures.h"
#include "pforge/app/pipeline.h"
#include "pforge/isosurface/mesh_io.h"
#include "pforge/pointcloud/ply.h"
#include "pforge/render/envmap.h"
#include "pforge/render/image_io.h"
#include "pforge/render/raster.h"
#include "pforge/render/shade.h"

namespace pforge::service {

SessionOptions::SessionOptions() { reconstruct.resolution = 64; }

Session::Session(SessionOptions options) : options_(std::move(options)) {
  options_.reconstruct.validate();
  if (options_.history_limit == 0) throw std::invalid_argument("service: history limit must be positive");
  if (options_.env.size() == 0) options_.env = app::fixture_env();
  snap_ = std::make_shared<const Snapshot>();
}

std::shared_ptr<const Snapshot> Session::snapshot() const {
  std::lock_guard lock(snap_mu_);
  return snap_;
}

void Session::publish(std::shared_ptr<const PointCloud> cloud, std::shared_ptr<const MeshEntry> mesh) {
  auto next = std::make_shared<Snapshot>();
  next->revision = snapshot()->revision + 1;
  next->cloud = std::move(cloud);
  next->mesh = std::move(mesh);
  next->undo_depth = undo_.size();
  next->redo_depth = redo_.size();
  std::lock_guard lock(snap_mu_);
  snap_ = std::move(next);
}

void Session::push_history(std::deque<std::shared_ptr<const PointCloud>>& stack, std::shared_ptr<const PointCloud> c) {
  stack.push_back(std::move(c));
  while (stack.size() > options_.history_limit) stack.pop_front();
}

std::shared_ptr<const Snapshot> Session::upload(const std::string& ply_bytes) {
  PointCloud pc;
  try {
    pc = read_ply(ply_bytes);
    pc.validate();
  } catch (const PlyError& e) {
    throw SessionError(400, e.what(), e.position());
  } catch (const std::exception& e) {
    throw SessionError(400, e.what());
  }
  std::lock_guard lock(write_mu_);
  push_history(undo_, snapshot()->cloud);
  redo_.clear();
  publish(std::make_shared<const PointCloud>(std::move(pc)), nullptr);
  return snapshot();
}

std::pair<std::shared_ptr<const Snapshot>, std::size_t> Session::edit(const std::vector<EditOp>& ops,
                                                                      std::optional<std::uint64_t> expected_revision) {
  std::lock_guard lock(write_mu_);
  const auto cur = snapshot();
  if (!cur->cloud) throw SessionError(409, "edit: no point cloud loaded");
  if (expected_revision && *expected_revision != cur->revision)
    throw SessionError(409, "edit: stale revision " + std::to_string(*expected_revision) + ", current is " +
                                std::to_string(cur->revision));
  EditResult r;
  try {
    r = apply_edits(*cur->cloud, ops);
  } catch (const std::exception& e) {
    throw SessionError(400, e.what());
  }
  push_history(undo_, cur->cloud);
  redo_.clear();
  publish(std::make_shared<const PointCloud>(std::move(r.cloud)), nullptr);
  return {snapshot(), r.changed};
}

std::shared_ptr<const Snapshot> Session::undo() {
  std::lock_guard lock(write_mu_);
  if (undo_.empty()) throw SessionError(409, "undo: history is empty");
  auto prev = undo_.back();
  undo_.pop_back();
  push_history(redo_, snapshot()->cloud);
  publish(std::move(prev), nullptr);
  return snapshot();
}

std::shared_ptr<const Snapshot> Session::redo() {
  std::lock_guard lock(write_mu_);
  if (redo_.empty()) throw SessionError(409, "redo: nothing to redo");
  auto next = redo_.back();
  redo_.pop_back();
  push_history(undo_, snapshot()->cloud);
  publish(std::move(next), nullptr);
  return snapshot();
}

MeshReply Session::build_mesh(std::optional<int> resolution) {
  const int res = resolution.value_or(options_.reconstruct.resolution);
  if (res < 8 || res > 256) throw SessionError(400, "mesh: res must be in [8, 256]");
  // Holding the writer lock keeps the cloud fixed while meshing and makes
  // concurrent identical requests share one build.
  std::lock_guard lock(write_mu_);
  const auto cur = snapshot();
  if (!cur->cloud || cur->cloud->empty()) throw SessionError(409, "mesh: no point cloud loaded");
  if (cur->mesh && cur->mesh->resolution == res) return {cur->mesh, true};

  app::ReconstructParams params = options_.reconstruct;
  params.resolution = res;
  auto entry = std::make_shared<MeshEntry>();
  const auto t0 = std::chrono::steady_clock::now();
  try {
    entry->mesh = app::reconstruct(*cur->cloud, params).mesh;
  } catch (const std::exception& e) {
    throw SessionError(422, e.what());
  }
  if (entry->mesh.empty()) throw SessionError(422, "isosurface: reconstruction produced no triangles");
  entry->obj = write_obj(entry->mesh);
  entry->build_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  entry->resolution = res;
  entry->revision = cur->revision;

  // Same revision, new mesh: swap the snapshot without touching history.
  auto next = std::make_shared<Snapshot>(*cur);
  next->mesh = entry;
  {
    std::lock_guard slock(snap_mu_);
    snap_ = next;
  }
  return {entry, false};
}

std::string Session::render_png(double azimuth_deg, double elevation_deg, int size) const {
  if (size < 8 || size > 1024) throw SessionError(400, "render: size must be in [8, 1024]");
  if (!std::isfinite(azimuth_deg) || !std::isfinite(elevation_deg)) throw SessionError(400, "render: bad angles");
  const auto snap = snapshot();
  if (!snap->mesh) throw SessionError(409, "render: no mesh; POST /mesh first");
  const TriMesh& mesh = snap->mesh->mesh;
  const BoundingBox bb = bounding_box(mesh.positions);
  const double radius = std::max(0.5 * bb.extent().norm(), 1e-3);
  const double fov = options_.render.fov_deg * std::numbers::pi / 180.0;
  const double dist = 1.15 * radius / std::sin(0.5 * fov);
  render::Camera cam = render::Camera::orbit(azimuth_deg, elevation_deg, dist, bb.center(), fov, size, size);
  const render::GBuffer g = render::rasterize(mesh, cam);
  const render::EnvMap env(options_.env);
  MaterialParams mat{options_.render.metallic, options_.render.roughness};
  const render::ShadeResult r = render::shade(g, env, mat, cam, options_.render.shade_settings(options_.seed));
  return render::encode_png(render::tonemap(r.hdr));
}

nlohmann::json summary_json(const Snapshot& s) {
  nlohmann::json j;
  j["revision"] = s.revision;
  j["n"] = s.cloud ? s.cloud->size() : 0;
  if (s.cloud && !s.cloud->empty()) {
    const BoundingBox bb = bounding_box(s.cloud->positions);
    j["bbox"] = {{"min", {bb.min.x(), bb.min.y(), bb.min.z()}}, {"max", {bb.max.x(), bb.max.y(), bb.max.z()}}};
  } else {
    j["bbox"] = nullptr;
  }
  j["has_cloud"] = static_cast<bool>(s.cloud);
  j["has_mesh"] = static_cast<bool>(s.mesh);
  j["undo_depth"] = s.undo_depth;
  j["redo_depth"] = s.redo_depth;
  return j;
}

}  // namespace pforge::service
