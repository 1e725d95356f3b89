#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "pforge/app/config.h"
#include "pforge/isosurface/tri_mesh.h"
#include "pforge/pointcloud/edit.h"
#include "pforge/render/image.h"

namespace pforge::service {

inline constexpr std::size_t kHistoryLimit = 64;

/// Failure carrying the HTTP status the server should answer with.
class SessionError : public std::runtime_error {
 public:
  SessionError(int status, const std::string& what, std::optional<std::size_t> position = std::nullopt)
      : std::runtime_error(what), status_(status), position_(position) {}
  int status() const { return status_; }
  std::optional<std::size_t> position() const { return position_; }

 private:
  int status_;
  std::optional<std::size_t> position_;
};

struct MeshEntry {
  TriMesh mesh;
  std::string obj;
  int resolution = 0;
  std::uint64_t revision = 0;
  double build_ms = 0.0;
};

/// Immutable view of the document. `cloud` is null before the first upload.
struct Snapshot {
  std::uint64_t revision = 0;
  std::shared_ptr<const PointCloud> cloud;
  std::shared_ptr<const MeshEntry> mesh;  // built from this revision, or null
  std::size_t undo_depth = 0;
  std::size_t redo_depth = 0;
};

struct MeshReply {
  std::shared_ptr<const MeshEntry> entry;
  bool cache_hit = false;
};

struct SessionOptions {
  app::ReconstructParams reconstruct;  // resolution defaults to 64 here
  app::RenderConfig render;
  render::Image env;  // empty means the fixture sun-and-sky map
  std::uint64_t seed = 0;
  std::size_t history_limit = kHistoryLimit;

  SessionOptions();
};

/// One editable document with bounded undo/redo. Mutations are serialized
/// by a writer lock; every mutation publishes a new immutable Snapshot, and
/// readers only ever see whole snapshots.
class Session {
 public:
  explicit Session(SessionOptions options = {});

  std::shared_ptr<const Snapshot> snapshot() const;

  /// Replaces the cloud from PLY bytes. 400 on parse failure.
  std::shared_ptr<const Snapshot> upload(const std::string& ply_bytes);
  /// Applies ops in order as one history step. 409 without a cloud or on a
  /// stale expected revision; 400 on invalid ops.
  std::pair<std::shared_ptr<const Snapshot>, std::size_t> edit(const std::vector<EditOp>& ops,
                                                               std::optional<std::uint64_t> expected_revision = {});
  std::shared_ptr<const Snapshot> undo();  // 409 when there is nothing to undo
  std::shared_ptr<const Snapshot> redo();

  /// Reconstructs the current cloud (or returns the cached mesh for the same
  /// revision and resolution). 409 without a non-empty cloud, 422 when the
  /// reconstruction fails or is empty.
  MeshReply build_mesh(std::optional<int> resolution = {});
  /// PNG of the cached mesh from an orbit camera. 409 without a mesh.
  std::string render_png(double azimuth_deg, double elevation_deg, int size) const;

  const SessionOptions& options() const { return options_; }

 private:
  void publish(std::shared_ptr<const PointCloud> cloud, std::shared_ptr<const MeshEntry> mesh);
  void push_history(std::deque<std::shared_ptr<const PointCloud>>& stack, std::shared_ptr<const PointCloud> c);

  SessionOptions options_;
  std::mutex write_mu_;
  mutable std::mutex snap_mu_;
  std::shared_ptr<const Snapshot> snap_;
  std::deque<std::shared_ptr<const PointCloud>> undo_, redo_;
};

/// {"revision", "n", "bbox": {"min","max"} | null, "has_mesh", "undo_depth", "redo_depth"}
nlohmann::json summary_json(const Snapshot& s);

}  // namespace pforge::service
