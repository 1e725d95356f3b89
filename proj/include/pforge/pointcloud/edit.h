#pragma once

#include <span>
#include <variant>
#include <vector>

#include "json.hpp"

#include "pforge/pointcloud/point_cloud.h"

namespace pforge {

struct SelectAll {
  friend bool operator==(const SelectAll&, const SelectAll&) = default;
};
struct SelectSphere {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  friend bool operator==(const SelectSphere&, const SelectSphere&) = default;
};
struct SelectIndices {
  std::vector<std::size_t> indices;
  friend bool operator==(const SelectIndices&, const SelectIndices&) = default;
};
using Selection = std::variant<SelectAll, SelectSphere, SelectIndices>;

enum class EditKind { Delete, Duplicate, Translate, Stretch, Recolor };

/// One point-cloud edit. Moving ops map a selected point p to
/// pivot + scale * (p - pivot) + offset (componentwise scale); translate
/// uses only `offset`, stretch only `scale`/`pivot`, duplicate all three.
struct EditOp {
  EditKind kind = EditKind::Delete;
  Selection selection = SelectAll{};
  Vec3 offset = Vec3::Zero();
  Vec3 scale = Vec3::Ones();
  Vec3 pivot = Vec3::Zero();
  Vec3 color = Vec3::Ones();

  void validate() const;
  friend bool operator==(const EditOp&, const EditOp&) = default;
};

struct EditResult {
  PointCloud cloud;
  std::size_t changed = 0;  // points removed, added, moved or recolored
};

/// Selected indices in deterministic order: ascending for sphere/all,
/// first-occurrence order for explicit index sets. Throws std::out_of_range
/// for indices past the end.
std::vector<std::size_t> resolve_selection(const PointCloud& pc, const Selection& sel);

/// Applies one edit. Points outside the selection are copied bit-exactly.
/// Normals of moved or duplicated points are carried along (with the
/// inverse-transpose for stretches) and flagged stale.
EditResult apply_edit(const PointCloud& pc, const EditOp& op);
EditResult apply_edits(const PointCloud& pc, std::span<const EditOp> ops);

EditOp edit_op_from_json(const nlohmann::json& j);
std::vector<EditOp> edit_ops_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EditOp& op);

const char* to_string(EditKind kind);

}  // namespace pforge
