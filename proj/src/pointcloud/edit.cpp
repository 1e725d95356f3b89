#include "pforge/pointcloud/edit.h"

#include <stdexcept>
#include <string>
#include <unordered_set>

namespace pforge {

using nlohmann::json;

namespace {

Vec3 vec_from_json(const json& j, const char* what) {
  if (j.is_number()) {
    const double v = j.get<double>();
    return Vec3(v, v, v);
  }
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument(std::string("edit: '") + what + "' must be [x,y,z]");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json vec_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

EditKind kind_from_string(const std::string& s) {
  if (s == "delete") return EditKind::Delete;
  if (s == "duplicate") return EditKind::Duplicate;
  if (s == "translate") return EditKind::Translate;
  if (s == "stretch") return EditKind::Stretch;
  if (s == "recolor") return EditKind::Recolor;
  throw std::invalid_argument("edit: unknown op '" + s + "'");
}

Selection selection_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "all") return SelectAll{};
    throw std::invalid_argument("edit: unknown selection '" + j.get<std::string>() + "'");
  }
  if (!j.is_object() || j.size() != 1) throw std::invalid_argument("edit: selection must be \"all\", {sphere} or {indices}");
  if (j.contains("sphere")) {
    const json& s = j.at("sphere");
    for (const auto& [key, _] : s.items())
      if (key != "center" && key != "radius") throw std::invalid_argument("edit: unknown sphere key '" + key + "'");
    return SelectSphere{vec_from_json(s.at("center"), "center"), s.at("radius").get<double>()};
  }
  if (j.contains("indices")) return SelectIndices{j.at("indices").get<std::vector<std::size_t>>()};
  throw std::invalid_argument("edit: unknown selection kind");
}

json selection_to_json(const Selection& sel) {
  if (std::holds_alternative<SelectAll>(sel)) return "all";
  if (const auto* s = std::get_if<SelectSphere>(&sel))
    return {{"sphere", {{"center", vec_to_json(s->center)}, {"radius", s->radius}}}};
  return {{"indices", std::get<SelectIndices>(sel).indices}};
}

}  // namespace

const char* to_string(EditKind kind) {
  switch (kind) {
    case EditKind::Delete: return "delete";
    case EditKind::Duplicate: return "duplicate";
    case EditKind::Translate: return "translate";
    case EditKind::Stretch: return "stretch";
    case EditKind::Recolor: return "recolor";
  }
  return "delete";
}

void EditOp::validate() const {
  if (const auto* s = std::get_if<SelectSphere>(&selection)) {
    if (!(s->radius > 0.0)) throw std::invalid_argument("edit: selection radius must be positive");
    if (!s->center.allFinite()) throw std::invalid_argument("edit: non-finite selection center");
  }
  if (!offset.allFinite() || !pivot.allFinite() || !scale.allFinite())
    throw std::invalid_argument("edit: non-finite parameters");
  if ((scale.array() == 0.0).any()) throw std::invalid_argument("edit: scale factors must be nonzero");
  if ((color.array() < 0.0).any() || (color.array() > 1.0).any())
    throw std::invalid_argument("edit: color outside [0,1]");
}

std::vector<std::size_t> resolve_selection(const PointCloud& pc, const Selection& sel) {
  std::vector<std::size_t> out;
  if (std::holds_alternative<SelectAll>(sel)) {
    out.resize(pc.size());
    for (std::size_t i = 0; i < pc.size(); ++i) out[i] = i;
  } else if (const auto* s = std::get_if<SelectSphere>(&sel)) {
    const double r2 = s->radius * s->radius;
    for (std::size_t i = 0; i < pc.size(); ++i)
      if ((pc.positions[i] - s->center).squaredNorm() <= r2) out.push_back(i);
  } else {
    std::unordered_set<std::size_t> seen;
    for (std::size_t i : std::get<SelectIndices>(sel).indices) {
      if (i >= pc.size())
        throw std::out_of_range("edit: index " + std::to_string(i) + " out of range for " +
                                std::to_string(pc.size()) + " points");
      if (seen.insert(i).second) out.push_back(i);
    }
  }
  return out;
}

EditResult apply_edit(const PointCloud& pc, const EditOp& op) {
  op.validate();
  const std::vector<std::size_t> sel = resolve_selection(pc, op.selection);
  EditResult result{pc, sel.size()};
  PointCloud& out = result.cloud;

  if (op.kind == EditKind::Delete) {
    if (sel.empty()) return result;
    std::vector<std::uint8_t> remove(pc.size(), 0);
    for (std::size_t i : sel) remove[i] = 1;
    PointCloud kept;
    for (std::size_t i = 0; i < pc.size(); ++i) {
      if (remove[i]) continue;
      kept.positions.push_back(pc.positions[i]);
      kept.colors.push_back(pc.colors[i]);
      if (pc.has_normals()) kept.normals.push_back(pc.normals[i]);
      if (!pc.stale_normals.empty()) kept.stale_normals.push_back(pc.stale_normals[i]);
    }
    out = std::move(kept);
    return result;
  }

  if (sel.empty()) throw std::invalid_argument(std::string("edit: empty selection for ") + to_string(op.kind));

  const Vec3 scale = op.kind == EditKind::Translate ? Vec3::Ones() : op.scale;
  const Vec3 pivot = op.kind == EditKind::Translate ? Vec3::Zero() : op.pivot;
  const Vec3 offset = op.kind == EditKind::Stretch ? Vec3::Zero() : op.offset;
  const auto move = [&](const Vec3& p) -> Vec3 { return pivot + scale.cwiseProduct(p - pivot) + offset; };
  const auto move_normal = [&](const Vec3& n) -> Vec3 { return n.cwiseQuotient(scale).normalized(); };

  if (op.kind == EditKind::Recolor) {
    for (std::size_t i : sel) out.colors[i] = op.color;
    return result;
  }

  if (pc.has_normals() && out.stale_normals.empty()) out.stale_normals.assign(pc.size(), 0);

  if (op.kind == EditKind::Duplicate) {
    for (std::size_t i : sel) {
      out.positions.push_back(move(pc.positions[i]));
      out.colors.push_back(pc.colors[i]);
      if (pc.has_normals()) {
        out.normals.push_back(move_normal(pc.normals[i]));
        out.stale_normals.push_back(1);
      }
    }
    return result;
  }

  for (std::size_t i : sel) {
    out.positions[i] = move(pc.positions[i]);
    if (pc.has_normals()) {
      out.normals[i] = move_normal(pc.normals[i]);
      out.stale_normals[i] = 1;
    }
  }
  return result;
}

EditResult apply_edits(const PointCloud& pc, std::span<const EditOp> ops) {
  EditResult acc{pc, 0};
  for (const EditOp& op : ops) {
    EditResult r = apply_edit(acc.cloud, op);
    acc.cloud = std::move(r.cloud);
    acc.changed += r.changed;
  }
  return acc;
}

EditOp edit_op_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("edit: op must be an object");
  EditOp op;
  bool have_kind = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "op") {
      op.kind = kind_from_string(value.get<std::string>());
      have_kind = true;
    } else if (key == "select") {
      op.selection = selection_from_json(value);
    } else if (key == "offset") {
      op.offset = vec_from_json(value, "offset");
    } else if (key == "scale") {
      op.scale = vec_from_json(value, "scale");
    } else if (key == "pivot") {
      op.pivot = vec_from_json(value, "pivot");
    } else if (key == "color") {
      op.color = vec_from_json(value, "color");
    } else {
      throw std::invalid_argument("edit: unknown key '" + key + "'");
    }
  }
  if (!have_kind) throw std::invalid_argument("edit: missing 'op'");
  op.validate();
  return op;
}

std::vector<EditOp> edit_ops_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("edit: expected a JSON array of ops");
  std::vector<EditOp> ops;
  for (const json& e : j) ops.push_back(edit_op_from_json(e));
  return ops;
}

json to_json(const EditOp& op) {
  json j = {{"op", to_string(op.kind)}, {"select", selection_to_json(op.selection)}};
  switch (op.kind) {
    case EditKind::Delete: break;
    case EditKind::Translate: j["offset"] = vec_to_json(op.offset); break;
    case EditKind::Stretch:
      j["scale"] = vec_to_json(op.scale);
      j["pivot"] = vec_to_json(op.pivot);
      break;
    case EditKind::Duplicate:
      j["offset"] = vec_to_json(op.offset);
      j["scale"] = vec_to_json(op.scale);
      j["pivot"] = vec_to_json(op.pivot);
      break;
    case EditKind::Recolor: j["color"] = vec_to_json(op.color); break;
  }
  return j;
}

}  // namespace pforge
