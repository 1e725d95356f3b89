#include "pforge/isosurface/mesh_io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "pforge/common/fileio.h"

namespace pforge {

namespace {

void append_number(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

template <typename T>
void append_binary(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

std::string_view next_token(std::string_view& line) {
  std::size_t b = 0;
  while (b < line.size() && (line[b] == ' ' || line[b] == '\t')) ++b;
  std::size_t e = b;
  while (e < line.size() && line[e] != ' ' && line[e] != '\t') ++e;
  const std::string_view tok = line.substr(b, e - b);
  line.remove_prefix(e);
  return tok;
}

double parse_double(std::string_view tok, std::size_t line_no) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw std::runtime_error("obj: malformed number on line " + std::to_string(line_no));
  return v;
}

long parse_index(std::string_view tok, std::size_t line_no) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || v == 0)
    throw std::runtime_error("obj: malformed face index on line " + std::to_string(line_no));
  return v;
}

}  // namespace

std::string write_obj(const TriMesh& mesh) {
  mesh.validate();
  std::string out = "# pforge mesh\n";
  const bool colors = mesh.colors.size() == mesh.vertex_count();
  const bool normals = mesh.normals.size() == mesh.vertex_count();
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    out += "v";
    for (int k = 0; k < 3; ++k) {
      out += ' ';
      append_number(out, mesh.positions[v][k]);
    }
    if (colors)
      for (int k = 0; k < 3; ++k) {
        out += ' ';
        append_number(out, mesh.colors[v][k]);
      }
    out += '\n';
  }
  if (normals)
    for (const Vec3& n : mesh.normals) {
      out += "vn";
      for (int k = 0; k < 3; ++k) {
        out += ' ';
        append_number(out, n[k]);
      }
      out += '\n';
    }
  for (const Triangle& t : mesh.indices) {
    out += 'f';
    for (std::uint32_t v : t) {
      const std::string idx = std::to_string(v + 1);
      out += ' ';
      out += idx;
      if (normals) {
        out += "//";
        out += idx;
      }
    }
    out += '\n';
  }
  return out;
}

TriMesh read_obj(std::string_view text) {
  TriMesh mesh;
  std::vector<Vec3> vn;
  std::vector<long> vertex_normal;  // index into vn per vertex, -1 if unknown
  bool any_color = false;
  std::size_t line_no = 0;

  while (!text.empty()) {
    ++line_no;
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    const std::string_view key = next_token(line);
    if (key == "v") {
      std::vector<double> vals;
      for (std::string_view tok = next_token(line); !tok.empty(); tok = next_token(line))
        vals.push_back(parse_double(tok, line_no));
      if (vals.size() < 3) throw std::runtime_error("obj: vertex with fewer than 3 coordinates on line " + std::to_string(line_no));
      mesh.positions.emplace_back(vals[0], vals[1], vals[2]);
      if (vals.size() >= 6) {
        mesh.colors.emplace_back(vals[3], vals[4], vals[5]);
        any_color = true;
      } else {
        mesh.colors.push_back(Vec3::Ones());
      }
      vertex_normal.push_back(-1);
    } else if (key == "vn") {
      Vec3 n;
      for (int k = 0; k < 3; ++k) n[k] = parse_double(next_token(line), line_no);
      vn.push_back(n);
    } else if (key == "f") {
      std::vector<std::uint32_t> poly;
      for (std::string_view tok = next_token(line); !tok.empty(); tok = next_token(line)) {
        const std::size_t s1 = tok.find('/');
        long vi = parse_index(tok.substr(0, s1), line_no);
        if (vi < 0) vi += static_cast<long>(mesh.positions.size()) + 1;
        if (vi < 1 || vi > static_cast<long>(mesh.positions.size()))
          throw std::runtime_error("obj: face index out of range on line " + std::to_string(line_no));
        const auto v = static_cast<std::uint32_t>(vi - 1);
        if (s1 != std::string_view::npos) {
          const std::size_t s2 = tok.find('/', s1 + 1);
          if (s2 != std::string_view::npos && s2 + 1 < tok.size()) {
            long ni = parse_index(tok.substr(s2 + 1), line_no);
            if (ni < 0) ni += static_cast<long>(vn.size()) + 1;
            if (ni >= 1 && ni <= static_cast<long>(vn.size())) vertex_normal[v] = ni - 1;
          }
        }
        poly.push_back(v);
      }
      if (poly.size() < 3) throw std::runtime_error("obj: face with fewer than 3 vertices on line " + std::to_string(line_no));
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) mesh.indices.push_back({poly[0], poly[k], poly[k + 1]});
    }
  }

  if (!any_color) mesh.colors.assign(mesh.positions.size(), Vec3::Ones());
  const std::vector<Vec3> geometric = area_weighted_normals(mesh);
  mesh.normals.resize(mesh.positions.size());
  for (std::size_t v = 0; v < mesh.positions.size(); ++v) {
    if (vertex_normal[v] >= 0) {
      const Vec3 n = vn[static_cast<std::size_t>(vertex_normal[v])];
      mesh.normals[v] = n.norm() > 0.0 ? Vec3(n.normalized()) : geometric[v];
    } else {
      mesh.normals[v] = geometric[v];
    }
  }
  mesh.validate();
  return mesh;
}

std::string write_mesh_ply(const TriMesh& mesh) {
  mesh.validate();
  std::string out;
  out += "ply\nformat binary_little_endian 1.0\n";
  out += "element vertex " + std::to_string(mesh.vertex_count()) + "\n";
  out += "property float x\nproperty float y\nproperty float z\n";
  out += "property float nx\nproperty float ny\nproperty float nz\n";
  out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out += "element face " + std::to_string(mesh.face_count()) + "\n";
  out += "property list uchar int vertex_indices\nend_header\n";
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    for (int k = 0; k < 3; ++k) append_binary(out, static_cast<float>(mesh.positions[v][k]));
    const Vec3 n = v < mesh.normals.size() ? mesh.normals[v] : Vec3::UnitZ();
    for (int k = 0; k < 3; ++k) append_binary(out, static_cast<float>(n[k]));
    const Vec3 c = v < mesh.colors.size() ? mesh.colors[v] : Vec3::Ones();
    for (int k = 0; k < 3; ++k)
      append_binary(out, static_cast<std::uint8_t>(std::lround(std::clamp(c[k], 0.0, 1.0) * 255.0)));
  }
  for (const Triangle& t : mesh.indices) {
    append_binary(out, std::uint8_t{3});
    for (std::uint32_t v : t) append_binary(out, static_cast<std::int32_t>(v));
  }
  return out;
}

TriMesh load_obj(const std::filesystem::path& path) { return read_obj(read_file(path)); }

void save_obj(const std::filesystem::path& path, const TriMesh& mesh, bool with_ply_sidecar) {
  write_file_atomic(path, write_obj(mesh));
  if (with_ply_sidecar) {
    std::filesystem::path ply = path;
    ply.replace_extension(".ply");
    write_file_atomic(ply, write_mesh_ply(mesh));
  }
}

}  // namespace pforge
