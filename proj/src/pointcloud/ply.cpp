#include "pforge/pointcloud/ply.h"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <optional>
#include <sstream>
#include <vector>

#include "pforge/common/fileio.h"

namespace pforge {

static_assert(std::endian::native == std::endian::little, "binary PLY I/O assumes a little-endian host");

PlyError::PlyError(const std::string& what, std::size_t position)
    : std::runtime_error("ply: " + what + " at byte " + std::to_string(position)), position_(position) {}

namespace {

enum class ScalarType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::optional<ScalarType> parse_type(std::string_view name) {
  if (name == "char" || name == "int8") return ScalarType::Int8;
  if (name == "uchar" || name == "uint8") return ScalarType::UInt8;
  if (name == "short" || name == "int16") return ScalarType::Int16;
  if (name == "ushort" || name == "uint16") return ScalarType::UInt16;
  if (name == "int" || name == "int32") return ScalarType::Int32;
  if (name == "uint" || name == "uint32") return ScalarType::UInt32;
  if (name == "float" || name == "float32") return ScalarType::Float32;
  if (name == "double" || name == "float64") return ScalarType::Float64;
  return std::nullopt;
}

std::size_t type_size(ScalarType t) {
  switch (t) {
    case ScalarType::Int8:
    case ScalarType::UInt8: return 1;
    case ScalarType::Int16:
    case ScalarType::UInt16: return 2;
    case ScalarType::Int32:
    case ScalarType::UInt32:
    case ScalarType::Float32: return 4;
    case ScalarType::Float64: return 8;
  }
  return 0;
}

double type_max(ScalarType t) {
  switch (t) {
    case ScalarType::Int8: return 127.0;
    case ScalarType::UInt8: return 255.0;
    case ScalarType::Int16: return 32767.0;
    case ScalarType::UInt16: return 65535.0;
    case ScalarType::Int32: return 2147483647.0;
    case ScalarType::UInt32: return 4294967295.0;
    default: return 1.0;
  }
}

bool is_integer(ScalarType t) { return t != ScalarType::Float32 && t != ScalarType::Float64; }

struct Property {
  std::string name;
  ScalarType type = ScalarType::Float32;
  bool is_list = false;
  ScalarType count_type = ScalarType::UInt8;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

template <typename T>
double load_as(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return static_cast<double>(v);
}

double read_binary(ScalarType t, const char* p) {
  switch (t) {
    case ScalarType::Int8: return load_as<std::int8_t>(p);
    case ScalarType::UInt8: return load_as<std::uint8_t>(p);
    case ScalarType::Int16: return load_as<std::int16_t>(p);
    case ScalarType::UInt16: return load_as<std::uint16_t>(p);
    case ScalarType::Int32: return load_as<std::int32_t>(p);
    case ScalarType::UInt32: return load_as<std::uint32_t>(p);
    case ScalarType::Float32: return load_as<float>(p);
    case ScalarType::Float64: return load_as<double>(p);
  }
  return 0.0;
}

// Cursor over the body that yields one scalar at a time in either encoding.
class BodyReader {
 public:
  BodyReader(std::string_view bytes, std::size_t pos, bool ascii) : bytes_(bytes), pos_(pos), ascii_(ascii) {}

  double next(ScalarType t) {
    if (ascii_) return next_ascii();
    const std::size_t n = type_size(t);
    if (pos_ + n > bytes_.size()) throw PlyError("unexpected end of binary data", pos_);
    const double v = read_binary(t, bytes_.data() + pos_);
    pos_ += n;
    return v;
  }

  std::size_t position() const { return pos_; }

 private:
  double next_ascii() {
    while (pos_ < bytes_.size() && std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (pos_ >= bytes_.size()) throw PlyError("unexpected end of ascii data", pos_);
    const char* first = bytes_.data() + pos_;
    const char* last = bytes_.data() + bytes_.size();
    if (*first == '+') ++first;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || (ptr != last && !std::isspace(static_cast<unsigned char>(*ptr))))
      throw PlyError("malformed number", pos_);
    pos_ = static_cast<std::size_t>(ptr - bytes_.data());
    return v;
  }

  std::string_view bytes_;
  std::size_t pos_;
  bool ascii_;
};

void append_number(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

std::uint8_t quantize(double c) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0));
}

template <typename T>
void append_binary(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

}  // namespace

std::string write_ply(const PointCloud& pc, PlyFormat format) {
  pc.validate();
  const bool normals = pc.has_normals();
  std::string out;
  out += "ply\n";
  out += format == PlyFormat::Ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n";
  out += "element vertex " + std::to_string(pc.size()) + "\n";
  out += "property double x\nproperty double y\nproperty double z\n";
  out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  if (normals) out += "property double nx\nproperty double ny\nproperty double nz\n";
  out += "end_header\n";

  for (std::size_t i = 0; i < pc.size(); ++i) {
    const Vec3& p = pc.positions[i];
    const Vec3& c = pc.colors[i];
    if (format == PlyFormat::Ascii) {
      for (int k = 0; k < 3; ++k) {
        append_number(out, p[k]);
        out += ' ';
      }
      for (int k = 0; k < 3; ++k) {
        out += std::to_string(quantize(c[k]));
        if (k < 2 || normals) out += ' ';
      }
      if (normals)
        for (int k = 0; k < 3; ++k) {
          append_number(out, pc.normals[i][k]);
          if (k < 2) out += ' ';
        }
      out += '\n';
    } else {
      for (int k = 0; k < 3; ++k) append_binary(out, p[k]);
      for (int k = 0; k < 3; ++k) append_binary(out, quantize(c[k]));
      if (normals)
        for (int k = 0; k < 3; ++k) append_binary(out, pc.normals[i][k]);
    }
  }
  return out;
}

PointCloud read_ply(std::string_view bytes) {
  std::size_t pos = 0;
  auto next_line = [&]() -> std::string_view {
    const std::size_t eol = bytes.find('\n', pos);
    if (eol == std::string_view::npos) throw PlyError("unterminated header", pos);
    std::string_view line = bytes.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol + 1;
    return line;
  };

  if (next_line() != "ply") throw PlyError("missing 'ply' magic", 0);

  bool ascii = false;
  bool have_format = false;
  std::vector<Element> elements;
  for (;;) {
    const std::size_t line_start = pos;
    const std::string line(next_line());
    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    if (keyword == "end_header") break;
    if (keyword.empty() || keyword == "comment" || keyword == "obj_info") continue;
    if (keyword == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (fmt == "ascii") {
        ascii = true;
      } else if (fmt == "binary_little_endian") {
        ascii = false;
      } else {
        throw PlyError("unsupported format '" + fmt + "'", line_start);
      }
      have_format = true;
    } else if (keyword == "element") {
      Element e;
      long long count = -1;
      ls >> e.name >> count;
      if (e.name.empty() || count < 0) throw PlyError("malformed element line", line_start);
      e.count = static_cast<std::size_t>(count);
      elements.push_back(std::move(e));
    } else if (keyword == "property") {
      if (elements.empty()) throw PlyError("property before element", line_start);
      Property prop;
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string count_type, item_type;
        ls >> count_type >> item_type >> prop.name;
        const auto ct = parse_type(count_type);
        const auto it = parse_type(item_type);
        if (!ct || !it || !is_integer(*ct)) throw PlyError("bad list property types", line_start);
        prop.is_list = true;
        prop.count_type = *ct;
        prop.type = *it;
      } else {
        const auto t = parse_type(type);
        if (!t) throw PlyError("unknown property type '" + type + "'", line_start);
        prop.type = *t;
        ls >> prop.name;
      }
      if (prop.name.empty()) throw PlyError("property without a name", line_start);
      elements.back().properties.push_back(prop);
    } else {
      throw PlyError("unknown header keyword '" + keyword + "'", line_start);
    }
  }
  if (!have_format) throw PlyError("missing format line", pos);

  PointCloud pc;
  bool found_vertex = false;
  BodyReader reader(bytes, pos, ascii);
  for (const Element& e : elements) {
    if (e.name != "vertex") {
      for (std::size_t i = 0; i < e.count; ++i)
        for (const Property& p : e.properties) {
          if (p.is_list) {
            const double n = reader.next(p.count_type);
            for (long k = 0; k < static_cast<long>(n); ++k) reader.next(p.type);
          } else {
            reader.next(p.type);
          }
        }
      continue;
    }
    found_vertex = true;
    int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1, inx = -1, iny = -1, inz = -1;
    for (std::size_t k = 0; k < e.properties.size(); ++k) {
      const std::string& n = e.properties[k].name;
      const int idx = static_cast<int>(k);
      if (n == "x") ix = idx;
      else if (n == "y") iy = idx;
      else if (n == "z") iz = idx;
      else if (n == "red" || n == "r") ir = idx;
      else if (n == "green" || n == "g") ig = idx;
      else if (n == "blue" || n == "b") ib = idx;
      else if (n == "nx") inx = idx;
      else if (n == "ny") iny = idx;
      else if (n == "nz") inz = idx;
    }
    if (ix < 0 || iy < 0 || iz < 0) throw PlyError("vertex element lacks x/y/z", pos);
    const bool has_color = ir >= 0 && ig >= 0 && ib >= 0;
    const bool has_normals = inx >= 0 && iny >= 0 && inz >= 0;

    std::vector<double> values(e.properties.size());
    pc.positions.reserve(e.count);
    pc.colors.reserve(e.count);
    for (std::size_t i = 0; i < e.count; ++i) {
      const std::size_t record_start = reader.position();
      for (std::size_t k = 0; k < e.properties.size(); ++k) {
        const Property& p = e.properties[k];
        if (p.is_list) {
          const double n = reader.next(p.count_type);
          for (long j = 0; j < static_cast<long>(n); ++j) reader.next(p.type);
          values[k] = 0.0;
        } else {
          values[k] = reader.next(p.type);
        }
      }
      const Vec3 position(values[ix], values[iy], values[iz]);
      if (!position.allFinite()) throw PlyError("non-finite vertex position", record_start);
      pc.positions.push_back(position);
      if (has_color) {
        Vec3 c(values[ir], values[ig], values[ib]);
        if (is_integer(e.properties[ir].type)) c /= type_max(e.properties[ir].type);
        pc.colors.push_back(c.cwiseMax(0.0).cwiseMin(1.0));
      } else {
        pc.colors.push_back(Vec3::Ones());
      }
      if (has_normals) {
        Vec3 n(values[inx], values[iny], values[inz]);
        const double len = n.norm();
        if (!(len > 0.0) || !std::isfinite(len)) throw PlyError("zero or non-finite normal", record_start);
        if (std::abs(len - 1.0) > 1e-9) n /= len;
        pc.normals.push_back(n);
      }
    }
    break;
  }
  if (!found_vertex) throw PlyError("no vertex element", pos);
  return pc;
}

PointCloud load_ply(const std::filesystem::path& path) { return read_ply(read_file(path)); }

void save_ply(const std::filesystem::path& path, const PointCloud& pc, PlyFormat format) {
  write_file_atomic(path, write_ply(pc, format));
}

}  // namespace pforge
