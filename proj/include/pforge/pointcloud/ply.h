#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pforge/pointcloud/point_cloud.h"

namespace pforge {

enum class PlyFormat { Ascii, BinaryLittleEndian };

/// Parse failure with the byte offset where it was detected.
class PlyError : public std::runtime_error {
 public:
  PlyError(const std::string& what, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Vertex properties written: x,y,z (double), red,green,blue (uchar), and
/// nx,ny,nz (double) when the cloud has normals.
std::string write_ply(const PointCloud& pc, PlyFormat format = PlyFormat::BinaryLittleEndian);

/// Reads the `vertex` element of an ASCII or binary little-endian PLY.
/// Integer colors are divided by their type's maximum; float colors are
/// taken as-is. Other elements are skipped.
PointCloud read_ply(std::string_view bytes);

PointCloud load_ply(const std::filesystem::path& path);
void save_ply(const std::filesystem::path& path, const PointCloud& pc,
              PlyFormat format = PlyFormat::BinaryLittleEndian);

}  // namespace pforge
