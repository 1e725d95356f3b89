#include "pforge/render/image_io.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

#include <png.h>

#include "pforge/common/fileio.h"

namespace pforge::render {

namespace {

void png_append(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), len);
}

void png_flush_noop(png_structp) {}

struct ReadCursor {
  const std::string* bytes;
  std::size_t pos;
};

void png_consume(png_structp png, png_bytep data, png_size_t len) {
  auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cur->pos + len > cur->bytes->size()) png_error(png, "truncated");
  std::memcpy(data, cur->bytes->data() + cur->pos, len);
  cur->pos += len;
}

}  // namespace

std::string encode_png(const Image& display) {
  if (display.width <= 0 || display.height <= 0) throw std::invalid_argument("png: empty image");
  std::vector<png_byte> rows(static_cast<std::size_t>(display.width) * display.height * 3);
  for (std::size_t i = 0; i < display.size(); ++i) {
    for (int c = 0; c < 3; ++c)
      rows[i * 3 + c] = static_cast<png_byte>(std::lround(std::clamp(display.pixels[i][c], 0.0, 1.0) * 255.0));
  }
  std::vector<png_bytep> ptrs(display.height);
  for (int y = 0; y < display.height; ++y) ptrs[y] = rows.data() + static_cast<std::size_t>(y) * display.width * 3;

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png: init failed");
  png_infop info = png_create_info_struct(png);
  std::string out;
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, info ? &info : nullptr);
    throw std::runtime_error("png: encode failed");
  }
  png_set_write_fn(png, &out, png_append, png_flush_noop);
  png_set_IHDR(png, info, display.width, display.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_sRGB(png, info, PNG_sRGB_INTENT_PERCEPTUAL);
  png_write_info(png, info);
  png_write_image(png, ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

Image decode_png(const std::string& bytes) {
  if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8))
    throw std::runtime_error("png: bad signature");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png: init failed");
  png_infop info = png_create_info_struct(png);
  ReadCursor cur{&bytes, 0};
  Image img;
  std::vector<png_byte> rows;
  std::vector<png_bytep> ptrs;
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    throw std::runtime_error("png: decode failed");
  }
  png_set_read_fn(png, &cur, png_consume);
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);
  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  rows.resize(static_cast<std::size_t>(w) * h * 3);
  ptrs.resize(h);
  for (int y = 0; y < h; ++y) ptrs[y] = rows.data() + static_cast<std::size_t>(y) * w * 3;
  png_read_image(png, ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  img = Image(w, h);
  for (std::size_t i = 0; i < img.size(); ++i)
    img.pixels[i] = Vec3(rows[i * 3], rows[i * 3 + 1], rows[i * 3 + 2]) / 255.0;
  return img;
}

void save_png(const std::string& path, const Image& display) { write_file_atomic(path, encode_png(display)); }

}  // namespace pforge::render
