#pragma once

#include <string>

#include "pforge/render/image.h"

namespace pforge::render {

/// 8-bit RGB PNG of an image already in display space ([0,1], sRGB encoded).
std::string encode_png(const Image& display);
Image decode_png(const std::string& bytes);
void save_png(const std::string& path, const Image& display);

}  // namespace pforge::render
