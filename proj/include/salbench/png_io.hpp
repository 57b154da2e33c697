#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace salbench {

struct Gray8Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels; // row-major
};

// Minimal PNG support for 8-bit grayscale images, backed by zlib. The
// reader handles non-interlaced gray8 files with any scanline filters.
void write_gray8_png(const std::string& path, const Gray8Image& image);
Gray8Image read_gray8_png(const std::string& path);

} // namespace salbench
