#include "salbench/png_io.hpp"

#include <zlib.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "salbench/error.hpp"

namespace salbench {

namespace {

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32_be(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::vector<std::uint8_t>& data) {
    put_u32_be(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const uLong crc =
        crc32(0L, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start));
    put_u32_be(out, static_cast<std::uint32_t>(crc));
}

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

} // namespace

void write_gray8_png(const std::string& path, const Gray8Image& image) {
    if (image.width < 1 || image.height < 1 ||
        image.pixels.size() != static_cast<std::size_t>(image.width) * image.height)
        fail(Errc::BadArgument, "invalid image dimensions");

    // Raw scanlines, filter type 0 per row.
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(image.height) * (image.width + 1));
    for (int r = 0; r < image.height; ++r) {
        raw.push_back(0);
        const std::uint8_t* row = image.pixels.data() + static_cast<std::size_t>(r) * image.width;
        raw.insert(raw.end(), row, row + image.width);
    }

    uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> compressed(compressed_size);
    if (compress2(compressed.data(), &compressed_size, raw.data(),
                  static_cast<uLong>(raw.size()), 9) != Z_OK)
        fail(Errc::IoError, "zlib compression failed");
    compressed.resize(compressed_size);

    std::vector<std::uint8_t> out(kPngSignature, kPngSignature + 8);
    std::vector<std::uint8_t> ihdr;
    put_u32_be(ihdr, static_cast<std::uint32_t>(image.width));
    put_u32_be(ihdr, static_cast<std::uint32_t>(image.height));
    ihdr.push_back(8); // bit depth
    ihdr.push_back(0); // grayscale
    ihdr.push_back(0); // compression
    ihdr.push_back(0); // filter
    ihdr.push_back(0); // no interlace
    append_chunk(out, "IHDR", ihdr);
    append_chunk(out, "IDAT", compressed);
    append_chunk(out, "IEND", {});

    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) fail(Errc::IoError, "cannot open " + tmp + " for writing");
        f.write(reinterpret_cast<const char*>(out.data()),
                static_cast<std::streamsize>(out.size()));
        if (!f) fail(Errc::IoError, "short write to " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) fail(Errc::IoError, "cannot rename " + tmp + " to " + path);
}

Gray8Image read_gray8_png(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(Errc::IoError, "cannot open " + path);
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());

    if (data.size() < 8 || std::memcmp(data.data(), kPngSignature, 8) != 0)
        fail(Errc::FormatError, path + ": not a PNG file");

    int width = 0, height = 0;
    bool have_ihdr = false;
    std::vector<std::uint8_t> idat;

    std::size_t pos = 8;
    while (pos + 12 <= data.size()) {
        const std::uint32_t length = get_u32_be(data.data() + pos);
        if (pos + 12 + length > data.size())
            fail(Errc::FormatError, path + ": truncated chunk");
        const char* type = reinterpret_cast<const char*>(data.data() + pos + 4);
        const std::uint8_t* payload = data.data() + pos + 8;

        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (length != 13) fail(Errc::FormatError, path + ": bad IHDR");
            width = static_cast<int>(get_u32_be(payload));
            height = static_cast<int>(get_u32_be(payload + 4));
            const int bit_depth = payload[8], color_type = payload[9];
            const int interlace = payload[12];
            if (bit_depth != 8 || color_type != 0)
                fail(Errc::FormatError, path + ": only 8-bit grayscale PNG is supported");
            if (interlace != 0)
                fail(Errc::FormatError, path + ": interlaced PNG is not supported");
            have_ihdr = true;
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), payload, payload + length);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            break;
        }
        pos += 12 + length;
    }
    if (!have_ihdr || width < 1 || height < 1)
        fail(Errc::FormatError, path + ": missing IHDR");
    if (idat.empty()) fail(Errc::FormatError, path + ": missing IDAT");

    const std::size_t stride = static_cast<std::size_t>(width) + 1;
    std::vector<std::uint8_t> raw(stride * height);
    uLongf raw_size = static_cast<uLongf>(raw.size());
    if (uncompress(raw.data(), &raw_size, idat.data(), static_cast<uLong>(idat.size())) !=
            Z_OK ||
        raw_size != raw.size())
        fail(Errc::FormatError, path + ": corrupt image data");

    Gray8Image image;
    image.width = width;
    image.height = height;
    image.pixels.resize(static_cast<std::size_t>(width) * height);
    for (int r = 0; r < height; ++r) {
        const std::uint8_t filter = raw[static_cast<std::size_t>(r) * stride];
        const std::uint8_t* src = raw.data() + static_cast<std::size_t>(r) * stride + 1;
        std::uint8_t* dst = image.pixels.data() + static_cast<std::size_t>(r) * width;
        const std::uint8_t* above =
            r > 0 ? image.pixels.data() + static_cast<std::size_t>(r - 1) * width : nullptr;
        for (int c = 0; c < width; ++c) {
            const int left = c > 0 ? dst[c - 1] : 0;
            const int up = above ? above[c] : 0;
            const int up_left = (c > 0 && above) ? above[c - 1] : 0;
            int value = src[c];
            switch (filter) {
                case 0: break;
                case 1: value += left; break;
                case 2: value += up; break;
                case 3: value += (left + up) / 2; break;
                case 4: value += paeth(left, up, up_left); break;
                default: fail(Errc::FormatError, path + ": unknown scanline filter");
            }
            dst[c] = static_cast<std::uint8_t>(value & 0xFF);
        }
    }
    return image;
}

} // namespace salbench
