#pragma once

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "brdflab/color.hpp"
#include "brdflab/math.hpp"

namespace brdflab {

/// Three-channel float image, row-major from the top-left corner.
struct Image {
    int width = 0, height = 0;
    std::vector<float> data;  // width*height*3

    Image() = default;
    Image(int w, int h) : width(w), height(h), data(std::size_t(w) * h * 3, 0.0f) {}

    float *pixel(int x, int y) { return data.data() + 3 * (std::size_t(y) * width + x); }
    const float *pixel(int x, int y) const {
        return data.data() + 3 * (std::size_t(y) * width + x);
    }

    RGB rgb(int x, int y) const {
        const float *p = pixel(x, y);
        return {p[0], p[1], p[2]};
    }

    void set(int x, int y, const RGB &c) {
        float *p = pixel(x, y);
        p[0] = float(c.r);
        p[1] = float(c.g);
        p[2] = float(c.b);
    }
};

// ---------------------------------------------------------------------------
// PFM: "PF" (color) / "Pf" (gray) header, width height, scale (sign encodes
// endianness), rows stored bottom-up. Floats are preserved bit-exactly.

inline void write_pfm(const std::string &path, const Image &img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pfm: cannot open " + path);
    out << "PF\n" << img.width << " " << img.height << "\n-1.0\n";
    for (int y = img.height - 1; y >= 0; --y)
        out.write(reinterpret_cast<const char *>(img.pixel(0, y)),
                  std::streamsize(sizeof(float)) * 3 * img.width);
    if (!out) throw std::runtime_error("write_pfm: write failed for " + path);
}

inline Image read_pfm(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_pfm: cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "PF" && magic != "Pf") throw std::runtime_error("read_pfm: not a PFM file");
    int w, h;
    double scale;
    in >> w >> h >> scale;
    in.get();  // single whitespace after the header
    if (w <= 0 || h <= 0) throw std::runtime_error("read_pfm: bad dimensions");

    const int channels = magic == "PF" ? 3 : 1;
    std::vector<float> row(std::size_t(w) * channels);
    Image img(w, h);
    for (int y = h - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char *>(row.data()),
                std::streamsize(sizeof(float)) * row.size());
        if (!in) throw std::runtime_error("read_pfm: truncated file");
        if (scale > 0) {  // big-endian payload
            for (auto &f : row) {
                std::uint32_t u;
                std::memcpy(&u, &f, 4);
                u = __builtin_bswap32(u);
                std::memcpy(&f, &u, 4);
            }
        }
        for (int x = 0; x < w; ++x) {
            if (channels == 3)
                img.set(x, y, {row[3 * x], row[3 * x + 1], row[3 * x + 2]});
            else
                img.set(x, y, {row[x], row[x], row[x]});
        }
    }
    return img;
}

// ---------------------------------------------------------------------------
// 8-bit RGB PNG writer (zlib-deflated, filter 0). Used for tone-mapped
// previews only; HDR data goes to PFM.

namespace detail {

inline void png_chunk(std::ofstream &out, const char type[4], const std::vector<unsigned char> &payload) {
    auto be32 = [&](std::uint32_t v) {
        unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
        out.write(reinterpret_cast<const char *>(b), 4);
    };
    be32(std::uint32_t(payload.size()));
    out.write(type, 4);
    if (!payload.empty())
        out.write(reinterpret_cast<const char *>(payload.data()), std::streamsize(payload.size()));
    std::uint32_t crc = crc32(0, reinterpret_cast<const Bytef *>(type), 4);
    if (!payload.empty()) crc = crc32(crc, payload.data(), uInt(payload.size()));
    be32(crc);
}

}  // namespace detail

/// Tone-mapped 8-bit preview: clamp to [0,1], apply the sRGB gamma map.
inline void write_png_preview(const std::string &path, const Image &img) {
    std::vector<unsigned char> raw;
    raw.reserve(std::size_t(img.height) * (1 + 3 * img.width));
    for (int y = 0; y < img.height; ++y) {
        raw.push_back(0);  // filter type none
        for (int x = 0; x < img.width; ++x) {
            const float *p = img.pixel(x, y);
            for (int c = 0; c < 3; ++c) raw.push_back(linear_to_srgb8(p[c]));
        }
    }
    uLongf bound = compressBound(uLong(raw.size()));
    std::vector<unsigned char> compressed(bound);
    if (compress2(compressed.data(), &bound, raw.data(), uLong(raw.size()), 6) != Z_OK)
        throw std::runtime_error("write_png_preview: deflate failed");
    compressed.resize(bound);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_png_preview: cannot open " + path);
    const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    out.write(reinterpret_cast<const char *>(sig), 8);

    std::vector<unsigned char> ihdr(13);
    auto put32 = [&](int off, std::uint32_t v) {
        ihdr[off] = static_cast<unsigned char>(v >> 24);
        ihdr[off + 1] = static_cast<unsigned char>(v >> 16);
        ihdr[off + 2] = static_cast<unsigned char>(v >> 8);
        ihdr[off + 3] = static_cast<unsigned char>(v);
    };
    put32(0, std::uint32_t(img.width));
    put32(4, std::uint32_t(img.height));
    ihdr[8] = 8;   // bit depth
    ihdr[9] = 2;   // color type RGB
    ihdr[10] = ihdr[11] = ihdr[12] = 0;
    detail::png_chunk(out, "IHDR", ihdr);
    detail::png_chunk(out, "IDAT", compressed);
    detail::png_chunk(out, "IEND", {});
}

}  // namespace brdflab
