#pragma once

// 8-bit grayscale PNG views of depth frames. Requires libpng.

#include "specklemap/core.hpp"
#include "specklemap/io.hpp"
#include "specklemap/reprojection.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace specklemap {

/// Near is bright; invalid pixels are black.
inline Grid<std::uint8_t> depth_to_gray(const Grid<double>& depth, double max_depth = kMaxDepthM) {
    Grid<std::uint8_t> g(depth.width(), depth.height(), 0);
    for (std::size_t i = 0; i < depth.size(); ++i) {
        const double d = depth.data()[i];
        if (!(d > 0.0)) continue;
        const double t = std::clamp(d / max_depth, 0.0, 1.0);
        g.data()[i] = static_cast<std::uint8_t>(std::lround(255.0 - 254.0 * t));
    }
    return g;
}

/// Measured pixels in the lower half of the gray range, synthesized pixels in
/// the upper half, so the filled glass stands out.
inline Grid<std::uint8_t> overlay_to_gray(const FusedDepthFrame& fused, double max_depth = kMaxDepthM) {
    const Grid<std::uint8_t> base = depth_to_gray(fused.frame.depth, max_depth);
    Grid<std::uint8_t> g(base.width(), base.height(), 0);
    for (std::size_t i = 0; i < base.size(); ++i) {
        const std::uint8_t b = base.data()[i];
        const bool synth = fused.provenance.data()[i] == static_cast<std::uint8_t>(Provenance::synthesized);
        if (synth)
            g.data()[i] = static_cast<std::uint8_t>(128 + b / 2);
        else
            g.data()[i] = static_cast<std::uint8_t>(b / 2);
    }
    return g;
}

namespace detail {

inline void png_write_to_string(png_structp png, png_bytep data, png_size_t len) {
    auto* out = static_cast<std::string*>(png_get_io_ptr(png));
    out->append(reinterpret_cast<const char*>(data), len);
}

inline void png_flush_noop(png_structp) {}

}  // namespace detail

inline std::string encode_gray_png(const Grid<std::uint8_t>& img) {
    std::string out;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png: cannot create write struct");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png: cannot create info struct");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png: encoding failed");
    }
    png_set_write_fn(png, &out, detail::png_write_to_string, detail::png_flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()), static_cast<png_uint_32>(img.height()), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int v = 0; v < img.height(); ++v) png_write_row(png, const_cast<png_bytep>(img.row(v)));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

inline void write_gray_png(const fs::path& path, const Grid<std::uint8_t>& img) {
    atomic_write(path, encode_gray_png(img));
}

}  // namespace specklemap
