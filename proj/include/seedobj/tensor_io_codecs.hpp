// Copyright (C) 2026 The seedobj Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdarg>
#include <csetjmp>
#include <cstdio>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <png.h>
#include <tiffio.h>

#include "seedobj/error.hpp"
#include "seedobj/grid.hpp"

/// \file tensor_io_codecs.hpp
/// PNG (libpng) and TIFF (libtiff) adapters. Pixel values are returned as
/// raw sample values (0..255 or 0..65535), not rescaled.

namespace seedobj::io::codecs {

namespace detail {

// libpng reports errors by longjmp. All state touched after setjmp lives in
// this struct, owned by the caller, so nothing on the jumping frame needs
// unwinding.
struct PngState {
    std::string_view input;
    std::size_t offset = 0;
    std::vector<unsigned char> pixels;
    std::vector<png_bytep> rows;
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    int bit_depth = 0;
    int channels = 0;
    std::string message;
};

inline void png_error_fn(png_structp png, png_const_charp msg) {
    auto* st = static_cast<PngState*>(png_get_error_ptr(png));
    st->message = msg ? msg : "unknown libpng error";
    png_longjmp(png, 1);
}

inline void png_warning_fn(png_structp, png_const_charp) {}

inline void png_read_fn(png_structp png, png_bytep out, png_size_t len) {
    auto* st = static_cast<PngState*>(png_get_io_ptr(png));
    if (st->offset + len > st->input.size()) png_error(png, "truncated PNG stream");
    std::memcpy(out, st->input.data() + st->offset, len);
    st->offset += len;
}

inline bool png_decode_raw(PngState* st) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, st, png_error_fn, png_warning_fn);
    if (!png) return false;
    png_infop info = png_create_info_struct(png);
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }
    png_set_read_fn(png, st, png_read_fn);
    png_read_info(png, info);
    const int color = png_get_color_type(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    st->width = png_get_image_width(png, info);
    st->height = png_get_image_height(png, info);
    st->bit_depth = png_get_bit_depth(png, info);
    st->channels = png_get_channels(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    st->pixels.resize(stride * st->height);
    st->rows.resize(st->height);
    for (png_uint_32 y = 0; y < st->height; ++y) st->rows[y] = st->pixels.data() + y * stride;
    png_read_image(png, st->rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

struct PngWriteState {
    std::string output;
    std::vector<unsigned char> pixels;
    std::vector<png_bytep> rows;
    std::string message;
};

inline void png_write_error_fn(png_structp png, png_const_charp msg) {
    auto* st = static_cast<PngWriteState*>(png_get_error_ptr(png));
    st->message = msg ? msg : "unknown libpng error";
    png_longjmp(png, 1);
}

inline void png_write_fn(png_structp png, png_bytep data, png_size_t len) {
    auto* st = static_cast<PngWriteState*>(png_get_io_ptr(png));
    st->output.append(reinterpret_cast<const char*>(data), len);
}

inline void png_flush_fn(png_structp) {}

inline bool png_encode_raw(PngWriteState* st, png_uint_32 width, png_uint_32 height, int depth,
                           int color) {
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, st, png_write_error_fn, png_warning_fn);
    if (!png) return false;
    png_infop info = png_create_info_struct(png);
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return false;
    }
    png_set_write_fn(png, st, png_write_fn, png_flush_fn);
    png_set_IHDR(png, info, width, height, depth, color, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, st->rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

struct TiffMessage {
    static std::string& last() {
        thread_local std::string msg;
        return msg;
    }
    static void handler(const char* module, const char* fmt, va_list ap) {
        char buf[512];
        std::vsnprintf(buf, sizeof buf, fmt, ap);
        last() = std::string(module ? module : "libtiff") + ": " + buf;
    }
    static void install() {
        static const bool once = [] {
            TIFFSetErrorHandler(&TiffMessage::handler);
            TIFFSetWarningHandler(nullptr);
            return true;
        }();
        (void)once;
    }
};

} // namespace detail

/// Grayscale or RGB PNG, 8 or 16 bits. Alpha is dropped, palettes expanded.
inline Grid decode_png(std::string_view bytes, const std::string& source = "<memory>") {
    detail::PngState st;
    st.input = bytes;
    if (!detail::png_decode_raw(&st)) throw IoError(source + ": PNG decode failed: " + st.message);
    if (st.bit_depth != 8 && st.bit_depth != 16)
        throw IoError(source + ": unsupported PNG bit depth " + std::to_string(st.bit_depth));
    const std::size_t nc = static_cast<std::size_t>(st.channels);
    const std::size_t n = static_cast<std::size_t>(st.width) * st.height * nc;
    std::vector<double> values(n);
    for (std::size_t k = 0; k < n; ++k)
        values[k] = st.bit_depth == 8 ? st.pixels[k]
                                      : (st.pixels[2 * k] << 8 | st.pixels[2 * k + 1]);
    return Grid(Shape{st.height, st.width}, nc, std::move(values));
}

/// Encodes a 2D grid with 1 or 3 channels of integral values in [0, 2^depth).
inline std::string encode_png(const Grid& g, int bit_depth = 8) {
    if (g.rank() != 2 || (g.channels() != 1 && g.channels() != 3))
        throw ValidationError("PNG export needs a 2D grid with 1 or 3 channels");
    if (bit_depth != 8 && bit_depth != 16) throw ValidationError("PNG bit depth must be 8 or 16");
    const double top = bit_depth == 8 ? 255.0 : 65535.0;
    detail::PngWriteState st;
    const std::size_t bytes = static_cast<std::size_t>(bit_depth / 8);
    st.pixels.resize(g.values().size() * bytes);
    for (std::size_t k = 0; k < g.values().size(); ++k) {
        const double v = g.values()[k];
        if (v < 0.0 || v > top || v != static_cast<double>(static_cast<std::uint32_t>(v)))
            throw ValidationError("PNG export: value " + std::to_string(v) + " out of range");
        const auto u = static_cast<std::uint32_t>(v);
        if (bytes == 1) {
            st.pixels[k] = static_cast<unsigned char>(u);
        } else {
            st.pixels[2 * k] = static_cast<unsigned char>(u >> 8);
            st.pixels[2 * k + 1] = static_cast<unsigned char>(u & 0xff);
        }
    }
    const std::size_t stride = g.shape()[1] * g.channels() * bytes;
    st.rows.resize(g.shape()[0]);
    for (std::size_t y = 0; y < g.shape()[0]; ++y) st.rows[y] = st.pixels.data() + y * stride;
    const int color = g.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    if (!detail::png_encode_raw(&st, static_cast<png_uint_32>(g.shape()[1]),
                                static_cast<png_uint_32>(g.shape()[0]), bit_depth, color))
        throw IoError("PNG encode failed: " + st.message);
    return st.output;
}

/// Single- or multi-page TIFF, grayscale 8/16-bit or RGB 8-bit, strip layout.
/// One page gives an image; several pages give a volume with pages as slices.
inline Grid read_tiff(const std::filesystem::path& path) {
    detail::TiffMessage::install();
    const std::string name = path.string();
    TIFF* tif = TIFFOpen(name.c_str(), "r");
    if (!tif) throw IoError(name + ": cannot open TIFF: " + detail::TiffMessage::last());
    struct Closer {
        TIFF* t;
        ~Closer() { TIFFClose(t); }
    } closer{tif};

    std::vector<double> values;
    std::uint32_t width = 0, height = 0;
    std::uint16_t channels = 0;
    std::size_t pages = 0;
    do {
        std::uint32_t w = 0, h = 0;
        std::uint16_t bits = 0, spp = 1, planar = PLANARCONFIG_CONTIG, format = SAMPLEFORMAT_UINT;
        TIFFGetField(tif, TIFFTAG_IMAGEWIDTH, &w);
        TIFFGetField(tif, TIFFTAG_IMAGELENGTH, &h);
        TIFFGetFieldDefaulted(tif, TIFFTAG_BITSPERSAMPLE, &bits);
        TIFFGetFieldDefaulted(tif, TIFFTAG_SAMPLESPERPIXEL, &spp);
        TIFFGetFieldDefaulted(tif, TIFFTAG_PLANARCONFIG, &planar);
        TIFFGetFieldDefaulted(tif, TIFFTAG_SAMPLEFORMAT, &format);
        const std::string page = name + " page " + std::to_string(pages);
        if (TIFFIsTiled(tif)) throw IoError(page + ": tiled TIFF is not supported");
        if (format != SAMPLEFORMAT_UINT) throw IoError(page + ": only unsigned samples supported");
        if (planar != PLANARCONFIG_CONTIG && spp > 1)
            throw IoError(page + ": planar-separate TIFF is not supported");
        if (!((spp == 1 && (bits == 8 || bits == 16)) || (spp == 3 && bits == 8)))
            throw IoError(page + ": unsupported sample layout (" + std::to_string(spp) + " x " +
                          std::to_string(bits) + "-bit)");
        if (w == 0 || h == 0) throw IoError(page + ": empty page");
        if (pages == 0) {
            width = w;
            height = h;
            channels = spp;
        } else if (w != width || h != height || spp != channels) {
            throw IoError(page + ": page geometry differs from page 0");
        }

        std::vector<unsigned char> line(static_cast<std::size_t>(TIFFScanlineSize(tif)));
        const std::size_t row_values = static_cast<std::size_t>(w) * spp;
        for (std::uint32_t y = 0; y < h; ++y) {
            if (TIFFReadScanline(tif, line.data(), y, 0) < 0)
                throw IoError(page + ": corrupt scanline " + std::to_string(y) + ": " +
                              detail::TiffMessage::last());
            for (std::size_t k = 0; k < row_values; ++k) {
                if (bits == 8) {
                    values.push_back(line[k]);
                } else {
                    std::uint16_t v;
                    std::memcpy(&v, line.data() + 2 * k, 2);   // libtiff returns host order
                    values.push_back(v);
                }
            }
        }
        ++pages;
    } while (TIFFReadDirectory(tif));

    if (pages == 1) return Grid(Shape{height, width}, channels, std::move(values));
    return Grid(Shape{pages, height, width}, channels, std::move(values));
}

/// Writes one page per slice (one page for a 2D grid), uncompressed.
inline void write_tiff(const std::filesystem::path& path, const Grid& g, int bit_depth = 8) {
    detail::TiffMessage::install();
    if (g.channels() != 1 && !(g.channels() == 3 && bit_depth == 8))
        throw ValidationError("TIFF export supports gray 8/16-bit or RGB 8-bit");
    const std::string name = path.string();
    TIFF* tif = TIFFOpen(name.c_str(), "w");
    if (!tif) throw IoError(name + ": cannot create TIFF: " + detail::TiffMessage::last());
    struct Closer {
        TIFF* t;
        ~Closer() { TIFFClose(t); }
    } closer{tif};

    const bool volume = g.rank() == 3;
    const std::size_t pages = volume ? g.shape()[0] : 1;
    const std::size_t h = g.shape()[volume ? 1 : 0];
    const std::size_t w = g.shape()[volume ? 2 : 1];
    const std::size_t row_values = w * g.channels();
    std::vector<unsigned char> line(row_values * static_cast<std::size_t>(bit_depth / 8));
    for (std::size_t z = 0; z < pages; ++z) {
        TIFFSetField(tif, TIFFTAG_IMAGEWIDTH, static_cast<std::uint32_t>(w));
        TIFFSetField(tif, TIFFTAG_IMAGELENGTH, static_cast<std::uint32_t>(h));
        TIFFSetField(tif, TIFFTAG_BITSPERSAMPLE, static_cast<std::uint16_t>(bit_depth));
        TIFFSetField(tif, TIFFTAG_SAMPLESPERPIXEL, static_cast<std::uint16_t>(g.channels()));
        TIFFSetField(tif, TIFFTAG_PHOTOMETRIC,
                     g.channels() == 3 ? PHOTOMETRIC_RGB : PHOTOMETRIC_MINISBLACK);
        TIFFSetField(tif, TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
        TIFFSetField(tif, TIFFTAG_COMPRESSION, COMPRESSION_NONE);
        TIFFSetField(tif, TIFFTAG_ROWSPERSTRIP, static_cast<std::uint32_t>(h));
        for (std::size_t y = 0; y < h; ++y) {
            const std::size_t base = (z * h + y) * row_values;
            for (std::size_t k = 0; k < row_values; ++k) {
                const auto v = static_cast<std::uint16_t>(g.values()[base + k]);
                if (bit_depth == 8) line[k] = static_cast<unsigned char>(v);
                else std::memcpy(line.data() + 2 * k, &v, 2);
            }
            if (TIFFWriteScanline(tif, line.data(), static_cast<std::uint32_t>(y), 0) < 0)
                throw IoError(name + ": write failed: " + detail::TiffMessage::last());
        }
        if (!TIFFWriteDirectory(tif)) throw IoError(name + ": cannot finish TIFF page");
    }
}

} // namespace seedobj::io::codecs
