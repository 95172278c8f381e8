// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "gaussvdb/png.hpp"

#include <png.h>

#include <csetjmp>
#include <cstring>
#include <fstream>

#include "gaussvdb/error.hpp"

namespace gaussvdb {
namespace {

void on_png_warning(png_structp, png_const_charp) {}

struct ReadCursor {
    const std::vector<std::uint8_t>* bytes;
    std::size_t pos = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_png(const Framebuffer& fb) {
    if (fb.width <= 0 || fb.height <= 0) throw ValueError("zero-size image");
    std::vector<std::uint8_t> out;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, on_png_warning);
    if (!png) throw FormatError("png: cannot create writer");
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw FormatError("png: encode failed");
    }
    {
        png_set_write_fn(
            png, &out,
            [](png_structp p, png_bytep data, png_size_t len) {
                auto* buf = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(p));
                buf->insert(buf->end(), data, data + len);
            },
            [](png_structp) {});
        png_set_IHDR(png, info, png_uint_32(fb.width), png_uint_32(fb.height), 8, PNG_COLOR_TYPE_RGBA,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        for (int y = 0; y < fb.height; ++y) {
            png_write_row(png, const_cast<png_bytep>(fb.pixel(0, y)));
        }
        png_write_end(png, nullptr);
    }
    png_destroy_write_struct(&png, &info);
    return out;
}

Framebuffer decode_png(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw FormatError("png: bad signature");
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, on_png_warning);
    if (!png) throw FormatError("png: cannot create reader");
    png_infop info = png_create_info_struct(png);
    ReadCursor cursor{&bytes};
    Framebuffer fb;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("png: decode failed");
    }
    {
        png_set_read_fn(png, &cursor, [](png_structp p, png_bytep data, png_size_t len) {
            auto* c = static_cast<ReadCursor*>(png_get_io_ptr(p));
            if (c->pos + len > c->bytes->size()) png_error(p, "truncated");
            std::memcpy(data, c->bytes->data() + c->pos, len);
            c->pos += len;
        });
        png_read_info(png, info);
        if (png_get_color_type(png, info) != PNG_COLOR_TYPE_RGBA || png_get_bit_depth(png, info) != 8) {
            png_error(png, "expected 8-bit RGBA");
        }
        fb.width = int(png_get_image_width(png, info));
        fb.height = int(png_get_image_height(png, info));
        fb.rgba.resize(std::size_t(fb.width) * std::size_t(fb.height) * 4);
        for (int y = 0; y < fb.height; ++y) {
            png_read_row(png, fb.rgba.data() + std::size_t(y) * std::size_t(fb.width) * 4, nullptr);
        }
        png_read_end(png, nullptr);
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return fb;
}

void write_png(const std::filesystem::path& path, const Framebuffer& fb) {
    const auto bytes = encode_png(fb);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace gaussvdb
