// SPDX-License-Identifier: Apache-2.0
#include "csivid/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstring>

#include "csivid/binio.hpp"

namespace csivid {

Image Image::filled(int height, int width, int channels, std::uint8_t value) {
    Image img;
    img.height = height;
    img.width = width;
    img.channels = channels;
    img.data.assign(static_cast<std::size_t>(height) * width * channels, value);
    return img;
}

namespace {

struct ReadCursor {
    std::span<const std::uint8_t> bytes;
    std::size_t pos = 0;
};

void png_read_cb(png_structp png, png_bytep out, png_size_t n) {
    auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
    if (cur->pos + n > cur->bytes.size()) {
        png_error(png, "read past end of PNG buffer");
    }
    std::memcpy(out, cur->bytes.data() + cur->pos, n);
    cur->pos += n;
}

void png_write_cb(png_structp png, png_bytep data, png_size_t n) {
    auto* buf = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    buf->insert(buf->end(), data, data + n);
}

void png_flush_cb(png_structp) {}

}  // namespace

Image decode_png(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
        throw IoError("not a PNG stream");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png_create_info_struct failed");
    }

    Image img;
    std::vector<png_bytep> rows;
    ReadCursor cursor{bytes, 0};
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("PNG decode failed");
    }
    png_set_read_fn(png, &cursor, png_read_cb);
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);

    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (depth == 16) png_set_strip_16(png);
    if (color & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS)) {
        png_set_strip_alpha(png);
    }
    png_read_update_info(png, info);

    const int out_channels = static_cast<int>(png_get_channels(png, info));
    if (out_channels != 1 && out_channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("unsupported PNG channel layout");
    }

    img.height = static_cast<int>(h);
    img.width = static_cast<int>(w);
    img.channels = out_channels;
    img.data.resize(static_cast<std::size_t>(h) * w * out_channels);
    rows.resize(h);
    const std::size_t stride = static_cast<std::size_t>(w) * out_channels;
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = img.data.data() + y * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

Image read_png(const std::filesystem::path& path) {
    return decode_png(read_file(path));
}

std::vector<std::uint8_t> encode_png(const Image& image) {
    if (image.channels != 1 && image.channels != 3) {
        throw IoError("PNG encode expects 1 or 3 channels");
    }
    if (image.data.size() !=
        static_cast<std::size_t>(image.height) * image.width * image.channels) {
        throw ShapeMismatch("image buffer does not match dimensions");
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png_create_info_struct failed");
    }

    std::vector<std::uint8_t> out;
    std::vector<png_bytep> rows(static_cast<std::size_t>(image.height));
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG encode failed");
    }
    png_set_write_fn(png, &out, png_write_cb, png_flush_cb);
    // fixed settings so identical pixels give identical bytes
    png_set_compression_level(png, 6);
    png_set_filter(png, 0, PNG_FILTER_NONE);
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
                 static_cast<png_uint_32>(image.height), 8,
                 image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    const std::size_t stride = static_cast<std::size_t>(image.width) * image.channels;
    for (int y = 0; y < image.height; ++y) {
        rows[static_cast<std::size_t>(y)] =
            const_cast<png_bytep>(image.data.data() + static_cast<std::size_t>(y) * stride);
    }
    png_set_rows(png, info, rows.data());
    png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

void write_png(const std::filesystem::path& path, const Image& image) {
    const auto bytes = encode_png(image);
    write_file_atomic(path, std::span<const std::uint8_t>(bytes));
}

Image planar_to_image(std::span<const double> planar, int channels, int height, int width) {
    const std::size_t plane = static_cast<std::size_t>(height) * width;
    if (planar.size() != plane * channels) {
        throw ShapeMismatch("planar buffer does not match dimensions");
    }
    Image img = Image::filled(height, width, channels, 0);
    for (int c = 0; c < channels; ++c) {
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const double v = std::clamp(planar[(c * static_cast<std::size_t>(height) + y) * width + x],
                                            0.0, 1.0);
                img.at(y, x, c) = static_cast<std::uint8_t>(std::lround(v * 255.0));
            }
        }
    }
    return img;
}

std::vector<double> image_to_planar(const Image& image) {
    const std::size_t plane = static_cast<std::size_t>(image.height) * image.width;
    std::vector<double> planar(plane * image.channels);
    for (int c = 0; c < image.channels; ++c) {
        for (int y = 0; y < image.height; ++y) {
            for (int x = 0; x < image.width; ++x) {
                planar[(c * static_cast<std::size_t>(image.height) + y) * image.width + x] =
                    image.at(y, x, c) / 255.0;
            }
        }
    }
    return planar;
}

Image mask_to_image(std::span<const std::uint8_t> mask, int height, int width) {
    if (mask.size() != static_cast<std::size_t>(height) * width) {
        throw ShapeMismatch("mask buffer does not match dimensions");
    }
    Image img = Image::filled(height, width, 1, 0);
    for (std::size_t i = 0; i < mask.size(); ++i) img.data[i] = mask[i] ? 255 : 0;
    return img;
}

std::vector<std::uint8_t> image_to_mask(const Image& image) {
    if (image.channels != 1) throw ShapeMismatch("mask images must be grayscale");
    std::vector<std::uint8_t> mask(image.data.size());
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = image.data[i] >= 128 ? 1 : 0;
    return mask;
}

}  // namespace csivid
