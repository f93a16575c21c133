// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "csivid/errors.hpp"

namespace csivid {

/// Interleaved 8-bit image, row-major. `channels` is 1 (grayscale) or 3 (RGB).
struct Image {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;  // height * width * channels

    std::uint8_t at(int y, int x, int c) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t& at(int y, int x, int c) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    static Image filled(int height, int width, int channels, std::uint8_t value);
};

/// PNG decode. Palette images expand to RGB, 16-bit depth narrows to 8,
/// alpha is dropped; the result has 1 or 3 channels.
Image read_png(const std::filesystem::path& path);
Image decode_png(std::span<const std::uint8_t> bytes);

/// PNG encode with fixed compression settings, written atomically. Output
/// bytes depend only on the pixel content.
void write_png(const std::filesystem::path& path, const Image& image);
std::vector<std::uint8_t> encode_png(const Image& image);

/// Planar double [0, 1] (channel-major, c * H * W) to interleaved u8 with
/// clamping and round-to-nearest, and back (u8 / 255).
Image planar_to_image(std::span<const double> planar, int channels, int height, int width);
std::vector<double> image_to_planar(const Image& image);

/// Binary masks: 0/1 bytes (row-major) to grayscale 0/255 PNG and back
/// (threshold at 128).
Image mask_to_image(std::span<const std::uint8_t> mask, int height, int width);
std::vector<std::uint8_t> image_to_mask(const Image& image);

}  // namespace csivid
