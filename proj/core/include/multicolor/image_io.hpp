#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "multicolor/image.hpp"

namespace multicolor {

class ImageIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Decodes PNG/JPEG into [0,1] floats (value / 255). Gray files are replicated
/// across the three channels. Throws ImageIoError when the file is unreadable.
RgbImage read_rgb(const std::filesystem::path& path);

/// Encodes as 8-bit PNG with round-to-nearest. Values are clamped to [0,1].
void write_png(const std::filesystem::path& path, const RgbImage& img);
void write_png(const std::filesystem::path& path, const GrayImage& img);

/// Quantizes to the 8-bit grid without writing a file.
RgbImage quantize_8bit(const RgbImage& img);

/// Bilinear resize (half-pixel centers, no antialiasing).
RgbImage resize_bilinear(const RgbImage& img, int height, int width);

}  // namespace multicolor
