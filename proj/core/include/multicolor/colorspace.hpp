#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "multicolor/image.hpp"

namespace multicolor {

enum class ColorSpace { CIELab, HSV, YUV };

inline constexpr std::array<ColorSpace, 3> kAllColorSpaces = {ColorSpace::CIELab, ColorSpace::HSV,
                                                              ColorSpace::YUV};

std::string_view to_string(ColorSpace space) noexcept;
/// Accepts "lab", "cielab", "hsv", "yuv" (case-insensitive).
std::optional<ColorSpace> parse_color_space(std::string_view name);

using Triple = std::array<double, 3>;

/// Channel order per space: Lab (L, a, b), HSV (H, S, V), YUV (Y, U, V).
/// Hue is stored in [0,1) rather than degrees.
Triple rgb_to_space(const Triple& rgb, ColorSpace space);
/// Unclamped inverse; the result may leave the unit cube.
Triple space_to_rgb(const Triple& value, ColorSpace space);

/// Index of the brightness channel inside a space triple (L, V or Y).
int brightness_index(ColorSpace space) noexcept;
/// Brightness channel value for a uniform gray sRGB pixel.
double gray_to_brightness(double gray, ColorSpace space);
/// Brightness channel value of an arbitrary sRGB pixel, expressed back as the
/// gray level whose brightness it equals (luma for YUV, max for HSV, and the
/// sRGB-encoded relative luminance for Lab).
double rgb_to_gray_equivalent(const Triple& rgb, ColorSpace space);

/// BT.601 luma, the grayscale definition used throughout.
double luma(const Triple& rgb) noexcept;

/// Normalized chroma range used for training targets. Every value of a
/// normalized pair lies in [-1,1] for in-gamut colors.
struct ChromaNormalization {
    double scale0, offset0;
    double scale1, offset1;
};
ChromaNormalization chroma_normalization(ColorSpace space) noexcept;
std::array<double, 2> normalize_chroma(double c0, double c1, ColorSpace space) noexcept;
std::array<double, 2> denormalize_chroma(double n0, double n1, ColorSpace space) noexcept;

/// Three-channel image in a working color space.
struct SpaceImage {
    Image<3> pixels;
    ColorSpace space = ColorSpace::CIELab;
};

/// The two non-brightness channels of a space (ab / HS / UV).
struct ChannelPair {
    Image<2> channels;
    ColorSpace space = ColorSpace::CIELab;
    bool normalized = true;
};

struct ConversionResult {
    RgbImage image;
    /// Fraction of pixels that needed clamping into [0,1].
    double out_of_gamut_fraction = 0.0;
};

SpaceImage rgb_to_space(const RgbImage& img, ColorSpace space);
ConversionResult space_to_rgb(const SpaceImage& img);

ChannelPair extract_color_channels(const RgbImage& img, ColorSpace space);
/// Gray image whose mapping onto `space` reproduces the brightness channel of `img`.
GrayImage brightness_of(const RgbImage& img, ColorSpace space);
/// BT.601 luma image.
GrayImage to_gray(const RgbImage& img);
RgbImage gray_to_rgb(const GrayImage& gray);

/// Fixed (non-learned) mapping: gray drives the brightness channel, the pair
/// supplies chroma, result is converted back to sRGB and clamped.
ConversionResult compose_fixed(const GrayImage& gray, const ChannelPair& pair);

struct GamutSlice {
    ColorSpace space = ColorSpace::CIELab;
    int resolution = 0;
    double brightness = 0.0;
    /// Chroma coordinates sampled along rows (first channel) and columns (second).
    std::vector<double> axis0;
    std::vector<double> axis1;
    /// mask[i * resolution + j] for (axis0[i], axis1[j]).
    std::vector<bool> mask;
    /// In-gamut samples show their color, the rest are black.
    RgbImage preview;

    [[nodiscard]] bool in_gamut(int i, int j) const { return mask[static_cast<std::size_t>(i) * resolution + j]; }
    [[nodiscard]] std::size_t in_gamut_count() const;
};

/// Samples the chroma plane at the brightness of `gray_value` over the full
/// denormalized chroma range of the space.
GamutSlice gamut_slice(double gray_value, ColorSpace space, int resolution);

}  // namespace multicolor
