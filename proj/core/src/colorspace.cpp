#include "multicolor/colorspace.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace multicolor {

namespace {

// sRGB primaries, D65 white. The white point is the row sums of the matrix so
// that (1,1,1) lands exactly on (100, 0, 0).
constexpr double kRgbToXyz[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};

constexpr double kWhiteX = kRgbToXyz[0][0] + kRgbToXyz[0][1] + kRgbToXyz[0][2];
constexpr double kWhiteY = kRgbToXyz[1][0] + kRgbToXyz[1][1] + kRgbToXyz[1][2];
constexpr double kWhiteZ = kRgbToXyz[2][0] + kRgbToXyz[2][1] + kRgbToXyz[2][2];

constexpr double kLabEpsilon = 216.0 / 24389.0;
constexpr double kLabKappa = 24389.0 / 27.0;

// BT.601 analog YUV.
constexpr double kWr = 0.299;
constexpr double kWg = 0.587;
constexpr double kWb = 0.114;
constexpr double kUMax = 0.436;
constexpr double kVMax = 0.615;

constexpr double kLabChromaScale = 110.0;

struct Matrix3 {
    double m[3][3];
};

Matrix3 invert(const double a[3][3]) {
    const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                       a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                       a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    Matrix3 r{};
    r.m[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
    r.m[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
    r.m[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
    r.m[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
    r.m[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
    r.m[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
    r.m[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
    r.m[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
    r.m[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
    return r;
}

const Matrix3& xyz_to_rgb_matrix() {
    static const Matrix3 inv = invert(kRgbToXyz);
    return inv;
}

double srgb_to_linear(double v) {
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double v) {
    if (v <= 0.0031308) return v * 12.92;
    return 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

double lab_f(double t) {
    return t > kLabEpsilon ? std::cbrt(t) : (kLabKappa * t + 16.0) / 116.0;
}

double lab_f_inv(double f) {
    const double f3 = f * f * f;
    return f3 > kLabEpsilon ? f3 : (116.0 * f - 16.0) / kLabKappa;
}

double relative_luminance(const Triple& rgb) {
    return kRgbToXyz[1][0] * srgb_to_linear(rgb[0]) + kRgbToXyz[1][1] * srgb_to_linear(rgb[1]) +
           kRgbToXyz[1][2] * srgb_to_linear(rgb[2]);
}

Triple rgb_to_lab(const Triple& rgb) {
    const double r = srgb_to_linear(rgb[0]);
    const double g = srgb_to_linear(rgb[1]);
    const double b = srgb_to_linear(rgb[2]);
    const double x = kRgbToXyz[0][0] * r + kRgbToXyz[0][1] * g + kRgbToXyz[0][2] * b;
    const double y = kRgbToXyz[1][0] * r + kRgbToXyz[1][1] * g + kRgbToXyz[1][2] * b;
    const double z = kRgbToXyz[2][0] * r + kRgbToXyz[2][1] * g + kRgbToXyz[2][2] * b;
    const double fx = lab_f(x / kWhiteX);
    const double fy = lab_f(y / kWhiteY);
    const double fz = lab_f(z / kWhiteZ);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

Triple lab_to_rgb(const Triple& lab) {
    const double fy = (lab[0] + 16.0) / 116.0;
    const double fx = fy + lab[1] / 500.0;
    const double fz = fy - lab[2] / 200.0;
    const double x = lab_f_inv(fx) * kWhiteX;
    const double y = lab_f_inv(fy) * kWhiteY;
    const double z = lab_f_inv(fz) * kWhiteZ;
    const auto& m = xyz_to_rgb_matrix().m;
    const double r = m[0][0] * x + m[0][1] * y + m[0][2] * z;
    const double g = m[1][0] * x + m[1][1] * y + m[1][2] * z;
    const double b = m[2][0] * x + m[2][1] * y + m[2][2] * z;
    // pow() is undefined for negative bases; mirror the curve through zero.
    auto encode = [](double v) { return v < 0.0 ? -linear_to_srgb(-v) : linear_to_srgb(v); };
    return {encode(r), encode(g), encode(b)};
}

Triple rgb_to_hsv(const Triple& rgb) {
    const double r = rgb[0], g = rgb[1], b = rgb[2];
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double delta = mx - mn;
    double h = 0.0;
    if (delta > 0.0) {
        if (mx == r) {
            h = (g - b) / delta;
            if (h < 0.0) h += 6.0;
        } else if (mx == g) {
            h = (b - r) / delta + 2.0;
        } else {
            h = (r - g) / delta + 4.0;
        }
        h /= 6.0;
    }
    const double s = mx > 0.0 ? delta / mx : 0.0;
    return {h, s, mx};
}

Triple hsv_to_rgb(const Triple& hsv) {
    double h = hsv[0] - std::floor(hsv[0]);
    const double s = hsv[1];
    const double v = hsv[2];
    h *= 6.0;
    const int sector = std::min(static_cast<int>(h), 5);
    const double f = h - sector;
    const double p = v * (1.0 - s);
    const double q = v * (1.0 - s * f);
    const double t = v * (1.0 - s * (1.0 - f));
    switch (sector) {
        case 0: return {v, t, p};
        case 1: return {q, v, p};
        case 2: return {p, v, t};
        case 3: return {p, q, v};
        case 4: return {t, p, v};
        default: return {v, p, q};
    }
}

Triple rgb_to_yuv(const Triple& rgb) {
    const double y = kWr * rgb[0] + kWg * rgb[1] + kWb * rgb[2];
    const double u = kUMax / (1.0 - kWb) * (rgb[2] - y);
    const double v = kVMax / (1.0 - kWr) * (rgb[0] - y);
    return {y, u, v};
}

Triple yuv_to_rgb(const Triple& yuv) {
    const double y = yuv[0];
    const double b = y + yuv[1] * (1.0 - kWb) / kUMax;
    const double r = y + yuv[2] * (1.0 - kWr) / kVMax;
    const double g = (y - kWr * r - kWb * b) / kWg;
    return {r, g, b};
}

// Slack for float storage when deciding that a conversion left the unit cube.
constexpr double kGamutTolerance = 1e-5;

bool in_unit_cube(const Triple& rgb) {
    return std::all_of(rgb.begin(), rgb.end(), [](double v) {
        return v >= -kGamutTolerance && v <= 1.0 + kGamutTolerance;
    });
}

Triple clamp_unit(const Triple& rgb) {
    return {std::clamp(rgb[0], 0.0, 1.0), std::clamp(rgb[1], 0.0, 1.0), std::clamp(rgb[2], 0.0, 1.0)};
}

Triple read_triple(std::span<const float> p) { return {p[0], p[1], p[2]}; }

}  // namespace

std::string_view to_string(ColorSpace space) noexcept {
    switch (space) {
        case ColorSpace::CIELab: return "lab";
        case ColorSpace::HSV: return "hsv";
        case ColorSpace::YUV: return "yuv";
    }
    return "unknown";
}

std::optional<ColorSpace> parse_color_space(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "lab" || lower == "cielab" || lower == "cie-lab") return ColorSpace::CIELab;
    if (lower == "hsv") return ColorSpace::HSV;
    if (lower == "yuv") return ColorSpace::YUV;
    return std::nullopt;
}

Triple rgb_to_space(const Triple& rgb, ColorSpace space) {
    switch (space) {
        case ColorSpace::CIELab: return rgb_to_lab(rgb);
        case ColorSpace::HSV: return rgb_to_hsv(rgb);
        case ColorSpace::YUV: return rgb_to_yuv(rgb);
    }
    throw std::logic_error("rgb_to_space: unknown color space");
}

Triple space_to_rgb(const Triple& value, ColorSpace space) {
    switch (space) {
        case ColorSpace::CIELab: return lab_to_rgb(value);
        case ColorSpace::HSV: return hsv_to_rgb(value);
        case ColorSpace::YUV: return yuv_to_rgb(value);
    }
    throw std::logic_error("space_to_rgb: unknown color space");
}

int brightness_index(ColorSpace space) noexcept {
    return space == ColorSpace::HSV ? 2 : 0;
}

double gray_to_brightness(double gray, ColorSpace space) {
    return rgb_to_space(Triple{gray, gray, gray}, space)[brightness_index(space)];
}

double rgb_to_gray_equivalent(const Triple& rgb, ColorSpace space) {
    switch (space) {
        case ColorSpace::CIELab: return linear_to_srgb(relative_luminance(rgb) / kWhiteY);
        case ColorSpace::HSV: return std::max({rgb[0], rgb[1], rgb[2]});
        case ColorSpace::YUV: return luma(rgb);
    }
    throw std::logic_error("rgb_to_gray_equivalent: unknown color space");
}

double luma(const Triple& rgb) noexcept {
    return kWr * rgb[0] + kWg * rgb[1] + kWb * rgb[2];
}

ChromaNormalization chroma_normalization(ColorSpace space) noexcept {
    // normalized = raw * scale + offset
    switch (space) {
        case ColorSpace::CIELab:
            return {1.0 / kLabChromaScale, 0.0, 1.0 / kLabChromaScale, 0.0};
        case ColorSpace::HSV:
            return {2.0, -1.0, 2.0, -1.0};
        case ColorSpace::YUV:
            return {1.0 / kUMax, 0.0, 1.0 / kVMax, 0.0};
    }
    return {1.0, 0.0, 1.0, 0.0};
}

std::array<double, 2> normalize_chroma(double c0, double c1, ColorSpace space) noexcept {
    const auto n = chroma_normalization(space);
    return {c0 * n.scale0 + n.offset0, c1 * n.scale1 + n.offset1};
}

std::array<double, 2> denormalize_chroma(double n0, double n1, ColorSpace space) noexcept {
    const auto n = chroma_normalization(space);
    return {(n0 - n.offset0) / n.scale0, (n1 - n.offset1) / n.scale1};
}

SpaceImage rgb_to_space(const RgbImage& img, ColorSpace space) {
    SpaceImage out{Image<3>(img.height(), img.width()), space};
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        const Triple v = rgb_to_space(read_triple(img.pixel(i)), space);
        auto dst = out.pixels.pixel(i);
        for (int c = 0; c < 3; ++c) dst[c] = static_cast<float>(v[c]);
    }
    return out;
}

ConversionResult space_to_rgb(const SpaceImage& img) {
    ConversionResult result{RgbImage(img.pixels.height(), img.pixels.width()), 0.0};
    std::size_t clamped = 0;
    for (std::size_t i = 0; i < img.pixels.pixel_count(); ++i) {
        const Triple rgb = space_to_rgb(read_triple(img.pixels.pixel(i)), img.space);
        if (!in_unit_cube(rgb)) ++clamped;
        const Triple c = clamp_unit(rgb);
        auto dst = result.image.pixel(i);
        for (int k = 0; k < 3; ++k) dst[k] = static_cast<float>(c[k]);
    }
    if (img.pixels.pixel_count() > 0) {
        result.out_of_gamut_fraction =
            static_cast<double>(clamped) / static_cast<double>(img.pixels.pixel_count());
    }
    return result;
}

ChannelPair extract_color_channels(const RgbImage& img, ColorSpace space) {
    ChannelPair pair{Image<2>(img.height(), img.width()), space, true};
    const int bi = brightness_index(space);
    const int c0 = bi == 0 ? 1 : 0;
    const int c1 = bi == 2 ? 1 : 2;
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        const Triple v = rgb_to_space(read_triple(img.pixel(i)), space);
        const auto n = normalize_chroma(v[c0], v[c1], space);
        auto dst = pair.channels.pixel(i);
        dst[0] = static_cast<float>(n[0]);
        dst[1] = static_cast<float>(n[1]);
    }
    return pair;
}

GrayImage brightness_of(const RgbImage& img, ColorSpace space) {
    GrayImage out(img.height(), img.width());
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        out.pixel(i)[0] = static_cast<float>(rgb_to_gray_equivalent(read_triple(img.pixel(i)), space));
    }
    return out;
}

GrayImage to_gray(const RgbImage& img) {
    GrayImage out(img.height(), img.width());
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        out.pixel(i)[0] = static_cast<float>(luma(read_triple(img.pixel(i))));
    }
    return out;
}

RgbImage gray_to_rgb(const GrayImage& gray) {
    RgbImage out(gray.height(), gray.width());
    for (std::size_t i = 0; i < gray.pixel_count(); ++i) {
        const float g = gray.pixel(i)[0];
        auto dst = out.pixel(i);
        dst[0] = dst[1] = dst[2] = g;
    }
    return out;
}

ConversionResult compose_fixed(const GrayImage& gray, const ChannelPair& pair) {
    if (gray.height() != pair.channels.height() || gray.width() != pair.channels.width()) {
        throw std::invalid_argument("compose_fixed: gray and channel pair differ in size");
    }
    const ColorSpace space = pair.space;
    const int bi = brightness_index(space);
    const int c0 = bi == 0 ? 1 : 0;
    const int c1 = bi == 2 ? 1 : 2;
    SpaceImage composed{Image<3>(gray.height(), gray.width()), space};
    for (std::size_t i = 0; i < gray.pixel_count(); ++i) {
        const auto p = pair.channels.pixel(i);
        const auto raw = pair.normalized ? denormalize_chroma(p[0], p[1], space)
                                         : std::array<double, 2>{p[0], p[1]};
        auto dst = composed.pixels.pixel(i);
        dst[bi] = static_cast<float>(gray_to_brightness(gray.pixel(i)[0], space));
        dst[c0] = static_cast<float>(raw[0]);
        dst[c1] = static_cast<float>(raw[1]);
    }
    return space_to_rgb(composed);
}

std::size_t GamutSlice::in_gamut_count() const {
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
}

GamutSlice gamut_slice(double gray_value, ColorSpace space, int resolution) {
    if (resolution < 2) throw std::invalid_argument("gamut_slice: resolution must be >= 2");
    if (!(gray_value >= 0.0 && gray_value <= 1.0)) {
        throw std::invalid_argument("gamut_slice: gray value outside [0,1]");
    }
    GamutSlice slice;
    slice.space = space;
    slice.resolution = resolution;
    slice.brightness = gray_to_brightness(gray_value, space);
    slice.axis0.resize(resolution);
    slice.axis1.resize(resolution);
    for (int k = 0; k < resolution; ++k) {
        const double n = -1.0 + 2.0 * k / (resolution - 1);
        const auto raw = denormalize_chroma(n, n, space);
        slice.axis0[k] = raw[0];
        slice.axis1[k] = raw[1];
    }
    slice.mask.assign(static_cast<std::size_t>(resolution) * resolution, false);
    slice.preview = RgbImage(resolution, resolution);

    const int bi = brightness_index(space);
    const int c0 = bi == 0 ? 1 : 0;
    const int c1 = bi == 2 ? 1 : 2;
    for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j < resolution; ++j) {
            Triple v{};
            v[bi] = slice.brightness;
            v[c0] = slice.axis0[i];
            v[c1] = slice.axis1[j];
            const Triple rgb = space_to_rgb(v, space);
            const bool ok = in_unit_cube(rgb);
            slice.mask[static_cast<std::size_t>(i) * resolution + j] = ok;
            if (ok) {
                const Triple c = clamp_unit(rgb);
                for (int k = 0; k < 3; ++k) slice.preview.at(i, j, k) = static_cast<float>(c[k]);
            }
        }
    }
    return slice;
}

}  // namespace multicolor
