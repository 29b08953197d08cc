#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace multicolor {

/// Dense row-major H x W x C float image. Pixel values are interpreted by the
/// alias in use: RgbImage and GrayImage hold [0,1] sRGB / luma values.
template <int Channels>
class Image {
public:
    static constexpr int kChannels = Channels;

    Image() = default;
    Image(int height, int width, float fill = 0.0f)
        : height_(height), width_(width), data_(checked_size(height, width), fill) {}
    Image(int height, int width, std::vector<float> data)
        : height_(height), width_(width), data_(std::move(data)) {
        if (data_.size() != checked_size(height, width)) {
            throw std::invalid_argument("Image: buffer size does not match shape");
        }
    }

    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
    }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    float& at(int y, int x, int c) noexcept { return data_[index(y, x, c)]; }
    [[nodiscard]] float at(int y, int x, int c) const noexcept { return data_[index(y, x, c)]; }

    [[nodiscard]] std::span<float> pixel(std::size_t i) noexcept {
        return {data_.data() + i * Channels, static_cast<std::size_t>(Channels)};
    }
    [[nodiscard]] std::span<const float> pixel(std::size_t i) const noexcept {
        return {data_.data() + i * Channels, static_cast<std::size_t>(Channels)};
    }

    [[nodiscard]] std::span<float> data() noexcept { return data_; }
    [[nodiscard]] std::span<const float> data() const noexcept { return data_; }

    [[nodiscard]] bool same_shape(const Image& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_;
    }

    [[nodiscard]] bool all_finite() const noexcept {
        for (float v : data_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    [[nodiscard]] bool within_unit_range() const noexcept {
        for (float v : data_) {
            if (!(v >= 0.0f && v <= 1.0f)) return false;
        }
        return true;
    }

    friend bool operator==(const Image&, const Image&) = default;

private:
    static std::size_t checked_size(int height, int width) {
        if (height < 0 || width < 0) throw std::invalid_argument("Image: negative dimension");
        return static_cast<std::size_t>(height) * static_cast<std::size_t>(width) * Channels;
    }
    [[nodiscard]] std::size_t index(int y, int x, int c) const noexcept {
        return (static_cast<std::size_t>(y) * width_ + x) * Channels + c;
    }

    int height_ = 0;
    int width_ = 0;
    std::vector<float> data_;
};

using RgbImage = Image<3>;
using GrayImage = Image<1>;

}  // namespace multicolor
