#include "multicolor/encoder.hpp"

#include <stdexcept>
#include <string>

namespace multicolor {

namespace nn = torch::nn;

namespace {

nn::Conv2d conv3x3(int in, int out, int stride = 1) {
    return nn::Conv2d(nn::Conv2dOptions(in, out, 3).stride(stride).padding(1));
}

// Channel-wise layer normalization over (C, H, W), the single-group form of GroupNorm.
nn::GroupNorm norm(int channels) { return nn::GroupNorm(nn::GroupNormOptions(1, channels)); }

nn::Sequential conv_norm_gelu(int in, int out, int stride = 1) {
    return nn::Sequential(conv3x3(in, out, stride), norm(out), nn::GELU());
}

nn::Sequential down_block(int in, int out) {
    return nn::Sequential(conv3x3(in, out, 2), norm(out), nn::GELU(), conv3x3(out, out), norm(out), nn::GELU());
}

// Stage 1 starts from H/32 = ceil(H/16 / 2); for odd H/16 the shuffled map is
// one row/column larger than the skip and is cropped to it.
torch::Tensor crop_to(const torch::Tensor& x, const torch::Tensor& like) {
    return x.slice(2, 0, like.size(2)).slice(3, 0, like.size(3));
}

}  // namespace

void check_pyramid_input(int height, int width) {
    if (height <= 0 || width <= 0 || height % 16 != 0 || width % 16 != 0) {
        throw std::invalid_argument("encoder input must be a positive multiple of 16, got " +
                                    std::to_string(height) + "x" + std::to_string(width));
    }
}

void EncoderConfig::validate() const {
    check_pyramid_input(height, width);
    for (int c : stage_channels) {
        if (c <= 0) throw std::invalid_argument("encoder stage channels must be positive");
    }
    for (int c : backbone_widths) {
        if (c <= 0) throw std::invalid_argument("encoder backbone widths must be positive");
    }
}

EncoderConfig EncoderConfig::paper() { return EncoderConfig{}; }

EncoderConfig EncoderConfig::desk() {
    EncoderConfig cfg;
    cfg.stage_channels = {64, 64, 32, 32};
    cfg.backbone_widths = {32, 48, 64, 96};
    cfg.height = 64;
    cfg.width = 64;
    return cfg;
}

const torch::Tensor& FeaturePyramid::level(int i) const {
    switch (i) {
        case 0: return f1;
        case 1: return f2;
        case 2: return f3;
        case 3: return f4;
        default: throw std::out_of_range("FeaturePyramid::level");
    }
}

EncoderImpl::EncoderImpl(EncoderConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    const auto& w = cfg_.backbone_widths;
    const auto& c = cfg_.stage_channels;

    stem_ = register_module("stem", nn::Sequential(conv3x3(1, w[0], 2), norm(w[0]), nn::GELU(),
                                                   conv3x3(w[0], w[0], 2), norm(w[0]), nn::GELU()));
    for (int i = 0; i < 3; ++i) {
        down_[i] = register_module("down" + std::to_string(i + 1), down_block(w[i], w[i + 1]));
    }

    // Upsampling stage i consumes the previous map and emits c[i] channels.
    const std::array<int, 4> up_in{w[3], c[0], c[1], c[2]};
    // Skip features at H/16, H/8, H/4, and the input image at H.
    const std::array<int, 4> skip{w[2], w[1], w[0], 1};
    for (int i = 0; i < 4; ++i) {
        up_conv_[i] = register_module("up" + std::to_string(i + 1), conv3x3(up_in[i], 4 * c[i]));
        fuse_[i] = register_module("fuse" + std::to_string(i + 1), conv_norm_gelu(c[i] + skip[i], c[i]));
    }
    final_up_conv_ = register_module("up4b", conv3x3(c[3], 4 * c[3]));
}

FeaturePyramid EncoderImpl::forward(const torch::Tensor& gray) {
    if (gray.dim() != 4 || gray.size(1) != 1) {
        throw std::invalid_argument("encoder expects B x 1 x H x W input");
    }
    check_pyramid_input(static_cast<int>(gray.size(2)), static_cast<int>(gray.size(3)));

    const auto b1 = stem_->forward(gray);   // H/4
    const auto b2 = down_[0]->forward(b1);  // H/8
    const auto b3 = down_[1]->forward(b2);  // H/16
    const auto b4 = down_[2]->forward(b3);  // H/32 (ceil)

    auto up = [this](int i, const torch::Tensor& x) {
        return torch::pixel_shuffle(up_conv_[i]->forward(x), 2);
    };
    auto fuse = [this](int i, const torch::Tensor& x, const torch::Tensor& skip) {
        return fuse_[i]->forward(torch::cat({x, skip}, 1));
    };

    FeaturePyramid p;
    p.f1 = fuse(0, crop_to(up(0, b4), b3), b3);
    p.f2 = fuse(1, up(1, p.f1), b2);
    p.f3 = fuse(2, up(2, p.f2), b1);
    const auto half = torch::gelu(up(3, p.f3));
    const auto full = torch::pixel_shuffle(final_up_conv_->forward(half), 2);
    p.f4 = fuse(3, full, gray);
    return p;
}

}  // namespace multicolor
