#include "multicolor/discriminator.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace multicolor {

namespace nn = torch::nn;

namespace {

constexpr int kKernel = 4;
constexpr int kPadding = 1;

int conv_out(int n, int stride) { return (n + 2 * kPadding - kKernel) / stride + 1; }

}  // namespace

void PatchDiscConfig::validate() const {
    if (num_layers < 1) throw std::invalid_argument("PatchGAN needs at least one downsampling layer");
    if (base_channels < 1) throw std::invalid_argument("PatchGAN base channels must be positive");
}

int patch_output_size(int input, const PatchDiscConfig& cfg) {
    cfg.validate();
    int n = input;
    for (int i = 0; i < cfg.num_layers; ++i) n = conv_out(n, 2);
    n = conv_out(n, 1);
    n = conv_out(n, 1);
    return n;
}

PatchDiscriminatorImpl::PatchDiscriminatorImpl(PatchDiscConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    auto conv = [](int in, int out, int stride) {
        return nn::Conv2d(nn::Conv2dOptions(in, out, kKernel).stride(stride).padding(kPadding));
    };
    auto lrelu = [] { return nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(0.2)); };

    nn::Sequential body;
    const int base = cfg_.base_channels;
    body->push_back(conv(3, base, 2));
    body->push_back(lrelu());
    int mult = 1;
    for (int n = 1; n < cfg_.num_layers; ++n) {
        const int prev = mult;
        mult = std::min(1 << n, 8);
        body->push_back(conv(base * prev, base * mult, 2));
        body->push_back(nn::BatchNorm2d(base * mult));
        body->push_back(lrelu());
    }
    const int prev = mult;
    mult = std::min(1 << cfg_.num_layers, 8);
    body->push_back(conv(base * prev, base * mult, 1));
    body->push_back(nn::BatchNorm2d(base * mult));
    body->push_back(lrelu());
    body_ = register_module("body", body);
    head_ = register_module("head", conv(base * mult, 1, 1));
}

torch::Tensor PatchDiscriminatorImpl::forward(const torch::Tensor& rgb) {
    if (rgb.dim() != 4 || rgb.size(1) != 3) throw std::invalid_argument("PatchGAN expects B x 3 x H x W");
    const int h = patch_output_size(static_cast<int>(rgb.size(2)), cfg_);
    const int w = patch_output_size(static_cast<int>(rgb.size(3)), cfg_);
    if (h < 1 || w < 1) {
        throw std::invalid_argument("PatchGAN input " + std::to_string(rgb.size(2)) + "x" +
                                    std::to_string(rgb.size(3)) + " is smaller than the receptive field");
    }
    return head_->forward(body_->forward(rgb));
}

}  // namespace multicolor
