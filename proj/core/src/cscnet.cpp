#include "multicolor/cscnet.hpp"

#include <stdexcept>
#include <string>

namespace multicolor {

namespace nn = torch::nn;

namespace {

constexpr int kOutputChannels = 3;

constexpr double kOutputScaleInit = 0.1;
constexpr double kOutputShiftInit = 0.5;

nn::BatchNorm2d append_conv_bn_relu(nn::Sequential& seq, int in, int out, int kernel) {
    seq->push_back(nn::Conv2d(nn::Conv2dOptions(in, out, kernel).padding(kernel / 2).bias(false)));
    nn::BatchNorm2d bn(out);
    seq->push_back(bn);
    seq->push_back(nn::ReLU());
    return bn;
}

std::int64_t conv_bn_params(int in, int out, int kernel) {
    return static_cast<std::int64_t>(in) * out * kernel * kernel + 2LL * out;
}

}  // namespace

void CscConfig::validate() const {
    if (kernel1 < 1 || kernel2 < 1 || kernel1 % 2 == 0 || kernel2 % 2 == 0) {
        throw std::invalid_argument("CSCNet kernels must be positive odd sizes");
    }
    if (repeats[0] < 1) throw std::invalid_argument("CSCNet block 1 must be present");
    for (int r : repeats) {
        if (r < 0) throw std::invalid_argument("CSCNet repeats must be non-negative");
    }
    if (num_spaces < 1) throw std::invalid_argument("CSCNet needs at least one color space");
    for (int c : block_channels) {
        if (c < 1) throw std::invalid_argument("CSCNet block widths must be positive");
    }
}

std::int64_t csc_param_count(const CscConfig& cfg) {
    cfg.validate();
    std::int64_t total = 0;
    int in = cfg.input_channels();
    for (int block = 0; block < 4; ++block) {
        const int width = cfg.block_channels[block];
        for (int r = 0; r < cfg.repeats[block]; ++r) {
            total += conv_bn_params(in, width, cfg.kernel1) + conv_bn_params(width, width, cfg.kernel2);
            in = width;
        }
    }
    total += conv_bn_params(in, cfg.block_channels[4], cfg.kernel1) +
             conv_bn_params(cfg.block_channels[4], kOutputChannels, cfg.kernel2);
    return total;
}

CscNetImpl::CscNetImpl(CscConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    nn::Sequential body;
    int in = cfg_.input_channels();
    for (int block = 0; block < 4; ++block) {
        const int width = cfg_.block_channels[block];
        for (int r = 0; r < cfg_.repeats[block]; ++r) {
            append_conv_bn_relu(body, in, width, cfg_.kernel1);
            append_conv_bn_relu(body, width, width, cfg_.kernel2);
            in = width;
        }
        if (cfg_.repeats[block] > 0) trace_.push_back(width);
    }
    append_conv_bn_relu(body, in, cfg_.block_channels[4], cfg_.kernel1);
    auto out_bn = append_conv_bn_relu(body, cfg_.block_channels[4], kOutputChannels, cfg_.kernel2);
    // Start the output inside the clamp range; a unit-variance, zero-centered
    // output leaves most pixels in the zero-gradient region of ReLU and clamp.
    {
        torch::NoGradGuard no_grad;
        out_bn->weight.fill_(kOutputScaleInit);
        out_bn->bias.fill_(kOutputShiftInit);
    }
    trace_.push_back(kOutputChannels);
    body_ = register_module("body", body);
}

std::vector<int> CscNetImpl::channel_trace() const { return trace_; }

torch::Tensor CscNetImpl::forward(const torch::Tensor& gray, const std::vector<torch::Tensor>& pairs) {
    if (pairs.empty()) throw std::invalid_argument("CSCNet: empty channel-pair list");
    if (static_cast<int>(pairs.size()) != cfg_.num_spaces) {
        throw std::invalid_argument("CSCNet: expected " + std::to_string(cfg_.num_spaces) + " channel pairs, got " +
                                    std::to_string(pairs.size()));
    }
    std::vector<torch::Tensor> inputs{gray};
    for (const auto& p : pairs) {
        if (p.dim() != 4 || p.size(1) != 2 || p.size(0) != gray.size(0) || p.size(2) != gray.size(2) ||
            p.size(3) != gray.size(3)) {
            throw std::invalid_argument("CSCNet: channel pair does not match the gray image size");
        }
        inputs.push_back(p);
    }
    return torch::clamp(body_->forward(torch::cat(inputs, 1)), 0.0, 1.0);
}

}  // namespace multicolor
