#pragma once

#include <array>

#include <torch/torch.h>

namespace multicolor {

struct EncoderConfig {
    /// Channels of F1..F4.
    std::array<int, 4> stage_channels{512, 512, 256, 256};
    /// Backbone widths at H/4, H/8, H/16 and H/32.
    std::array<int, 4> backbone_widths{64, 128, 256, 512};
    int height = 256;
    int width = 256;

    /// Throws std::invalid_argument on non-positive channels or sizes not divisible by 16.
    void validate() const;

    static EncoderConfig paper();
    static EncoderConfig desk();
};

/// F1..F4 at H/16, H/8, H/4 and H. Each map is B x C_i x h_i x w_i.
struct FeaturePyramid {
    torch::Tensor f1, f2, f3, f4;

    [[nodiscard]] const torch::Tensor& level(int i) const;
};

/// Strided-convolution backbone followed by four upsampling stages. Each stage
/// is conv + pixel shuffle, then concatenation with the backbone feature of the
/// same resolution and a fusing conv. The last stage upsamples x4 through two
/// shuffles and concatenates the input image itself.
class EncoderImpl : public torch::nn::Module {
public:
    explicit EncoderImpl(EncoderConfig cfg);

    /// gray: B x 1 x H x W with H, W divisible by 16.
    FeaturePyramid forward(const torch::Tensor& gray);

    [[nodiscard]] const EncoderConfig& config() const noexcept { return cfg_; }

private:
    EncoderConfig cfg_;
    torch::nn::Sequential stem_{nullptr};
    std::array<torch::nn::Sequential, 3> down_{nullptr, nullptr, nullptr};
    std::array<torch::nn::Conv2d, 4> up_conv_{nullptr, nullptr, nullptr, nullptr};
    torch::nn::Conv2d final_up_conv_{nullptr};
    std::array<torch::nn::Sequential, 4> fuse_{nullptr, nullptr, nullptr, nullptr};
};
TORCH_MODULE(Encoder);

/// Throws std::invalid_argument unless both sizes are positive multiples of 16.
void check_pyramid_input(int height, int width);

}  // namespace multicolor
