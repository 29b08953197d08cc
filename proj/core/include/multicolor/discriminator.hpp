#pragma once

#include <torch/torch.h>

namespace multicolor {

struct PatchDiscConfig {
    /// Stride-2 convolutions.
    int num_layers = 3;
    int base_channels = 64;

    void validate() const;
};

/// Logit-map side length for a square-or-not input side of `input` pixels.
/// Follows the conv arithmetic floor((n + 2p - k) / s) + 1 of every layer.
int patch_output_size(int input, const PatchDiscConfig& cfg);

/// PatchGAN: 4x4 convs, LeakyReLU(0.2), channel doubling capped at 8x, BN on
/// every layer except the first and the last. Emits B x 1 x h x w logits.
class PatchDiscriminatorImpl : public torch::nn::Module {
public:
    explicit PatchDiscriminatorImpl(PatchDiscConfig cfg);

    torch::Tensor forward(const torch::Tensor& rgb);

    [[nodiscard]] const PatchDiscConfig& config() const noexcept { return cfg_; }
    torch::nn::Conv2d& head() noexcept { return head_; }

private:
    PatchDiscConfig cfg_;
    torch::nn::Sequential body_{nullptr};
    torch::nn::Conv2d head_{nullptr};
};
TORCH_MODULE(PatchDiscriminator);

}  // namespace multicolor
