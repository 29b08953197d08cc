#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <torch/torch.h>

namespace multicolor {

/// Five conv blocks, each repeat being conv1 -> BN -> ReLU -> conv2 -> BN -> ReLU
/// at stride 1. Block 5 always runs once and ends with 3 channels.
struct CscConfig {
    int kernel1 = 1;
    int kernel2 = 3;
    /// Repeats of blocks 1-4. Block 1 must be present; zero drops a block.
    std::array<int, 4> repeats{1, 1, 1, 1};
    int num_spaces = 3;
    /// Widths of blocks 1-4 and of block 5's first conv.
    std::array<int, 5> block_channels{32, 64, 128, 64, 32};

    void validate() const;
    [[nodiscard]] int input_channels() const noexcept { return 1 + 2 * num_spaces; }
};

/// Exact trainable parameter count (convs are bias-free; each BN adds 2 x width).
std::int64_t csc_param_count(const CscConfig& cfg);

class CscNetImpl : public torch::nn::Module {
public:
    explicit CscNetImpl(CscConfig cfg);

    /// gray: B x 1 x H x W, pairs: num_spaces tensors of B x 2 x H x W.
    /// Returns B x 3 x H x W clamped to [0,1].
    torch::Tensor forward(const torch::Tensor& gray, const std::vector<torch::Tensor>& pairs);

    /// Output channels of every block that is present, in order.
    [[nodiscard]] std::vector<int> channel_trace() const;
    [[nodiscard]] const CscConfig& config() const noexcept { return cfg_; }

private:
    CscConfig cfg_;
    torch::nn::Sequential body_{nullptr};
    std::vector<int> trace_;
};
TORCH_MODULE(CscNet);

}  // namespace multicolor
