#pragma once

#include <array>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "multicolor/colorspace.hpp"
#include "multicolor/image.hpp"

namespace multicolor {

enum class Reduction { Mean, Sum };

struct LossWeights {
    double cc = 1.0;
    double per = 5.0;
    double adv = 1.0;
    double colorfulness = 0.5;
    std::map<ColorSpace, double> per_space{
        {ColorSpace::CIELab, 0.1}, {ColorSpace::HSV, 10.0}, {ColorSpace::YUV, 10.0}};
    std::array<double, 5> stages{0.0625, 0.125, 0.25, 0.5, 1.0};
    /// Pixel reduction of the per-space L1 term.
    Reduction channel_reduction = Reduction::Mean;

    void validate() const;
    [[nodiscard]] double space_weight(ColorSpace space) const;
};

struct LossReport {
    double cc = 0.0;
    double per = 0.0;
    double adv_g = 0.0;
    double adv_d = 0.0;
    double colorfulness = 0.0;
    double total = 0.0;
};

class NonFiniteLoss : public std::runtime_error {
public:
    NonFiniteLoss(std::string term, double value);
    [[nodiscard]] const std::string& term() const noexcept { return term_; }

private:
    std::string term_;
};

/// Predicted or target channels of one color space, B x 2 x H x W.
struct ChannelTensor {
    ColorSpace space;
    torch::Tensor values;
};

/// sum_i w_i * reduce(|pred_i - target_i|). Both lists must cover the same spaces.
torch::Tensor color_channel_loss(std::span<const ChannelTensor> preds, std::span<const ChannelTensor> targets,
                                 const LossWeights& weights);
double color_channel_loss(std::span<const ChannelPair> preds, std::span<const ChannelPair> targets,
                          const LossWeights& weights);

/// Five-stage feature extractor for the perceptual term.
class FeatureExtractor {
public:
    virtual ~FeatureExtractor() = default;
    /// rgb: B x 3 x H x W in [0,1].
    virtual std::vector<torch::Tensor> extract(const torch::Tensor& rgb) = 0;
};

/// Deterministic frozen conv net shaped like the first five VGG blocks: each
/// stage records the output of its block's first conv.
class FixedConvExtractor final : public FeatureExtractor {
public:
    explicit FixedConvExtractor(std::uint64_t seed = 1234, std::array<int, 5> widths = {16, 32, 64, 64, 64});
    std::vector<torch::Tensor> extract(const torch::Tensor& rgb) override;
    void to(torch::Dtype dtype);

private:
    torch::nn::ModuleList first_{nullptr};
    torch::nn::ModuleList second_{nullptr};
};

/// sum_j w_j * mean(|phi_j(pred) - phi_j(target)|). Throws if the extractor
/// yields a stage count other than five.
torch::Tensor perceptual_loss(const torch::Tensor& pred, const torch::Tensor& target, FeatureExtractor& extractor,
                              const LossWeights& weights);

struct AdversarialLosses {
    torch::Tensor generator;
    torch::Tensor discriminator;
};

/// Non-saturating PatchGAN objective with logits:
///   D: BCE(real, 1) + BCE(fake, 0);  G: BCE(fake, 1).
AdversarialLosses adversarial_losses(const torch::Tensor& real_logits, const torch::Tensor& fake_logits);
torch::Tensor discriminator_loss(const torch::Tensor& real_logits, const torch::Tensor& fake_logits);
torch::Tensor generator_adversarial_loss(const torch::Tensor& fake_logits);

/// Hasler-Suesstrunk colorfulness on 8-bit scaled values, population statistics.
double colorfulness_score(const RgbImage& img);
/// Per-image scores of a B x 3 x H x W batch in [0,1]; differentiable.
torch::Tensor colorfulness_score(const torch::Tensor& rgb);
/// Batch mean of 1 - score / 100.
torch::Tensor colorfulness_loss(const torch::Tensor& rgb);
double colorfulness_loss(const RgbImage& img);

/// Validates every part and fills `total` with the weighted sum
/// cc*w_cc + per*w_per + adv_g*w_adv + colorfulness*w_c.
LossReport total_loss(const LossReport& parts, const LossWeights& weights);

}  // namespace multicolor
