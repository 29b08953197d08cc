#include "multicolor/losses.hpp"

#include <cmath>
#include <set>

#include <ATen/CPUGeneratorImpl.h>

#include "multicolor/tensor_bridge.hpp"

namespace multicolor {

namespace nn = torch::nn;
namespace F = torch::nn::functional;

void LossWeights::validate() const {
    auto check = [](double v, const char* name) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string("loss weight ") + name + " must be finite and non-negative");
        }
    };
    check(cc, "cc");
    check(per, "per");
    check(adv, "adv");
    check(colorfulness, "colorfulness");
    for (const auto& [space, w] : per_space) check(w, "per_space");
    for (double w : stages) check(w, "stage");
}

double LossWeights::space_weight(ColorSpace space) const {
    const auto it = per_space.find(space);
    if (it == per_space.end()) {
        throw std::invalid_argument("no loss weight for color space " + std::string(to_string(space)));
    }
    return it->second;
}

NonFiniteLoss::NonFiniteLoss(std::string term, double value)
    : std::runtime_error("non-finite loss term '" + term + "' (" + std::to_string(value) + ")"),
      term_(std::move(term)) {}

torch::Tensor color_channel_loss(std::span<const ChannelTensor> preds, std::span<const ChannelTensor> targets,
                                 const LossWeights& weights) {
    if (preds.size() != targets.size() || preds.empty()) {
        throw std::invalid_argument("color_channel_loss: prediction and target space sets differ");
    }
    std::set<ColorSpace> seen;
    torch::Tensor total;
    for (const auto& pred : preds) {
        if (!seen.insert(pred.space).second) {
            throw std::invalid_argument("color_channel_loss: duplicate color space");
        }
        const ChannelTensor* target = nullptr;
        for (const auto& t : targets) {
            if (t.space == pred.space) target = &t;
        }
        if (target == nullptr) throw std::invalid_argument("color_channel_loss: prediction and target space sets differ");
        if (!pred.values.sizes().equals(target->values.sizes())) {
            throw std::invalid_argument("color_channel_loss: shape mismatch");
        }
        auto diff = torch::abs(pred.values - target->values);
        auto term = weights.channel_reduction == Reduction::Mean ? diff.mean() : diff.sum();
        term = term * weights.space_weight(pred.space);
        total = total.defined() ? total + term : term;
    }
    return total;
}

double color_channel_loss(std::span<const ChannelPair> preds, std::span<const ChannelPair> targets,
                          const LossWeights& weights) {
    std::vector<ChannelTensor> p, t;
    for (const auto& x : preds) p.push_back({x.space, to_tensor(x).to(torch::kFloat64)});
    for (const auto& x : targets) t.push_back({x.space, to_tensor(x).to(torch::kFloat64)});
    return color_channel_loss(p, t, weights).item<double>();
}

FixedConvExtractor::FixedConvExtractor(std::uint64_t seed, std::array<int, 5> widths) {
    // Weights come from a private generator so construction never disturbs the
    // global RNG stream.
    auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
    first_ = nn::ModuleList();
    second_ = nn::ModuleList();
    int in = 3;
    for (int w : widths) {
        auto a = nn::Conv2d(nn::Conv2dOptions(in, w, 3).padding(1));
        auto b = nn::Conv2d(nn::Conv2dOptions(w, w, 3).padding(1));
        torch::NoGradGuard no_grad;
        for (auto* conv : {&a, &b}) {
            const double fan_in = static_cast<double>((*conv)->weight.size(1) * 9);
            (*conv)->weight.normal_(0.0, std::sqrt(2.0 / fan_in), gen);
            (*conv)->bias.zero_();
            for (auto& p : (*conv)->parameters()) p.set_requires_grad(false);
        }
        first_->push_back(a);
        second_->push_back(b);
        in = w;
    }
}

void FixedConvExtractor::to(torch::Dtype dtype) {
    first_->to(dtype);
    second_->to(dtype);
}

std::vector<torch::Tensor> FixedConvExtractor::extract(const torch::Tensor& rgb) {
    std::vector<torch::Tensor> stages;
    auto x = rgb;
    for (std::size_t j = 0; j < first_->size(); ++j) {
        if (j > 0) x = F::max_pool2d(x, F::MaxPool2dFuncOptions(2));
        x = first_[j]->as<nn::Conv2d>()->forward(x);
        stages.push_back(x);
        x = torch::relu(second_[j]->as<nn::Conv2d>()->forward(torch::relu(x)));
    }
    return stages;
}

torch::Tensor perceptual_loss(const torch::Tensor& pred, const torch::Tensor& target, FeatureExtractor& extractor,
                              const LossWeights& weights) {
    const auto fp = extractor.extract(pred);
    std::vector<torch::Tensor> ft;
    {
        torch::NoGradGuard no_grad;
        ft = extractor.extract(target);
    }
    if (fp.size() != 5 || ft.size() != 5) {
        throw std::invalid_argument("perceptual_loss: extractor must yield exactly 5 stages");
    }
    auto total = torch::zeros({}, pred.options());
    for (std::size_t j = 0; j < 5; ++j) {
        if (weights.stages[j] == 0.0) continue;
        total = total + weights.stages[j] * torch::abs(fp[j] - ft[j]).mean();
    }
    return total;
}

torch::Tensor discriminator_loss(const torch::Tensor& real_logits, const torch::Tensor& fake_logits) {
    return F::binary_cross_entropy_with_logits(real_logits, torch::ones_like(real_logits)) +
           F::binary_cross_entropy_with_logits(fake_logits, torch::zeros_like(fake_logits));
}

torch::Tensor generator_adversarial_loss(const torch::Tensor& fake_logits) {
    return F::binary_cross_entropy_with_logits(fake_logits, torch::ones_like(fake_logits));
}

AdversarialLosses adversarial_losses(const torch::Tensor& real_logits, const torch::Tensor& fake_logits) {
    return {generator_adversarial_loss(fake_logits), discriminator_loss(real_logits, fake_logits)};
}

double colorfulness_score(const RgbImage& img) {
    const std::size_t n = img.pixel_count();
    if (n == 0) return 0.0;
    double sum_rg = 0.0, sum_yb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = img.pixel(i);
        const double r = 255.0 * p[0], g = 255.0 * p[1], b = 255.0 * p[2];
        sum_rg += r - g;
        sum_yb += 0.5 * (r + g) - b;
    }
    const double mu_rg = sum_rg / n;
    const double mu_yb = sum_yb / n;
    double var_rg = 0.0, var_yb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = img.pixel(i);
        const double r = 255.0 * p[0], g = 255.0 * p[1], b = 255.0 * p[2];
        var_rg += std::pow(r - g - mu_rg, 2);
        var_yb += std::pow(0.5 * (r + g) - b - mu_yb, 2);
    }
    var_rg /= n;
    var_yb /= n;
    return std::sqrt(var_rg + var_yb) + 0.3 * std::sqrt(mu_rg * mu_rg + mu_yb * mu_yb);
}

namespace {

// sqrt with a zero (rather than infinite) derivative at 0, so an achromatic
// image yields finite gradients and an exact score of 0.
torch::Tensor safe_sqrt(const torch::Tensor& x) {
    const auto positive = x > 0;
    return torch::where(positive, torch::sqrt(torch::where(positive, x, torch::ones_like(x))),
                        torch::zeros_like(x));
}

}  // namespace

torch::Tensor colorfulness_score(const torch::Tensor& rgb) {
    if (rgb.dim() != 4 || rgb.size(1) != 3) throw std::invalid_argument("colorfulness: expected B x 3 x H x W");
    const auto scaled = rgb * 255.0;
    const auto r = scaled.select(1, 0).flatten(1);
    const auto g = scaled.select(1, 1).flatten(1);
    const auto b = scaled.select(1, 2).flatten(1);
    const auto rg = r - g;
    const auto yb = 0.5 * (r + g) - b;
    const auto mu_rg = rg.mean(1);
    const auto mu_yb = yb.mean(1);
    const auto var_rg = (rg - mu_rg.unsqueeze(1)).pow(2).mean(1);
    const auto var_yb = (yb - mu_yb.unsqueeze(1)).pow(2).mean(1);
    return safe_sqrt(var_rg + var_yb) + 0.3 * safe_sqrt(mu_rg.pow(2) + mu_yb.pow(2));
}

torch::Tensor colorfulness_loss(const torch::Tensor& rgb) {
    return (1.0 - colorfulness_score(rgb) / 100.0).mean();
}

double colorfulness_loss(const RgbImage& img) { return 1.0 - colorfulness_score(img) / 100.0; }

LossReport total_loss(const LossReport& parts, const LossWeights& weights) {
    const std::pair<const char*, double> terms[] = {{"cc", parts.cc},
                                                    {"per", parts.per},
                                                    {"adv_g", parts.adv_g},
                                                    {"adv_d", parts.adv_d},
                                                    {"colorfulness", parts.colorfulness}};
    for (const auto& [name, value] : terms) {
        if (!std::isfinite(value)) throw NonFiniteLoss(name, value);
    }
    LossReport report = parts;
    report.total = weights.cc * parts.cc + weights.per * parts.per + weights.adv * parts.adv_g +
                   weights.colorfulness * parts.colorfulness;
    return report;
}

}  // namespace multicolor
