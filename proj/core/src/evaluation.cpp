#include "multicolor/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "multicolor/tensor_bridge.hpp"

namespace multicolor {

std::vector<RgbImage> colorize_samples(Trainer& trainer, std::span<const Sample> samples, int batch_size) {
    if (batch_size < 1) throw std::invalid_argument("colorize_samples: batch size must be positive");
    std::vector<RgbImage> out;
    out.reserve(samples.size());
    for (std::size_t start = 0; start < samples.size(); start += static_cast<std::size_t>(batch_size)) {
        const std::size_t end = std::min(samples.size(), start + static_cast<std::size_t>(batch_size));
        std::vector<GrayImage> grays;
        for (std::size_t i = start; i < end; ++i) grays.push_back(samples[i].gray);
        const auto rgb = trainer.infer(stack_images(grays)).rgb;
        for (std::int64_t b = 0; b < rgb.size(0); ++b) out.push_back(rgb_from_tensor(rgb[b]));
    }
    return out;
}

double chroma_l1(std::span<const RgbImage> preds, std::span<const RgbImage> gts) {
    if (preds.empty() || preds.size() != gts.size()) {
        throw std::invalid_argument("chroma_l1: sets must be non-empty and equal in size");
    }
    constexpr ColorSpace kSpaces[] = {ColorSpace::CIELab, ColorSpace::HSV, ColorSpace::YUV};
    double total = 0.0;
    for (ColorSpace space : kSpaces) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < preds.size(); ++i) {
            if (!preds[i].same_shape(gts[i])) throw std::invalid_argument("chroma_l1: shape mismatch");
            const auto pa = extract_color_channels(preds[i], space);
            const auto pb = extract_color_channels(gts[i], space);
            const auto a = pa.channels.data();
            const auto b = pb.channels.data();
            for (std::size_t k = 0; k < a.size(); ++k) sum += std::abs(static_cast<double>(a[k]) - b[k]);
            count += a.size();
        }
        total += sum / static_cast<double>(count);
    }
    return total / 3.0;
}

Evaluation evaluate_samples(Trainer& trainer, std::span<const Sample> samples, Embedder* embedder) {
    if (samples.empty()) throw std::invalid_argument("evaluate_samples: no samples");
    const auto preds = colorize_samples(trainer, samples);
    std::vector<RgbImage> gts;
    for (const auto& s : samples) gts.push_back(s.rgb);
    Evaluation e;
    e.metrics = evaluate_sets(preds, gts, embedder);
    e.chroma_l1 = chroma_l1(preds, gts);
    return e;
}

}  // namespace multicolor
