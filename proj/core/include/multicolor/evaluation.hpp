#pragma once

#include <span>
#include <vector>

#include "multicolor/data.hpp"
#include "multicolor/metrics.hpp"
#include "multicolor/trainer.hpp"

namespace multicolor {

/// Colorizes the gray channel of every sample with the generator in eval mode.
std::vector<RgbImage> colorize_samples(Trainer& trainer, std::span<const Sample> samples, int batch_size = 8);

/// Space-independent chroma error: for each of CIELab, HSV and YUV, the mean
/// absolute difference of the normalized chroma pairs of `preds` and `gts`,
/// averaged over the three spaces without loss weights.
double chroma_l1(std::span<const RgbImage> preds, std::span<const RgbImage> gts);

struct Evaluation {
    MetricReport metrics;
    double chroma_l1 = 0.0;
};

/// Colorizes `samples` and scores them against their RGB originals.
Evaluation evaluate_samples(Trainer& trainer, std::span<const Sample> samples, Embedder* embedder);

}  // namespace multicolor
