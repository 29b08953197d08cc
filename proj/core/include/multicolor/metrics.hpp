#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "multicolor/image.hpp"

namespace multicolor {

/// 10 log10(1 / MSE) on [0,1] images; +infinity for identical inputs.
double psnr(const RgbImage& pred, const RgbImage& gt);

/// Mean colorfulness score of a non-empty set.
double cf_of_set(std::span<const RgbImage> images);

struct FrechetResult {
    double distance = 0.0;
    /// Eigenvalues below the floor (rank deficiency or round-off) that were zeroed.
    int floored_eigenvalues = 0;
};

inline constexpr double kEigenvalueFloor = 1e-10;

/// ||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a S_b)^{1/2}) with unbiased covariances.
/// Each set needs at least two vectors of equal dimension.
FrechetResult frechet_distance(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b);

/// Maps images to fixed-length embedding vectors for the Frechet distance.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::vector<double> embed(const RgbImage& img) = 0;
};

/// Frozen, seeded conv net with global average pooling. Its numbers are
/// internally comparable only; they are not Inception-based FID values.
class FixedConvEmbedder final : public Embedder {
public:
    explicit FixedConvEmbedder(std::uint64_t seed = 4321, int width = 32);
    std::vector<double> embed(const RgbImage& img) override;

private:
    torch::nn::Sequential net_{nullptr};
};

struct MetricReport {
    std::optional<double> fid;
    double cf = 0.0;
    double cf_gt = 0.0;
    double delta_cf = 0.0;
    double psnr = 0.0;
    std::size_t images = 0;
};

/// Pairs `preds[i]` with `gts[i]`. PSNR is averaged over images; when every
/// pair is identical the +infinity sentinel is kept. The embedder is optional.
MetricReport evaluate_sets(std::span<const RgbImage> preds, std::span<const RgbImage> gts, Embedder* embedder);

/// One `key=value` line per metric; infinity is written as "inf".
std::string to_key_value(const MetricReport& report);
MetricReport parse_key_value(const std::string& text);

}  // namespace multicolor
