#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <torch/torch.h>

#include "multicolor/encoder.hpp"

namespace multicolor {

struct DecoderConfig {
    /// Number of passes over the visited feature levels (L/3 for the default levels).
    int num_rounds = 3;
    int heads = 8;
    int ffn_dim = 1024;
    /// Query embedding width C. Must equal the channel count of F4.
    int dim = 256;
    int num_queries = 100;
    /// Pyramid levels visited per round, as indices into (F1, F2, F3).
    std::vector<int> levels{0, 1, 2};

    void validate() const;

    static DecoderConfig paper();
    static DecoderConfig desk();
};

/// 2D sinusoidal encoding, channels x height x width. channels % 4 == 0.
torch::Tensor sinusoidal_position_encoding(int channels, int height, int width,
                                           torch::TensorOptions options = {});

/// softmax(q k^T / sqrt(d)) v over `heads` independent heads.
/// q: B x N x C, k and v: B x M x C.
torch::Tensor multi_head_attention(const torch::Tensor& q, const torch::Tensor& k, const torch::Tensor& v,
                                   int heads);

/// One query refinement layer:
///   X'  = CA(f_Q(X), f_K(F), f_V(F)) + X
///   X'' = MHSA(LN(X')) + X'
///   out = LN(FFN(LN(X'')) + X'')
/// Positional encodings are added to the key input only.
class DecoderLayerImpl : public torch::nn::Module {
public:
    DecoderLayerImpl(int dim, int feature_channels, int heads, int ffn_dim);

    /// queries: B x N x C, features: B x C_j x h x w.
    torch::Tensor forward(const torch::Tensor& queries, const torch::Tensor& features);

    torch::Tensor cross_attention(const torch::Tensor& queries, const torch::Tensor& features);

    [[nodiscard]] int feature_channels() const noexcept { return feature_channels_; }

private:
    int dim_;
    int feature_channels_;
    int heads_;
    torch::nn::Linear f_q_{nullptr}, f_k_{nullptr}, f_v_{nullptr}, ca_out_{nullptr};
    torch::nn::Linear sa_q_{nullptr}, sa_k_{nullptr}, sa_v_{nullptr}, sa_out_{nullptr};
    torch::nn::Linear ffn1_{nullptr}, ffn2_{nullptr};
    torch::nn::LayerNorm ln_sa_{nullptr}, ln_ffn_{nullptr}, ln_out_{nullptr};
};
TORCH_MODULE(DecoderLayer);

/// y = tanh(Conv1x1(X . F4)). Queries and F4 share the channel width C.
class ColorMapperImpl : public torch::nn::Module {
public:
    ColorMapperImpl(int num_queries, int dim);

    /// queries: B x N x C, f4: B x C x H x W -> B x N x H x W correlation volume.
    static torch::Tensor correlation(const torch::Tensor& queries, const torch::Tensor& f4);
    /// -> B x 2 x H x W in (-1, 1).
    torch::Tensor forward(const torch::Tensor& queries, const torch::Tensor& f4);

    torch::nn::Conv2d& projection() noexcept { return proj_; }

private:
    int num_queries_;
    int dim_;
    torch::nn::Conv2d proj_{nullptr};
};
TORCH_MODULE(ColorMapper);

/// Learnable color queries, the refining decoder and the color mapper for one
/// color space.
class ColorizationModuleImpl : public torch::nn::Module {
public:
    /// feature_channels: channels of F1, F2, F3. f4_channels must equal cfg.dim.
    ColorizationModuleImpl(DecoderConfig cfg, std::array<int, 3> feature_channels, int f4_channels);

    /// Runs the decoder layers over the level cycle, num_rounds times.
    torch::Tensor refine_queries(const FeaturePyramid& pyramid);
    /// Refined queries from explicit initial embeddings (B x N x C).
    torch::Tensor refine_queries(const torch::Tensor& initial, const FeaturePyramid& pyramid);

    /// -> B x 2 x H x W normalized channel pair.
    torch::Tensor forward(const FeaturePyramid& pyramid);

    [[nodiscard]] const DecoderConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] std::size_t layer_count() const noexcept { return layers_.size(); }
    /// Layer applications performed by the most recent refinement.
    [[nodiscard]] std::size_t last_layer_applications() const noexcept { return last_applications_; }
    /// Pyramid level consumed by each layer, in order.
    [[nodiscard]] std::vector<int> level_schedule() const;

    torch::Tensor& queries() noexcept { return queries_; }
    ColorMapper& mapper() noexcept { return mapper_; }
    DecoderLayer& layer(std::size_t i) { return layers_.at(i); }

private:
    DecoderConfig cfg_;
    torch::Tensor queries_;
    std::vector<DecoderLayer> layers_;
    ColorMapper mapper_{nullptr};
    std::size_t last_applications_ = 0;
};
TORCH_MODULE(ColorizationModule);

}  // namespace multicolor
