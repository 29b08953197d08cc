#include "multicolor/colorization_module.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace multicolor {

namespace nn = torch::nn;

void DecoderConfig::validate() const {
    if (num_rounds < 1) throw std::invalid_argument("decoder num_rounds must be >= 1");
    if (heads < 1 || dim < 1 || dim % heads != 0) {
        throw std::invalid_argument("decoder dim must be a positive multiple of heads");
    }
    if (ffn_dim < 1 || num_queries < 1) throw std::invalid_argument("decoder ffn_dim and num_queries must be positive");
    if (levels.empty()) throw std::invalid_argument("decoder must visit at least one feature level");
    for (int l : levels) {
        if (l < 0 || l > 2) throw std::invalid_argument("decoder levels must index F1..F3");
    }
}

DecoderConfig DecoderConfig::paper() { return DecoderConfig{}; }

DecoderConfig DecoderConfig::desk() {
    DecoderConfig cfg;
    cfg.heads = 4;
    cfg.dim = 32;
    cfg.ffn_dim = 4 * cfg.dim;
    return cfg;
}

torch::Tensor sinusoidal_position_encoding(int channels, int height, int width, torch::TensorOptions options) {
    if (channels % 4 != 0) throw std::invalid_argument("position encoding channels must be divisible by 4");
    const int quarter = channels / 4;
    auto opts = options.requires_grad(false);
    auto freq = torch::exp(torch::arange(quarter, opts) * (-std::log(10000.0) / quarter));
    auto ys = torch::arange(height, opts).unsqueeze(1) * freq;  // h x q
    auto xs = torch::arange(width, opts).unsqueeze(1) * freq;   // w x q
    auto y_enc = torch::cat({ys.sin(), ys.cos()}, 1).t().unsqueeze(2).expand({2 * quarter, height, width});
    auto x_enc = torch::cat({xs.sin(), xs.cos()}, 1).t().unsqueeze(1).expand({2 * quarter, height, width});
    return torch::cat({y_enc, x_enc}, 0);
}

torch::Tensor multi_head_attention(const torch::Tensor& q, const torch::Tensor& k, const torch::Tensor& v,
                                   int heads) {
    const auto batch = q.size(0);
    const auto n = q.size(1);
    const auto m = k.size(1);
    const auto dim = q.size(2);
    if (k.size(2) != dim || v.size(2) != dim || v.size(1) != m || dim % heads != 0) {
        throw std::invalid_argument("multi_head_attention: dimension mismatch");
    }
    const auto head_dim = dim / heads;
    auto split = [&](const torch::Tensor& t, int64_t len) {
        return t.reshape({batch, len, heads, head_dim}).transpose(1, 2);
    };
    auto scores = torch::matmul(split(q, n), split(k, m).transpose(-2, -1)) / std::sqrt(double(head_dim));
    auto out = torch::matmul(torch::softmax(scores, -1), split(v, m));
    return out.transpose(1, 2).reshape({batch, n, dim});
}

DecoderLayerImpl::DecoderLayerImpl(int dim, int feature_channels, int heads, int ffn_dim)
    : dim_(dim), feature_channels_(feature_channels), heads_(heads) {
    f_q_ = register_module("f_q", nn::Linear(dim, dim));
    f_k_ = register_module("f_k", nn::Linear(feature_channels, dim));
    f_v_ = register_module("f_v", nn::Linear(feature_channels, dim));
    ca_out_ = register_module("ca_out", nn::Linear(dim, dim));
    sa_q_ = register_module("sa_q", nn::Linear(dim, dim));
    sa_k_ = register_module("sa_k", nn::Linear(dim, dim));
    sa_v_ = register_module("sa_v", nn::Linear(dim, dim));
    sa_out_ = register_module("sa_out", nn::Linear(dim, dim));
    ffn1_ = register_module("ffn1", nn::Linear(dim, ffn_dim));
    ffn2_ = register_module("ffn2", nn::Linear(ffn_dim, dim));
    ln_sa_ = register_module("ln_sa", nn::LayerNorm(nn::LayerNormOptions({dim})));
    ln_ffn_ = register_module("ln_ffn", nn::LayerNorm(nn::LayerNormOptions({dim})));
    ln_out_ = register_module("ln_out", nn::LayerNorm(nn::LayerNormOptions({dim})));
}

torch::Tensor DecoderLayerImpl::cross_attention(const torch::Tensor& queries, const torch::Tensor& features) {
    if (features.dim() != 4 || features.size(1) != feature_channels_ || queries.size(2) != dim_) {
        throw std::invalid_argument("decoder layer: feature/query channel mismatch");
    }
    const auto h = features.size(2);
    const auto w = features.size(3);
    auto tokens = features.flatten(2).transpose(1, 2);  // B x hw x C_j
    auto pos = sinusoidal_position_encoding(feature_channels_, static_cast<int>(h), static_cast<int>(w),
                                            features.options())
                   .flatten(1)
                   .t()
                   .unsqueeze(0);
    auto attended = multi_head_attention(f_q_->forward(queries), f_k_->forward(tokens + pos),
                                         f_v_->forward(tokens), heads_);
    return ca_out_->forward(attended);
}

torch::Tensor DecoderLayerImpl::forward(const torch::Tensor& queries, const torch::Tensor& features) {
    auto x1 = cross_attention(queries, features) + queries;
    auto s = ln_sa_->forward(x1);
    auto x2 = sa_out_->forward(multi_head_attention(sa_q_->forward(s), sa_k_->forward(s), sa_v_->forward(s),
                                                    heads_)) +
              x1;
    auto ffn = ffn2_->forward(torch::relu(ffn1_->forward(ln_ffn_->forward(x2))));
    return ln_out_->forward(ffn + x2);
}

ColorMapperImpl::ColorMapperImpl(int num_queries, int dim) : num_queries_(num_queries), dim_(dim) {
    proj_ = register_module("proj", nn::Conv2d(nn::Conv2dOptions(num_queries, 2, 1)));
    // Small weights keep tanh out of saturation at initialization.
    torch::NoGradGuard no_grad;
    proj_->weight.normal_(0.0, 0.01);
    proj_->bias.zero_();
}

torch::Tensor ColorMapperImpl::correlation(const torch::Tensor& queries, const torch::Tensor& f4) {
    if (queries.dim() != 3 || f4.dim() != 4 || queries.size(2) != f4.size(1) || queries.size(0) != f4.size(0)) {
        throw std::invalid_argument("color mapper: query width must match F4 channels");
    }
    return torch::einsum("bnc,bchw->bnhw", {queries, f4});
}

torch::Tensor ColorMapperImpl::forward(const torch::Tensor& queries, const torch::Tensor& f4) {
    if (queries.size(1) != num_queries_ || queries.size(2) != dim_) {
        throw std::invalid_argument("color mapper: unexpected query set shape");
    }
    // Scaled like dot-product attention. Unscaled inner products grow with C and,
    // summed over N queries, let a single Adam step push tanh into saturation.
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim_));
    return torch::tanh(proj_->forward(correlation(queries, f4) * scale));
}

ColorizationModuleImpl::ColorizationModuleImpl(DecoderConfig cfg, std::array<int, 3> feature_channels,
                                               int f4_channels)
    : cfg_(std::move(cfg)) {
    cfg_.validate();
    if (f4_channels != cfg_.dim) {
        throw std::invalid_argument("colorization module: F4 channels (" + std::to_string(f4_channels) +
                                    ") must equal query width (" + std::to_string(cfg_.dim) + ")");
    }
    queries_ = register_parameter("queries", torch::randn({cfg_.num_queries, cfg_.dim}));
    std::size_t index = 0;
    for (int round = 0; round < cfg_.num_rounds; ++round) {
        for (int level : cfg_.levels) {
            layers_.push_back(register_module(
                "layer" + std::to_string(index++),
                DecoderLayer(cfg_.dim, feature_channels[level], cfg_.heads, cfg_.ffn_dim)));
        }
    }
    mapper_ = register_module("mapper", ColorMapper(cfg_.num_queries, cfg_.dim));
}

std::vector<int> ColorizationModuleImpl::level_schedule() const {
    std::vector<int> schedule;
    for (int round = 0; round < cfg_.num_rounds; ++round) {
        schedule.insert(schedule.end(), cfg_.levels.begin(), cfg_.levels.end());
    }
    return schedule;
}

torch::Tensor ColorizationModuleImpl::refine_queries(const torch::Tensor& initial, const FeaturePyramid& pyramid) {
    const auto schedule = level_schedule();
    auto x = initial;
    last_applications_ = 0;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        x = layers_[i]->forward(x, pyramid.level(schedule[i]));
        ++last_applications_;
    }
    return x;
}

torch::Tensor ColorizationModuleImpl::refine_queries(const FeaturePyramid& pyramid) {
    const auto batch = pyramid.f4.size(0);
    return refine_queries(queries_.unsqueeze(0).expand({batch, cfg_.num_queries, cfg_.dim}), pyramid);
}

torch::Tensor ColorizationModuleImpl::forward(const FeaturePyramid& pyramid) {
    return mapper_->forward(refine_queries(pyramid), pyramid.f4);
}

}  // namespace multicolor
