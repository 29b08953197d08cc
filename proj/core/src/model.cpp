#include "multicolor/model.hpp"

#include <array>
#include <set>
#include <stdexcept>

namespace multicolor {

void ModelConfig::validate() const {
    encoder.validate();
    decoder.validate();
    csc.validate();
    discriminator.validate();
    if (spaces.empty()) throw std::invalid_argument("at least one color space is required");
    if (std::set<ColorSpace>(spaces.begin(), spaces.end()).size() != spaces.size()) {
        throw std::invalid_argument("color spaces must be distinct");
    }
    if (csc.num_spaces != static_cast<int>(spaces.size())) {
        throw std::invalid_argument("CSCNet space count does not match the configured color spaces");
    }
    if (encoder.stage_channels[3] != decoder.dim) {
        throw std::invalid_argument("F4 channels must equal the query width");
    }
    for (int level : decoder.levels) {
        if (encoder.stage_channels[level] % 4 != 0) {
            throw std::invalid_argument("decoder feature levels need channel counts divisible by 4");
        }
    }
}

ModelConfig ModelConfig::paper() {
    ModelConfig cfg;
    cfg.encoder = EncoderConfig::paper();
    cfg.decoder = DecoderConfig::paper();
    return cfg;
}

ModelConfig ModelConfig::desk() {
    ModelConfig cfg;
    cfg.encoder = EncoderConfig::desk();
    cfg.decoder = DecoderConfig::desk();
    cfg.discriminator.base_channels = 32;
    return cfg;
}

std::string MultiColorNetImpl::module_name(ColorSpace space) { return "color_" + std::string(to_string(space)); }

MultiColorNetImpl::MultiColorNetImpl(ModelConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    encoder_ = register_module("encoder", Encoder(cfg_.encoder));
    const auto& sc = cfg_.encoder.stage_channels;
    for (ColorSpace space : cfg_.spaces) {
        modules_.push_back(
            register_module(module_name(space), ColorizationModule(cfg_.decoder, std::array<int, 3>{sc[0], sc[1], sc[2]}, sc[3])));
    }
    csc_ = register_module("csc", CscNet(cfg_.csc));
}

GeneratorOutput MultiColorNetImpl::forward(const torch::Tensor& gray) {
    const FeaturePyramid pyramid = encoder_->forward(gray);
    GeneratorOutput out;
    for (auto& module : modules_) out.pairs.push_back(module->forward(pyramid));
    out.rgb = csc_->forward(gray, out.pairs);
    return out;
}

}  // namespace multicolor
