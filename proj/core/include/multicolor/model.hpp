#pragma once

#include <string>
#include <vector>

#include <torch/torch.h>

#include "multicolor/colorization_module.hpp"
#include "multicolor/colorspace.hpp"
#include "multicolor/cscnet.hpp"
#include "multicolor/discriminator.hpp"
#include "multicolor/encoder.hpp"

namespace multicolor {

struct ModelConfig {
    EncoderConfig encoder;
    DecoderConfig decoder;
    CscConfig csc;
    PatchDiscConfig discriminator;
    std::vector<ColorSpace> spaces{ColorSpace::CIELab, ColorSpace::HSV, ColorSpace::YUV};

    /// Validates every part plus the cross-module contracts (F4 width equals the
    /// query width, CSCNet input matches the space count, no duplicate spaces).
    void validate() const;

    static ModelConfig paper();
    static ModelConfig desk();
};

struct GeneratorOutput {
    /// One B x 2 x H x W normalized pair per configured space, in config order.
    std::vector<torch::Tensor> pairs;
    /// B x 3 x H x W in [0,1].
    torch::Tensor rgb;
};

/// Encoder, one colorization module per color space, and CSCNet.
class MultiColorNetImpl : public torch::nn::Module {
public:
    explicit MultiColorNetImpl(ModelConfig cfg);

    /// gray: B x 1 x H x W.
    GeneratorOutput forward(const torch::Tensor& gray);

    [[nodiscard]] const ModelConfig& config() const noexcept { return cfg_; }
    Encoder& encoder() noexcept { return encoder_; }
    CscNet& csc() noexcept { return csc_; }
    ColorizationModule& module_for(std::size_t i) { return modules_.at(i); }
    [[nodiscard]] std::size_t module_count() const noexcept { return modules_.size(); }

    /// Registered name of the colorization module of a space, e.g. "color_lab".
    static std::string module_name(ColorSpace space);

private:
    ModelConfig cfg_;
    Encoder encoder_{nullptr};
    std::vector<ColorizationModule> modules_;
    CscNet csc_{nullptr};
};
TORCH_MODULE(MultiColorNet);

}  // namespace multicolor
