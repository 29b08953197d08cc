#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "multicolor/losses.hpp"
#include "multicolor/model.hpp"

namespace multicolor {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AugmentBounds {
    double saturation_min = 0.7;
    double saturation_max = 1.3;
    /// Additive brightness shift drawn from [-brightness, brightness].
    double brightness = 0.1;
};

struct TrainConfig {
    std::int64_t iterations = 2000;
    int batch_size = 8;
    double lr = 1e-4;
    /// Discriminator learning rate; it shares the schedule and AdamW settings.
    /// A zero rate freezes the corresponding network.
    double disc_lr = 1e-4;
    double decay = 0.5;
    /// The learning rate is multiplied by `decay` at each milestone and then
    /// every `decay_every` iterations after the last one (0 disables repeats).
    std::vector<std::int64_t> milestones{80000};
    std::int64_t decay_every = 40000;
    double beta1 = 0.9;
    double beta2 = 0.99;
    double weight_decay = 0.01;
    std::uint64_t seed = 0;
    bool augment = true;
    AugmentBounds augmentation;
    /// Periodic checkpoint interval; 0 keeps only the final checkpoint.
    std::int64_t checkpoint_every = 500;
    LossWeights weights;

    void validate() const;

    static TrainConfig paper();
    static TrainConfig desk();
};

struct DataConfig {
    std::filesystem::path root;
    double split_ratio = 0.8;
    std::uint64_t split_seed = 0;
};

/// Everything needed to reproduce a run. Image size and color spaces live in
/// the model part (encoder height/width, spaces).
struct RunConfig {
    ModelConfig model;
    TrainConfig train;
    DataConfig data;

    [[nodiscard]] int image_size() const noexcept { return model.encoder.height; }
    void set_image_size(int size);
    /// Sets the spaces and the matching CSCNet input width.
    void set_color_spaces(std::vector<ColorSpace> spaces);

    /// Throws ConfigError with the offending field on failure.
    void validate() const;

    static RunConfig desk();
    static RunConfig paper();
};

inline constexpr int kConfigSchemaVersion = 1;

/// INI text with sections [meta], [data], [model], [train] and [loss]. Keys
/// missing from the text keep the values of the preset named by meta.preset
/// (desk when absent). Unknown sections or keys are rejected. Each override
/// has the form "section.key=value" and is applied after the text.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Complete INI rendering; parse_config(to_ini(c)) reproduces c exactly.
std::string to_ini(const RunConfig& config);

std::vector<ColorSpace> parse_color_space_list(const std::string& text);
std::string format_color_space_list(const std::vector<ColorSpace>& spaces);

}  // namespace multicolor
