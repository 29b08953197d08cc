#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "multicolor/config.hpp"
#include "multicolor/data.hpp"
#include "multicolor/discriminator.hpp"
#include "multicolor/losses.hpp"
#include "multicolor/model.hpp"

namespace multicolor {

/// base * decay^k, where k counts the milestones reached by `iteration` plus the
/// repeats every `decay_every` iterations after the last milestone.
double learning_rate_at(double base, const TrainConfig& cfg, std::int64_t iteration);

/// Saturation scaling about the BT.601 luma followed by a uniform brightness
/// shift, both drawn from `seed`; the result is clamped to [0,1].
RgbImage color_augment(const RgbImage& img, std::uint64_t seed, const AugmentBounds& bounds);

/// Tensors of one training batch.
struct Batch {
    torch::Tensor rgb;    // B x 3 x H x W
    torch::Tensor gray;   // B x 1 x H x W
    std::vector<ChannelTensor> targets;
};

/// Builds a batch from prepared samples. Every sample must carry one pair per
/// space of `spaces`, in that order.
Batch make_batch(std::span<const Sample> samples, std::span<const ColorSpace> spaces);

/// Generator, discriminator, their AdamW optimizers and the frozen perceptual
/// extractor. Construction seeds the global torch generator with the train seed.
class Trainer {
public:
    explicit Trainer(RunConfig config);

    /// One discriminator update followed by one generator update. A non-finite
    /// term throws NonFiniteLoss naming it; no update uses a non-finite loss.
    LossReport step(const Batch& batch);

    /// Generator forward in eval mode without gradients.
    GeneratorOutput infer(const torch::Tensor& gray);

    /// Single-file archive: manifest (format version, iteration, config text),
    /// named parameters and buffers of both networks, optimizer states and the
    /// global torch RNG state.
    void save(const std::filesystem::path& path);
    static std::unique_ptr<Trainer> load(const std::filesystem::path& path);
    /// Reads only the config snapshot stored in a checkpoint.
    static RunConfig read_config(const std::filesystem::path& path);

    [[nodiscard]] const RunConfig& config() const noexcept { return config_; }
    [[nodiscard]] std::int64_t iteration() const noexcept { return iteration_; }
    MultiColorNet& generator() noexcept { return generator_; }
    PatchDiscriminator& discriminator() noexcept { return discriminator_; }
    [[nodiscard]] double generator_lr() const;

private:
    void apply_schedule();

    RunConfig config_;
    MultiColorNet generator_{nullptr};
    PatchDiscriminator discriminator_{nullptr};
    FixedConvExtractor extractor_;
    std::unique_ptr<torch::optim::AdamW> opt_g_;
    std::unique_ptr<torch::optim::AdamW> opt_d_;
    std::int64_t iteration_ = 0;
};

inline constexpr int kCheckpointFormatVersion = 1;

struct TrainingResult {
    std::filesystem::path checkpoint;
    std::filesystem::path loss_curve;
    std::vector<LossReport> losses;
};

/// Training indices of iteration `iteration`: a cyclic walk over the training
/// split, reshuffled with `seed` at the start of every pass.
std::vector<std::size_t> batch_indices(std::size_t train_count, int batch_size, std::int64_t iteration,
                                       std::uint64_t seed);

/// Continues `trainer` until config.train.iterations. Writes
/// `out_dir/loss_curve.csv` (appending when resuming), periodic
/// `checkpoint_<iter>.pt` files and `out_dir/checkpoint.pt`.
TrainingResult run_training(Trainer& trainer, DatasetManifest& manifest, const std::filesystem::path& out_dir);

}  // namespace multicolor
