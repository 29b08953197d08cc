#include "multicolor/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <random>

#include <ATen/CPUGeneratorImpl.h>
#include <json.hpp>

#include "multicolor/tensor_bridge.hpp"

namespace multicolor {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

void set_lr(torch::optim::AdamW& opt, double lr) {
    for (auto& group : opt.param_groups()) static_cast<torch::optim::AdamWOptions&>(group.options()).lr(lr);
}

std::unique_ptr<torch::optim::AdamW> make_optimizer(std::vector<torch::Tensor> params, double lr,
                                                    const TrainConfig& cfg) {
    return std::make_unique<torch::optim::AdamW>(
        std::move(params),
        torch::optim::AdamWOptions(lr).betas({cfg.beta1, cfg.beta2}).weight_decay(cfg.weight_decay));
}

double checked(const torch::Tensor& t, const char* term) {
    const double v = t.item<double>();
    if (!std::isfinite(v)) throw NonFiniteLoss(term, v);
    return v;
}

}  // namespace

double learning_rate_at(double base, const TrainConfig& cfg, std::int64_t iteration) {
    std::int64_t k = 0;
    for (std::int64_t m : cfg.milestones) {
        if (iteration >= m) ++k;
    }
    if (!cfg.milestones.empty() && cfg.decay_every > 0 && iteration >= cfg.milestones.back()) {
        k += (iteration - cfg.milestones.back()) / cfg.decay_every;
    }
    return base * std::pow(cfg.decay, static_cast<double>(k));
}

RgbImage color_augment(const RgbImage& img, std::uint64_t seed, const AugmentBounds& bounds) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double saturation = bounds.saturation_min + (bounds.saturation_max - bounds.saturation_min) * unit(rng);
    const double shift = bounds.brightness * (2.0 * unit(rng) - 1.0);
    RgbImage out(img.height(), img.width());
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        const auto src = img.pixel(i);
        auto dst = out.pixel(i);
        const double y = luma({src[0], src[1], src[2]});
        for (int c = 0; c < 3; ++c) {
            const double v = y + saturation * (src[c] - y) + shift;
            dst[c] = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    }
    return out;
}

Batch make_batch(std::span<const Sample> samples, std::span<const ColorSpace> spaces) {
    if (samples.empty()) throw std::invalid_argument("make_batch: empty batch");
    std::vector<RgbImage> rgb;
    std::vector<GrayImage> gray;
    std::vector<std::vector<ChannelPair>> pairs(spaces.size());
    for (const auto& s : samples) {
        if (s.pairs.size() != spaces.size()) throw std::invalid_argument("make_batch: sample/space count mismatch");
        rgb.push_back(s.rgb);
        gray.push_back(s.gray);
        for (std::size_t k = 0; k < spaces.size(); ++k) {
            if (s.pairs[k].space != spaces[k]) throw std::invalid_argument("make_batch: space order mismatch");
            pairs[k].push_back(s.pairs[k]);
        }
    }
    Batch b;
    b.rgb = stack_images(std::span<const RgbImage>(rgb));
    b.gray = stack_images(std::span<const GrayImage>(gray));
    for (std::size_t k = 0; k < spaces.size(); ++k) {
        b.targets.push_back({spaces[k], stack_pairs(std::span<const ChannelPair>(pairs[k]))});
    }
    return b;
}

Trainer::Trainer(RunConfig config) : config_(std::move(config)) {
    config_.validate();
    torch::manual_seed(config_.train.seed);
    generator_ = MultiColorNet(config_.model);
    discriminator_ = PatchDiscriminator(config_.model.discriminator);
    opt_g_ = make_optimizer(generator_->parameters(), config_.train.lr, config_.train);
    opt_d_ = make_optimizer(discriminator_->parameters(), config_.train.disc_lr, config_.train);
}

double Trainer::generator_lr() const { return learning_rate_at(config_.train.lr, config_.train, iteration_); }

void Trainer::apply_schedule() {
    set_lr(*opt_g_, generator_lr());
    set_lr(*opt_d_, learning_rate_at(config_.train.disc_lr, config_.train, iteration_));
}

LossReport Trainer::step(const Batch& batch) {
    const auto& w = config_.train.weights;
    generator_->train();
    discriminator_->train();
    apply_schedule();

    GeneratorOutput out = generator_->forward(batch.gray);
    std::vector<ChannelTensor> preds;
    for (std::size_t k = 0; k < out.pairs.size(); ++k) preds.push_back({config_.model.spaces[k], out.pairs[k]});

    const auto cc = color_channel_loss(preds, batch.targets, w);
    const auto per = perceptual_loss(out.rgb, batch.rgb, extractor_, w);
    const auto colorfulness = colorfulness_loss(out.rgb);
    LossReport parts;
    parts.cc = checked(cc, "cc");
    parts.per = checked(per, "per");
    parts.colorfulness = checked(colorfulness, "colorfulness");

    const auto d_loss = discriminator_loss(discriminator_->forward(batch.rgb), discriminator_->forward(out.rgb.detach()));
    parts.adv_d = checked(d_loss, "adv_d");
    opt_d_->zero_grad();
    d_loss.backward();
    opt_d_->step();

    const auto adv_g = generator_adversarial_loss(discriminator_->forward(out.rgb));
    parts.adv_g = checked(adv_g, "adv_g");
    const LossReport report = total_loss(parts, w);

    const auto total = w.cc * cc + w.per * per + w.adv * adv_g + w.colorfulness * colorfulness;
    opt_g_->zero_grad();
    total.backward();
    opt_g_->step();
    ++iteration_;
    return report;
}

GeneratorOutput Trainer::infer(const torch::Tensor& gray) {
    torch::NoGradGuard no_grad;
    generator_->eval();
    return generator_->forward(gray);
}

void Trainer::save(const fs::path& path) {
    json manifest;
    manifest["format_version"] = kCheckpointFormatVersion;
    manifest["iteration"] = iteration_;
    manifest["config"] = to_ini(config_);
    const std::string text = manifest.dump();

    torch::serialize::OutputArchive archive;
    archive.write("manifest", torch::tensor(std::vector<std::uint8_t>(text.begin(), text.end()), torch::kUInt8));
    torch::serialize::OutputArchive gen, disc, og, od;
    generator_->save(gen);
    discriminator_->save(disc);
    opt_g_->save(og);
    opt_d_->save(od);
    archive.write("generator", gen);
    archive.write("discriminator", disc);
    archive.write("optimizer_g", og);
    archive.write("optimizer_d", od);
    {
        auto cpu = at::detail::getDefaultCPUGenerator();
        std::lock_guard<std::mutex> lock(cpu.mutex());
        archive.write("rng", cpu.get_state());
    }
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    archive.save_to(path.string());
}

namespace {

json read_manifest(torch::serialize::InputArchive& archive, const fs::path& path) {
    torch::Tensor bytes;
    archive.read("manifest", bytes);
    bytes = bytes.contiguous();
    const auto* p = bytes.data_ptr<std::uint8_t>();
    json manifest = json::parse(std::string(p, p + bytes.numel()));
    if (manifest.at("format_version").get<int>() != kCheckpointFormatVersion) {
        throw std::runtime_error("unsupported checkpoint format in " + path.string());
    }
    return manifest;
}

}  // namespace

RunConfig Trainer::read_config(const fs::path& path) {
    torch::serialize::InputArchive archive;
    archive.load_from(path.string());
    return parse_config(read_manifest(archive, path).at("config").get<std::string>());
}

std::unique_ptr<Trainer> Trainer::load(const fs::path& path) {
    torch::serialize::InputArchive archive;
    archive.load_from(path.string());
    const json manifest = read_manifest(archive, path);
    auto trainer = std::make_unique<Trainer>(parse_config(manifest.at("config").get<std::string>()));
    torch::serialize::InputArchive gen, disc, og, od;
    archive.read("generator", gen);
    archive.read("discriminator", disc);
    archive.read("optimizer_g", og);
    archive.read("optimizer_d", od);
    trainer->generator_->load(gen);
    trainer->discriminator_->load(disc);
    trainer->opt_g_->load(og);
    trainer->opt_d_->load(od);
    torch::Tensor rng;
    archive.read("rng", rng);
    {
        auto cpu = at::detail::getDefaultCPUGenerator();
        std::lock_guard<std::mutex> lock(cpu.mutex());
        cpu.set_state(rng);
    }
    trainer->iteration_ = manifest.at("iteration").get<std::int64_t>();
    return trainer;
}

std::vector<std::size_t> batch_indices(std::size_t train_count, int batch_size, std::int64_t iteration,
                                       std::uint64_t seed) {
    if (train_count == 0) throw std::invalid_argument("batch_indices: empty training split");
    std::vector<std::size_t> out;
    std::vector<std::size_t> order(train_count);
    std::uint64_t cached_pass = ~0ull;
    for (int k = 0; k < batch_size; ++k) {
        const auto pos = static_cast<std::uint64_t>(iteration) * static_cast<std::uint64_t>(batch_size) +
                         static_cast<std::uint64_t>(k);
        const std::uint64_t pass = pos / train_count;
        if (pass != cached_pass) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::mt19937_64 rng(splitmix64(seed ^ splitmix64(pass)));
            std::shuffle(order.begin(), order.end(), rng);
            cached_pass = pass;
        }
        out.push_back(order[pos % train_count]);
    }
    return out;
}

TrainingResult run_training(Trainer& trainer, DatasetManifest& manifest, const fs::path& out_dir) {
    const RunConfig& cfg = trainer.config();
    if (manifest.height != cfg.image_size() || manifest.width != cfg.image_size()) {
        throw DataError("manifest target size " + std::to_string(manifest.height) + "x" +
                        std::to_string(manifest.width) + " differs from model.image_size " +
                        std::to_string(cfg.image_size()));
    }
    const auto& spaces = cfg.model.spaces;
    const std::vector<Sample> train = load_split(manifest, Split::Train, spaces);
    if (train.empty()) throw DataError("training split is empty");

    fs::create_directories(out_dir);
    TrainingResult result;
    result.loss_curve = out_dir / "loss_curve.csv";
    result.checkpoint = out_dir / "checkpoint.pt";
    const bool resume = trainer.iteration() > 0 && fs::exists(result.loss_curve);
    std::ofstream curve(result.loss_curve, resume ? std::ios::app : std::ios::trunc);
    if (!curve) throw std::runtime_error("cannot write " + result.loss_curve.string());
    curve << std::setprecision(17);
    if (!resume) curve << "iteration,lr,cc,per,adv_g,adv_d,colorfulness,total\n";

    while (trainer.iteration() < cfg.train.iterations) {
        const std::int64_t it = trainer.iteration();
        const auto idx = batch_indices(train.size(), cfg.train.batch_size, it, cfg.train.seed);
        std::vector<Sample> samples;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const Sample& s = train[idx[k]];
            if (cfg.train.augment) {
                const std::uint64_t seed = splitmix64(cfg.train.seed ^ splitmix64(static_cast<std::uint64_t>(it) * 131 + k));
                samples.push_back(make_sample(color_augment(s.rgb, seed, cfg.train.augmentation), manifest.height,
                                              manifest.width, spaces));
            } else {
                samples.push_back(s);
            }
        }
        const double lr = trainer.generator_lr();
        const LossReport r = trainer.step(make_batch(samples, spaces));
        result.losses.push_back(r);
        curve << trainer.iteration() << ',' << lr << ',' << r.cc << ',' << r.per << ',' << r.adv_g << ','
              << r.adv_d << ',' << r.colorfulness << ',' << r.total << '\n';
        if (cfg.train.checkpoint_every > 0 && trainer.iteration() % cfg.train.checkpoint_every == 0 &&
            trainer.iteration() < cfg.train.iterations) {
            trainer.save(out_dir / ("checkpoint_" + std::to_string(trainer.iteration()) + ".pt"));
        }
    }
    curve.flush();
    trainer.save(result.checkpoint);
    return result;
}

}  // namespace multicolor
