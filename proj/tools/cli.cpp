#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "multicolor/ablation.hpp"
#include "multicolor/colorspace.hpp"
#include "multicolor/config.hpp"
#include "multicolor/data.hpp"
#include "multicolor/evaluation.hpp"
#include "multicolor/image_io.hpp"
#include "multicolor/metrics.hpp"
#include "multicolor/tensor_bridge.hpp"
#include "multicolor/trainer.hpp"

namespace multicolor::cli {

namespace fs = std::filesystem;

namespace {

struct ConfigOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string color_spaces;
    std::string data;
};

void add_config_options(CLI::App& cmd, ConfigOptions& o) {
    cmd.add_option("-c,--config", o.config_path, "INI config file")->check(CLI::ExistingFile);
    cmd.add_option("-s,--set", o.overrides, "Override as section.key=value (repeatable)");
    cmd.add_option("--color-spaces", o.color_spaces, "Comma-separated subset of lab,hsv,yuv");
    cmd.add_option("-d,--data", o.data, "Dataset folder (overrides data.root)");
}

RunConfig resolve_config(const ConfigOptions& o) {
    std::vector<std::string> overrides = o.overrides;
    if (!o.color_spaces.empty()) overrides.push_back("model.color_spaces=" + o.color_spaces);
    if (!o.data.empty()) overrides.push_back("data.root=" + o.data);
    return o.config_path.empty() ? parse_config("", overrides) : load_config(o.config_path, overrides);
}

void require_dataset(const RunConfig& cfg) {
    if (cfg.data.root.empty()) throw ConfigError("data.root: no dataset folder given (use --data or [data] root)");
    if (!fs::is_directory(cfg.data.root)) {
        throw ConfigError("data.root: dataset folder does not exist: " + cfg.data.root.string());
    }
}

DatasetManifest manifest_for(const RunConfig& cfg) {
    require_dataset(cfg);
    return build_manifest(cfg.data.root, cfg.data.split_ratio, cfg.data.split_seed, cfg.image_size(),
                          cfg.image_size());
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

bool is_image_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp";
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
    std::vector<fs::path> files;
    for (const auto& in : inputs) {
        if (fs::is_directory(in)) {
            std::vector<fs::path> found;
            for (const auto& e : fs::recursive_directory_iterator(in)) {
                if (e.is_regular_file() && is_image_file(e.path())) found.push_back(e.path());
            }
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.emplace_back(in);
        }
    }
    return files;
}

RgbImage resize_gray(const GrayImage& g, int h, int w) { return resize_bilinear(gray_to_rgb(g), h, w); }

// ---- train -----------------------------------------------------------------

struct TrainOptions {
    ConfigOptions config;
    std::string out;
    std::string resume;
};

int cmd_train(const TrainOptions& o, std::ostream& out) {
    std::unique_ptr<Trainer> trainer;
    RunConfig cfg;
    if (!o.resume.empty()) {
        if (!o.config.config_path.empty() || !o.config.overrides.empty() || !o.config.color_spaces.empty()) {
            throw ConfigError("--resume continues the stored config; --config, --set and --color-spaces are not allowed");
        }
        trainer = Trainer::load(o.resume);
        cfg = trainer->config();
        if (!o.config.data.empty()) cfg.data.root = o.config.data;
    } else {
        cfg = resolve_config(o.config);
    }
    auto manifest = manifest_for(cfg);
    if (!trainer) trainer = std::make_unique<Trainer>(cfg);
    fs::create_directories(o.out);
    save_manifest(manifest, fs::path(o.out) / "manifest.json");
    write_text(fs::path(o.out) / "config.ini", to_ini(cfg));
    out << "training " << cfg.train.iterations << " iterations on " << manifest.indices(Split::Train).size()
        << " images (" << format_color_space_list(cfg.model.spaces) << ")\n";
    const auto result = run_training(*trainer, manifest, o.out);
    if (!result.losses.empty()) {
        const auto& l = result.losses.back();
        out << "final cc=" << l.cc << " per=" << l.per << " adv_g=" << l.adv_g << " adv_d=" << l.adv_d
            << " colorfulness=" << l.colorfulness << " total=" << l.total << '\n';
    }
    out << "checkpoint=" << result.checkpoint.string() << "\nloss_curve=" << result.loss_curve.string() << '\n';
    return kExitOk;
}

// ---- colorize --------------------------------------------------------------

struct ColorizeOptions {
    std::string checkpoint;
    std::vector<std::string> inputs;
    std::string out;
};

int cmd_colorize(const ColorizeOptions& o, std::ostream& out) {
    auto trainer = Trainer::load(o.checkpoint);
    const int size = trainer->config().image_size();
    fs::create_directories(o.out);
    std::set<std::string> used;
    for (const auto& path : expand_inputs(o.inputs)) {
        const RgbImage input = read_rgb(path);
        const GrayImage gray = to_gray(input);
        const RgbImage model_in = resize_gray(gray, size, size);
        const auto rgb = trainer->infer(to_tensor(to_gray(model_in)).unsqueeze(0)).rgb;
        const RgbImage result = resize_bilinear(rgb_from_tensor(rgb[0]), input.height(), input.width());
        std::string name = path.stem().string();
        while (!used.insert(name).second) name += "_";
        const fs::path target = fs::path(o.out) / (name + ".png");
        write_png(target, result);
        out << path.string() << " -> " << target.string() << '\n';
    }
    return kExitOk;
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateOptions {
    ConfigOptions config;
    std::string checkpoint;
    std::string predictions;
    std::string split = "validation";
    std::string report;
};

std::vector<std::size_t> split_indices(const DatasetManifest& m, const std::string& split) {
    if (split == "train") return m.indices(Split::Train);
    if (split == "validation") return m.indices(Split::Validation);
    std::vector<std::size_t> all(m.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
}

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out) {
    if (o.checkpoint.empty() == o.predictions.empty()) {
        throw ConfigError("evaluate: give exactly one of --checkpoint or --predictions");
    }
    FixedConvEmbedder embedder;
    std::string text;
    if (!o.checkpoint.empty()) {
        if (!o.config.config_path.empty() || !o.config.overrides.empty() || !o.config.color_spaces.empty()) {
            throw ConfigError("evaluate: the checkpoint's stored config is used; only --data may be given");
        }
        auto trainer = Trainer::load(o.checkpoint);
        RunConfig cfg = trainer->config();
        if (!o.config.data.empty()) cfg.data.root = o.config.data;
        auto manifest = manifest_for(cfg);
        std::vector<Sample> samples;
        for (std::size_t i : split_indices(manifest, o.split)) {
            samples.push_back(make_sample(read_rgb(manifest.root / manifest.entries[i].path), cfg.image_size(),
                                          cfg.image_size(), cfg.model.spaces));
        }
        if (samples.empty()) throw DataError("evaluate: the " + o.split + " split is empty");
        const auto e = evaluate_samples(*trainer, samples, &embedder);
        std::ostringstream os;
        os.precision(17);
        os << "chroma_l1=" << e.chroma_l1 << '\n';
        text = to_key_value(e.metrics) + os.str();
    } else {
        const RunConfig cfg = resolve_config(o.config);
        auto manifest = manifest_for(cfg);
        std::vector<RgbImage> preds, gts;
        for (std::size_t i : split_indices(manifest, o.split)) {
            const auto& rel = manifest.entries[i].path;
            RgbImage gt = read_rgb(manifest.root / rel);
            RgbImage pred = read_rgb(fs::path(o.predictions) / rel);
            if (!pred.same_shape(gt)) pred = resize_bilinear(pred, gt.height(), gt.width());
            gts.push_back(std::move(gt));
            preds.push_back(std::move(pred));
        }
        if (gts.empty()) throw DataError("evaluate: the " + o.split + " split is empty");
        text = to_key_value(evaluate_sets(preds, gts, &embedder));
    }
    out << text;
    if (!o.report.empty()) write_text(o.report, text);
    return kExitOk;
}

// ---- ablate ----------------------------------------------------------------

struct AblateOptions {
    ConfigOptions config;
    std::vector<std::string> axes{"all"};
    std::string out;
};

int cmd_ablate(const AblateOptions& o, std::ostream& out) {
    const RunConfig base = resolve_config(o.config);
    std::vector<AblationAxis> axes;
    for (const auto& name : o.axes) {
        if (name == "all") {
            axes = all_ablation_axes();
            break;
        }
        const auto axis = parse_ablation_axis(name);
        if (!axis) throw ConfigError("unknown ablation axis '" + name + "'");
        axes.push_back(*axis);
    }
    auto manifest = manifest_for(base);
    for (auto axis : axes) {
        const auto rows = ablation_grid(base, axis);
        out << "# " << to_string(axis) << ": " << rows.size() << " rows\n";
        const auto results = run_ablation(rows, manifest, fs::path(o.out) / std::string(to_string(axis)),
                                          [&](const AblationResult& r) {
                                              out << "  " << r.label << " psnr=" << r.evaluation.metrics.psnr
                                                  << " chroma_l1=" << r.evaluation.chroma_l1 << '\n';
                                          });
        const auto table = format_ablation_table(axis, results);
        write_text(fs::path(o.out) / ("ablation_" + std::string(to_string(axis)) + ".tsv"), table);
        out << table;
    }
    return kExitOk;
}

// ---- gamut -----------------------------------------------------------------

struct GamutOptions {
    int gray = 102;
    int resolution = 256;
    std::string out;
};

int cmd_gamut(const GamutOptions& o, std::ostream& out) {
    fs::create_directories(o.out);
    const double g = o.gray / 255.0;
    for (ColorSpace space : kAllColorSpaces) {
        const auto slice = gamut_slice(g, space, o.resolution);
        const fs::path target = fs::path(o.out) / ("gamut_" + std::string(to_string(space)) + ".png");
        write_png(target, slice.preview);
        out << to_string(space) << " brightness=" << slice.brightness << " in_gamut_fraction="
            << static_cast<double>(slice.in_gamut_count()) / static_cast<double>(slice.mask.size()) << " -> "
            << target.string() << '\n';
    }
    return kExitOk;
}

// ---- convert ---------------------------------------------------------------

struct ConvertOptions {
    std::string image;
    std::string space;
    std::string out;
};

int cmd_convert(const ConvertOptions& o, std::ostream& out) {
    const auto space = parse_color_space(o.space);
    if (!space) throw ConfigError("unknown color space '" + o.space + "' (expected lab, hsv or yuv)");
    const RgbImage img = read_rgb(o.image);
    const std::string stem = fs::path(o.image).stem().string() + "_" + std::string(to_string(*space));
    const fs::path dir(o.out);
    fs::create_directories(dir);

    write_png(dir / (stem + "_brightness.png"), brightness_of(img, *space));
    const ChannelPair pair = extract_color_channels(img, *space);
    for (int c = 0; c < 2; ++c) {
        GrayImage channel(img.height(), img.width());
        for (std::size_t i = 0; i < channel.pixel_count(); ++i) {
            channel.pixel(i)[0] = 0.5f * (pair.channels.pixel(i)[c] + 1.0f);
        }
        write_png(dir / (stem + "_chroma" + std::to_string(c) + ".png"), channel);
    }
    const RgbImage recomposed = space_to_rgb(rgb_to_space(img, *space)).image;
    write_png(dir / (stem + "_recomposed.png"), recomposed);
    double max_err = 0.0;
    for (std::size_t i = 0; i < img.data().size(); ++i) {
        max_err = std::max(max_err, static_cast<double>(std::abs(img.data()[i] - recomposed.data()[i])));
    }
    out << "wrote " << stem << "_{brightness,chroma0,chroma1,recomposed}.png to " << dir.string()
        << "\nmax_recomposition_error=" << max_err << '\n';
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"MultiColor: multi-color-space image colorization", "multicolor"};
    app.require_subcommand(1);

    TrainOptions train;
    auto* train_cmd = app.add_subcommand("train", "Train a model and write checkpoints and a loss curve");
    add_config_options(*train_cmd, train.config);
    train_cmd->add_option("-o,--out", train.out, "Output folder")->required();
    train_cmd->add_option("--resume", train.resume, "Continue from a checkpoint")->check(CLI::ExistingFile);

    ColorizeOptions colorize;
    auto* colorize_cmd = app.add_subcommand("colorize", "Colorize images with a trained checkpoint");
    colorize_cmd->add_option("-k,--checkpoint", colorize.checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);
    colorize_cmd->add_option("-o,--out", colorize.out, "Output folder")->required();
    colorize_cmd->add_option("inputs", colorize.inputs, "Image files or folders")->required()->check(CLI::ExistingPath);

    EvaluateOptions evaluate;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Compute FID, CF, delta CF and PSNR on a dataset split");
    add_config_options(*evaluate_cmd, evaluate.config);
    evaluate_cmd->add_option("-k,--checkpoint", evaluate.checkpoint, "Checkpoint to colorize with")->check(CLI::ExistingFile);
    evaluate_cmd->add_option("-p,--predictions", evaluate.predictions, "Folder of already colorized images mirroring the dataset")
        ->check(CLI::ExistingDirectory);
    evaluate_cmd->add_option("--split", evaluate.split, "train, validation or all")
        ->check(CLI::IsMember({"train", "validation", "all"}));
    evaluate_cmd->add_option("-r,--report", evaluate.report, "Write the key=value report to this file");

    AblateOptions ablate;
    auto* ablate_cmd = app.add_subcommand("ablate", "Run ablation sweeps and write result tables");
    add_config_options(*ablate_cmd, ablate.config);
    ablate_cmd->add_option("-a,--axis", ablate.axes,
                           "color_spaces, csc_blocks, csc_kernels, feature_scales, decoder_rounds or all (repeatable)");
    ablate_cmd->add_option("-o,--out", ablate.out, "Output folder")->required();

    GamutOptions gamut;
    auto* gamut_cmd = app.add_subcommand("gamut", "Render the chroma gamut slices at one gray level");
    gamut_cmd->add_option("-g,--gray", gamut.gray, "Gray level 0-255")->check(CLI::Range(0, 255));
    gamut_cmd->add_option("--resolution", gamut.resolution, "Slice size in pixels")->check(CLI::Range(2, 4096));
    gamut_cmd->add_option("-o,--out", gamut.out, "Output folder")->required();

    ConvertOptions convert;
    auto* convert_cmd = app.add_subcommand("convert", "Write the channels of an image in one color space");
    convert_cmd->add_option("image", convert.image, "Input image")->required()->check(CLI::ExistingFile);
    convert_cmd->add_option("--space", convert.space, "lab, hsv or yuv")->required();
    convert_cmd->add_option("-o,--out", convert.out, "Output folder")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*train_cmd) return cmd_train(train, out);
        if (*colorize_cmd) return cmd_colorize(colorize, out);
        if (*evaluate_cmd) return cmd_evaluate(evaluate, out);
        if (*ablate_cmd) return cmd_ablate(ablate, out);
        if (*gamut_cmd) return cmd_gamut(gamut, out);
        if (*convert_cmd) return cmd_convert(convert, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NonFiniteLoss& e) {
        err << "training aborted: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitConfig;
}

}  // namespace multicolor::cli
