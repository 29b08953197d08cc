#include "multicolor/ablation.hpp"

#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace multicolor {

std::string_view to_string(AblationAxis axis) noexcept {
    switch (axis) {
        case AblationAxis::ColorSpaces: return "color_spaces";
        case AblationAxis::CscBlocks: return "csc_blocks";
        case AblationAxis::CscKernels: return "csc_kernels";
        case AblationAxis::FeatureScales: return "feature_scales";
        case AblationAxis::DecoderRounds: return "decoder_rounds";
    }
    return "unknown";
}

std::vector<AblationAxis> all_ablation_axes() {
    return {AblationAxis::ColorSpaces, AblationAxis::CscBlocks, AblationAxis::CscKernels, AblationAxis::FeatureScales,
            AblationAxis::DecoderRounds};
}

std::optional<AblationAxis> parse_ablation_axis(std::string_view name) {
    for (auto axis : all_ablation_axes()) {
        if (to_string(axis) == name) return axis;
    }
    return std::nullopt;
}

namespace {

std::vector<AblationRow> space_rows(const RunConfig& base) {
    using enum ColorSpace;
    const std::vector<std::pair<std::string, std::vector<ColorSpace>>> combos{
        {"lab", {CIELab}},           {"hsv", {HSV}},           {"yuv", {YUV}},
        {"lab+hsv", {CIELab, HSV}},  {"lab+yuv", {CIELab, YUV}}, {"hsv+yuv", {HSV, YUV}},
        {"lab+hsv+yuv", {CIELab, HSV, YUV}}};
    std::vector<AblationRow> rows;
    for (const auto& [label, spaces] : combos) {
        RunConfig c = base;
        c.set_color_spaces(spaces);
        rows.push_back({label, c});
    }
    return rows;
}

std::vector<AblationRow> block_rows(const RunConfig& base) {
    std::vector<AblationRow> rows;
    for (int present = 1; present <= 4; ++present) {
        RunConfig c = base;
        std::string label = "[";
        for (int b = 0; b < 4; ++b) {
            c.model.csc.repeats[b] = b < present ? 1 : 0;
            label += (b > 0 ? "," : "") + std::to_string(c.model.csc.repeats[b]);
        }
        rows.push_back({label + "]", c});
    }
    return rows;
}

std::vector<AblationRow> kernel_rows(const RunConfig& base) {
    const std::pair<int, int> kernels[] = {{1, 1}, {3, 3}, {5, 5}, {1, 3}, {1, 5}};
    std::vector<AblationRow> rows;
    for (auto [k1, k2] : kernels) {
        RunConfig c = base;
        c.model.csc.kernel1 = k1;
        c.model.csc.kernel2 = k2;
        rows.push_back({std::to_string(k1) + "x" + std::to_string(k1) + "/" + std::to_string(k2) + "x" +
                            std::to_string(k2),
                        c});
    }
    return rows;
}

std::vector<AblationRow> scale_rows(const RunConfig& base) {
    const std::vector<std::vector<int>> sets{{0}, {1}, {2}, {0, 1}, {1, 2}, {0, 1, 2}};
    std::vector<AblationRow> rows;
    for (const auto& levels : sets) {
        RunConfig c = base;
        c.model.decoder.levels = levels;
        std::string label;
        for (int l : levels) label += (label.empty() ? "F" : "+F") + std::to_string(l + 1);
        rows.push_back({label, c});
    }
    return rows;
}

std::vector<AblationRow> round_rows(const RunConfig& base) {
    std::vector<AblationRow> rows;
    for (int r = 1; r <= 3; ++r) {
        RunConfig c = base;
        c.model.decoder.num_rounds = r;
        rows.push_back({std::to_string(r), c});
    }
    return rows;
}

std::int64_t count_parameters(torch::nn::Module& m) {
    std::int64_t n = 0;
    for (const auto& p : m.parameters()) n += p.numel();
    return n;
}

std::string format_number(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

}  // namespace

std::vector<AblationRow> ablation_grid(const RunConfig& base, AblationAxis axis) {
    std::vector<AblationRow> rows;
    switch (axis) {
        case AblationAxis::ColorSpaces: rows = space_rows(base); break;
        case AblationAxis::CscBlocks: rows = block_rows(base); break;
        case AblationAxis::CscKernels: rows = kernel_rows(base); break;
        case AblationAxis::FeatureScales: rows = scale_rows(base); break;
        case AblationAxis::DecoderRounds: rows = round_rows(base); break;
    }
    for (const auto& row : rows) row.config.validate();
    return rows;
}

std::vector<AblationResult> run_ablation(const std::vector<AblationRow>& rows, DatasetManifest& manifest,
                                         const std::filesystem::path& out_dir,
                                         const std::function<void(const AblationResult&)>& on_row) {
    FixedConvEmbedder embedder;
    std::vector<AblationResult> results;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        Trainer trainer(row.config);
        const auto training = run_training(trainer, manifest, out_dir / ("row_" + std::to_string(i)));
        const Split split = manifest.indices(Split::Validation).empty() ? Split::Train : Split::Validation;
        const auto samples = load_split(manifest, split, row.config.model.spaces);
        if (samples.empty()) throw DataError("ablation: no samples to evaluate");

        AblationResult r;
        r.label = row.label;
        r.evaluation = evaluate_samples(trainer, samples, &embedder);
        r.generator_parameters = count_parameters(*trainer.generator());
        r.final_total_loss = training.losses.empty() ? 0.0 : training.losses.back().total;
        if (on_row) on_row(r);
        results.push_back(std::move(r));
    }
    return results;
}

std::string format_ablation_table(AblationAxis axis, const std::vector<AblationResult>& results) {
    std::ostringstream os;
    os << to_string(axis) << "\tfid\tcf\tdelta_cf\tpsnr\tchroma_l1\tgenerator_params\tfinal_loss\n";
    for (const auto& r : results) {
        const auto& m = r.evaluation.metrics;
        os << r.label << '\t' << (m.fid ? format_number(*m.fid) : "nan") << '\t' << format_number(m.cf) << '\t'
           << format_number(m.delta_cf) << '\t' << format_number(m.psnr) << '\t'
           << format_number(r.evaluation.chroma_l1) << '\t' << r.generator_parameters << '\t'
           << format_number(r.final_total_loss) << '\n';
    }
    return os.str();
}

}  // namespace multicolor
