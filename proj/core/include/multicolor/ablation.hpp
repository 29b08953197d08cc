#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "multicolor/config.hpp"
#include "multicolor/data.hpp"
#include "multicolor/evaluation.hpp"

namespace multicolor {

enum class AblationAxis { ColorSpaces, CscBlocks, CscKernels, FeatureScales, DecoderRounds };

std::string_view to_string(AblationAxis axis) noexcept;
std::optional<AblationAxis> parse_ablation_axis(std::string_view name);
std::vector<AblationAxis> all_ablation_axes();

struct AblationRow {
    std::string label;
    RunConfig config;
};

/// The rows of one sweep, in table order; every row is `base` with one setting changed.
///   color_spaces:   lab, hsv, yuv, lab+hsv, lab+yuv, hsv+yuv, lab+hsv+yuv
///   csc_blocks:     [1,0,0,0] ... [1,1,1,1]
///   csc_kernels:    1x1/1x1, 3x3/3x3, 5x5/5x5, 1x1/3x3, 1x1/5x5
///   feature_scales: F1, F2, F3, F1+F2, F2+F3, F1+F2+F3
///   decoder_rounds: 1, 2, 3
std::vector<AblationRow> ablation_grid(const RunConfig& base, AblationAxis axis);

struct AblationResult {
    std::string label;
    Evaluation evaluation;
    std::int64_t generator_parameters = 0;
    double final_total_loss = 0.0;
};

/// Trains every row from scratch on the training split of `manifest` (each in
/// `out_dir/row_<i>`) and evaluates it on the validation split, or on the
/// training split when the validation split is empty.
std::vector<AblationResult> run_ablation(const std::vector<AblationRow>& rows, DatasetManifest& manifest,
                                         const std::filesystem::path& out_dir,
                                         const std::function<void(const AblationResult&)>& on_row = {});

/// Tab-separated table with a header line and one line per row.
std::string format_ablation_table(AblationAxis axis, const std::vector<AblationResult>& results);

}  // namespace multicolor
