#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli.hpp"
#include "gradcheck.hpp"
#include "multicolor/ablation.hpp"
#include "multicolor/colorspace.hpp"
#include "multicolor/losses.hpp"
#include "multicolor/metrics.hpp"
#include "multicolor/model.hpp"
#include "multicolor/tensor_bridge.hpp"
#include "multicolor/trainer.hpp"

using namespace multicolor;
using multicolor::testing::grad_check;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Collects sub-checks; the criterion passes only if all of them do.
class Checks {
public:
    void expect(bool ok, const std::string& what) {
        pass_ = pass_ && ok;
        if (!os_.str().empty()) os_ << "; ";
        os_ << what << (ok ? "" : " [FAILED]");
    }
    [[nodiscard]] Outcome outcome() const { return {pass_, os_.str()}; }

private:
    bool pass_ = true;
    std::ostringstream os_;
};

std::string num(double v, int precision = 4) {
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Context {
    fs::path corpus;
    fs::path work;
};

// ---- 1 ---------------------------------------------------------------------

Outcome round_trip(const Context&) {
    Checks c;
    const auto t0 = std::chrono::steady_clock::now();
    constexpr int steps = 16;
    RgbImage grid(steps * steps, steps);
    for (int r = 0, row = 0; r < steps; ++r) {
        for (int g = 0; g < steps; ++g, ++row) {
            for (int b = 0; b < steps; ++b) {
                grid.at(row, b, 0) = static_cast<float>(r) / (steps - 1);
                grid.at(row, b, 1) = static_cast<float>(g) / (steps - 1);
                grid.at(row, b, 2) = static_cast<float>(b) / (steps - 1);
            }
        }
    }
    for (ColorSpace space : kAllColorSpaces) {
        const auto back = space_to_rgb(rgb_to_space(grid, space)).image;
        double err = 0.0;
        for (std::size_t i = 0; i < grid.data().size(); ++i) {
            err = std::max(err, std::abs(static_cast<double>(grid.data()[i]) - back.data()[i]));
        }
        c.expect(err < 1e-4, std::string(to_string(space)) + " max_err=" + num(err, 3) + " (<1e-4)");
    }
    const double t = seconds_since(t0);
    c.expect(t < 10.0, "time=" + num(t, 3) + "s (<10s)");
    return c.outcome();
}

// ---- 2 ---------------------------------------------------------------------

Outcome gray_anchors(const Context&) {
    Checks c;
    const double gray = 102.0 / 255.0;
    const double y = gray_to_brightness(gray, ColorSpace::YUV);
    c.expect(y == 0.4, "Y=" + num(y, 17) + " (==0.4)");
    const double l = gray_to_brightness(gray, ColorSpace::CIELab);
    c.expect(std::abs(l - 42.0) <= 1.0, "Lab L=" + num(l) + " (42+-1)");

    // Oracle: six half-planes from the published BT.601 inverse, and lattice
    // midpoint closure for convexity.
    constexpr int res = 64;
    const GamutSlice yuv = gamut_slice(gray, ColorSpace::YUV, res);
    std::size_t disagreements = 0;
    std::vector<std::pair<int, int>> cells;
    for (int i = 0; i < res; ++i) {
        for (int j = 0; j < res; ++j) {
            const double u = yuv.axis0[i], v = yuv.axis1[j];
            const double r = y + 1.13983 * v;
            const double g = y - 0.39465 * u - 0.58060 * v;
            const double b = y + 2.03211 * u;
            const double margin = std::min({r, g, b, 1.0 - r, 1.0 - g, 1.0 - b});
            if (std::abs(margin) >= 1e-4 && yuv.in_gamut(i, j) != (margin > 0.0)) ++disagreements;
            if (yuv.in_gamut(i, j)) cells.emplace_back(i, j);
        }
    }
    std::size_t holes = 0;
    for (std::size_t a = 0; a < cells.size(); ++a) {
        for (std::size_t b = a + 1; b < cells.size(); b += 7) {
            const auto [i0, j0] = cells[a];
            const auto [i1, j1] = cells[b];
            if ((i0 + i1) % 2 || (j0 + j1) % 2) continue;
            if (!yuv.in_gamut((i0 + i1) / 2, (j0 + j1) / 2)) ++holes;
        }
    }
    c.expect(disagreements == 0 && holes == 0 && cells.size() > 10,
             "YUV slice convex (half-plane mismatches=" + std::to_string(disagreements) +
                 ", midpoint holes=" + std::to_string(holes) + ", cells=" + std::to_string(cells.size()) + ")");
    const GamutSlice hsv = gamut_slice(gray, ColorSpace::HSV, res);
    c.expect(hsv.in_gamut_count() == hsv.mask.size(),
             "HSV mask " + std::to_string(hsv.in_gamut_count()) + "/" + std::to_string(hsv.mask.size()));
    return c.outcome();
}

// ---- 3 ---------------------------------------------------------------------

Outcome loss_identities(const Context&) {
    Checks c;
    const LossWeights w;
    const auto opts = torch::TensorOptions().dtype(torch::kDouble);
    torch::manual_seed(0);
    std::vector<ChannelTensor> pairs;
    for (ColorSpace s : kAllColorSpaces) pairs.push_back({s, torch::rand({2, 2, 8, 8}, opts) * 2 - 1});
    const double identity = color_channel_loss(pairs, pairs, w).item<double>();
    c.expect(identity == 0.0, "cc(identity)=" + num(identity));

    const std::vector<ChannelTensor> hsv_pred{{ColorSpace::HSV, torch::full({2, 2, 8, 8}, 0.1, opts)}};
    const std::vector<ChannelTensor> hsv_gt{{ColorSpace::HSV, torch::zeros({2, 2, 8, 8}, opts)}};
    const double hsv = color_channel_loss(hsv_pred, hsv_gt, w).item<double>();
    c.expect(std::abs(hsv - 1.0) <= 1e-12, "cc(HSV err 0.1)=" + num(hsv, 17) + " (1.0)");

    double worst_gray = 0.0;
    for (int level : {0, 37, 102, 200, 255}) {
        const float g = level / 255.0f;
        worst_gray = std::max(worst_gray, std::abs(colorfulness_loss(RgbImage(5, 7, g)) - 1.0));
        const auto t = torch::full({1, 3, 5, 7}, static_cast<double>(g), opts);
        worst_gray = std::max(worst_gray, std::abs(colorfulness_loss(t).item<double>() - 1.0));
    }
    c.expect(worst_gray == 0.0, "colorfulness(gray) max |loss-1|=" + num(worst_gray));

    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    double worst_total = 0.0;
    for (int n = 0; n < 100; ++n) {
        LossReport parts{u(rng), u(rng), u(rng), u(rng), u(rng), 0.0};
        const double expected = w.cc * parts.cc + w.per * parts.per + w.adv * parts.adv_g +
                                w.colorfulness * parts.colorfulness;
        worst_total = std::max(worst_total, std::abs(total_loss(parts, w).total - expected));
    }
    const bool weights = w.cc == 1.0 && w.per == 5.0 && w.adv == 1.0 && w.colorfulness == 0.5;
    c.expect(worst_total <= 1e-15 && weights, "total weighting (1,5,1,0.5) max_err=" + num(worst_total));
    return c.outcome();
}

// ---- 4 ---------------------------------------------------------------------

Outcome gradient_checks(const Context&) {
    Checks c;
    const auto t0 = std::chrono::steady_clock::now();
    const auto opts = torch::TensorOptions().dtype(torch::kDouble);
    auto report = [&](const std::string& name, const testing::GradCheckResult& r) {
        c.expect(r.max_relative_error < 1e-3 && r.max_abs_gradient > 0.0,
                 name + " rel_err=" + num(r.max_relative_error, 3));
    };

    {
        torch::manual_seed(3);
        CscNet net(CscConfig{});
        net->to(torch::kDouble);
        auto gray = torch::rand({2, 1, 8, 8}, opts).requires_grad_(true);
        std::vector<torch::Tensor> pairs;
        for (int k = 0; k < 3; ++k) pairs.push_back((torch::rand({2, 2, 8, 8}, opts) * 2 - 1).requires_grad_(true));
        const auto target = torch::rand({2, 3, 8, 8}, opts);
        std::vector<torch::Tensor> inputs{gray, pairs[0], pairs[1], pairs[2]};
        const auto params = net->parameters();
        inputs.push_back(params.front());
        inputs.push_back(params.back());
        report("cscnet", grad_check([&] { return (net->forward(gray, pairs) - target).pow(2).sum(); }, inputs));
    }
    {
        torch::manual_seed(6);
        ColorMapper mapper(16, 16);
        mapper->to(torch::kDouble);
        {
            torch::NoGradGuard no_grad;
            mapper->projection()->weight.normal_(0.0, 0.3);
        }
        auto q = torch::randn({1, 16, 16}, opts).requires_grad_(true);
        auto f4 = torch::randn({1, 16, 8, 8}, opts).requires_grad_(true);
        const auto target = torch::randn({1, 2, 8, 8}, opts);
        report("color_mapper",
               grad_check([&] { return (mapper->forward(q, f4) - target).pow(2).sum(); },
                          {q, f4, mapper->projection()->weight, mapper->projection()->bias}));
    }
    {
        torch::manual_seed(1);
        auto t = torch::rand({1, 3, 8, 8}, opts).requires_grad_(true);
        report("colorfulness_loss", grad_check([&] { return colorfulness_loss(t); }, {t}));
    }
    {
        torch::manual_seed(2);
        std::vector<torch::Tensor> preds;
        std::vector<ChannelTensor> targets;
        for (ColorSpace s : kAllColorSpaces) {
            preds.push_back(torch::rand({1, 2, 8, 8}, opts).requires_grad_(true));
            targets.push_back({s, torch::rand({1, 2, 8, 8}, opts)});
        }
        auto loss = [&] {
            std::vector<ChannelTensor> p;
            for (std::size_t k = 0; k < preds.size(); ++k) p.push_back({kAllColorSpaces[k], preds[k]});
            return color_channel_loss(p, targets, LossWeights{});
        };
        report("color_channel_loss", grad_check(loss, preds));
    }
    const double t = seconds_since(t0);
    c.expect(t < 120.0, "time=" + num(t, 3) + "s (<120s)");
    return c.outcome();
}

// ---- 5 ---------------------------------------------------------------------

Outcome architecture(const Context&) {
    Checks c;
    torch::manual_seed(0);
    ModelConfig cfg = ModelConfig::paper();
    cfg.encoder.height = cfg.encoder.width = 64;
    MultiColorNet net(cfg);
    torch::NoGradGuard no_grad;
    net->eval();
    const auto p = net->encoder()->forward(torch::rand({1, 1, 64, 64}));
    auto shape = [](const torch::Tensor& t) {
        std::ostringstream os;
        os << t.size(1) << "x" << t.size(2) << "x" << t.size(3);
        return os.str();
    };
    const bool pyramid = p.f1.sizes() == torch::IntArrayRef{1, 512, 4, 4} &&
                         p.f2.sizes() == torch::IntArrayRef{1, 512, 8, 8} &&
                         p.f3.sizes() == torch::IntArrayRef{1, 256, 16, 16} &&
                         p.f4.sizes() == torch::IntArrayRef{1, 256, 64, 64};
    c.expect(pyramid, "pyramid@64 " + shape(p.f1) + "," + shape(p.f2) + "," + shape(p.f3) + "," + shape(p.f4));

    bool queries = true;
    for (std::size_t i = 0; i < net->module_count(); ++i) {
        queries = queries && net->module_for(i)->queries().sizes() == torch::IntArrayRef{100, 256};
    }
    c.expect(queries && net->module_count() == 3, "N=100 queries x 256 in each of 3 modules");

    const auto& csc = net->csc();
    const auto trace = csc->channel_trace();
    const auto first = csc->named_parameters()["body.0.weight"];
    c.expect(trace == std::vector<int>{32, 64, 128, 64, 3} && first.size(1) == 7,
             "CSCNet trace 32/64/128/64/3, input " + std::to_string(first.size(1)));

    bool applications = true;
    for (int rounds : {1, 2, 3}) {
        ModelConfig d = ModelConfig::desk();
        d.decoder.num_rounds = rounds;
        MultiColorNet small(d);
        small->eval();
        small->forward(torch::rand({1, 1, 64, 64}));
        for (std::size_t i = 0; i < small->module_count(); ++i) {
            applications = applications &&
                           small->module_for(i)->last_layer_applications() == static_cast<std::size_t>(3 * rounds);
        }
    }
    c.expect(applications, "decoder applications = 3*num_rounds for rounds 1..3");
    return c.outcome();
}

// ---- 6 ---------------------------------------------------------------------

Outcome equivariance(const Context&) {
    Checks c;
    torch::manual_seed(5);
    ModelConfig cfg = ModelConfig::desk();
    MultiColorNet net(cfg);
    net->eval();
    torch::NoGradGuard no_grad;
    const auto pyramid = net->encoder()->forward(torch::rand({2, 1, 64, 64}));
    auto module = net->module_for(0);
    const auto x0 = torch::randn({2, cfg.decoder.num_queries, cfg.decoder.dim});
    const auto perm = torch::randperm(cfg.decoder.num_queries, torch::kLong);
    const auto a = module->refine_queries(x0, pyramid).index_select(1, perm);
    const auto b = module->refine_queries(x0.index_select(1, perm), pyramid);
    const double err = (a - b).abs().max().item<double>();
    c.expect(err < 1e-5, "max |P f(X) - f(P X)|=" + num(err, 3) + " (<1e-5)");
    return c.outcome();
}

// ---- 7 ---------------------------------------------------------------------

double eval_cc(Trainer& t, const Batch& batch) {
    const auto out = t.infer(batch.gray);
    std::vector<ChannelTensor> preds;
    for (std::size_t k = 0; k < out.pairs.size(); ++k) preds.push_back({t.config().model.spaces[k], out.pairs[k]});
    return color_channel_loss(preds, batch.targets, t.config().train.weights).item<double>();
}

double eval_psnr(Trainer& t, const Batch& batch, const std::vector<Sample>& samples) {
    const auto rgb = t.infer(batch.gray).rgb;
    double sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        sum += psnr(rgb_from_tensor(rgb[static_cast<std::int64_t>(i)]), samples[i].rgb);
    }
    return sum / static_cast<double>(samples.size());
}

Outcome overfit(const Context&) {
    Checks c;
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = RunConfig::desk();
    cfg.train.batch_size = 4;
    cfg.train.lr = 3e-3;
    cfg.train.disc_lr = 3e-3;
    cfg.train.augment = false;
    cfg.train.seed = 0;
    cfg.train.weights.adv = 0.0;
    cfg.train.weights.colorfulness = 0.0;
    cfg.validate();
    const int size = cfg.image_size();
    std::vector<Sample> samples;
    for (std::uint64_t s = 100; s < 104; ++s) {
        samples.push_back(make_sample(synthesize_scene(s, size, size), size, size, cfg.model.spaces));
    }
    const Batch batch = make_batch(samples, cfg.model.spaces);

    Trainer trainer(cfg);
    const double cc0 = eval_cc(trainer, batch);
    constexpr int steps = 300;
    double first_train_cc = 0.0;
    for (int s = 0; s < steps; ++s) {
        const auto r = trainer.step(batch);
        if (s == 0) first_train_cc = r.cc;
    }
    const double cc1 = eval_cc(trainer, batch);
    const double drop = 1.0 - cc1 / cc0;
    const double p = eval_psnr(trainer, batch, samples);
    const double t = seconds_since(t0);
    c.expect(drop >= 0.9, "cc " + num(cc0) + " -> " + num(cc1) + " drop=" + num(100.0 * drop, 3) +
                              "% (>=90%, first train-mode cc=" + num(first_train_cc) + ")");
    c.expect(p >= 28.0, "train PSNR=" + num(p) + " dB (>=28)");
    c.expect(t < 3600.0, "time=" + num(t, 4) + "s (<60 min CPU)");
    return c.outcome();
}

// ---- 8 ---------------------------------------------------------------------

std::vector<std::vector<std::string>> read_tsv(const fs::path& path) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, '\t')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

Outcome ablation_structure(const Context& ctx) {
    Checks c;
    const fs::path out = ctx.work / "ablation";
    fs::remove_all(out);
    std::ostringstream so, se;
    const int code = cli::run({"ablate", "-d", ctx.corpus.string(), "-o", out.string(), "-s", "train.iterations=5",
                               "-s", "train.batch_size=4", "-s", "train.checkpoint_every=0"},
                              so, se);
    c.expect(code == cli::kExitOk, "ablate exit=" + std::to_string(code) + (code ? " " + se.str() : ""));
    if (code != cli::kExitOk) return c.outcome();

    const std::vector<std::pair<std::string, std::vector<std::string>>> expected{
        {"color_spaces", {"lab", "hsv", "yuv", "lab+hsv", "lab+yuv", "hsv+yuv", "lab+hsv+yuv"}},
        {"csc_blocks", {"[1,0,0,0]", "[1,1,0,0]", "[1,1,1,0]", "[1,1,1,1]"}},
        {"csc_kernels", {"1x1/1x1", "3x3/3x3", "5x5/5x5", "1x1/3x3", "1x1/5x5"}},
        {"feature_scales", {"F1", "F2", "F3", "F1+F2", "F2+F3", "F1+F2+F3"}},
        {"decoder_rounds", {"1", "2", "3"}}};
    for (const auto& [axis, labels] : expected) {
        const auto rows = read_tsv(out / ("ablation_" + axis + ".tsv"));
        bool ok = rows.size() == labels.size() + 1;
        std::size_t finite = 0;
        for (std::size_t i = 0; ok && i < labels.size(); ++i) {
            const auto& r = rows[i + 1];
            ok = r.size() == 8 && r[0] == labels[i];
            bool all = ok;
            for (std::size_t k = 1; all && k < 6; ++k) all = std::isfinite(std::stod(r[k]));
            if (all) ++finite;
        }
        c.expect(ok && finite == labels.size(),
                 axis + " " + std::to_string(rows.empty() ? 0 : rows.size() - 1) + " rows, " + std::to_string(finite) +
                     " finite");
    }
    return c.outcome();
}

// ---- 9 ---------------------------------------------------------------------

Outcome metric_machinery(const Context&) {
    Checks c;
    std::mt19937 rng(11);
    std::normal_distribution<double> d;
    std::vector<std::vector<double>> xs(40, std::vector<double>(6));
    for (auto& x : xs) {
        for (double& v : x) v = d(rng);
    }
    const double same = frechet_distance(xs, xs).distance;
    c.expect(std::abs(same) <= 1e-6, "FD(identical)=" + num(same, 3));

    auto sample = [&](double mean, double sd, int n) {
        std::vector<std::vector<double>> out(n, std::vector<double>(1));
        for (auto& x : out) x[0] = mean + sd * d(rng);
        return out;
    };
    auto moments = [](const std::vector<std::vector<double>>& s) {
        double m = 0.0;
        for (const auto& x : s) m += x[0];
        m /= static_cast<double>(s.size());
        double v = 0.0;
        for (const auto& x : s) v += (x[0] - m) * (x[0] - m);
        return std::pair{m, std::sqrt(v / static_cast<double>(s.size() - 1))};
    };
    const auto a = sample(1.0, 2.0, 300);
    const auto b = sample(-0.5, 0.7, 250);
    const auto [ma, sa] = moments(a);
    const auto [mb, sb] = moments(b);
    const double oracle = (ma - mb) * (ma - mb) + (sa - sb) * (sa - sb);
    const double fd = frechet_distance(a, b).distance;
    c.expect(std::abs(fd - oracle) <= 1e-6, "FD 1-D err=" + num(std::abs(fd - oracle), 3));

    const RgbImage zeros(16, 16, 0.0f);
    const double p1 = psnr(RgbImage(16, 16, 0.1f), zeros);
    const double p5 = psnr(RgbImage(16, 16, 0.5f), zeros);
    c.expect(std::abs(p1 - 20.0) <= 1e-6, "PSNR(0.1)=" + num(p1, 10));
    c.expect(std::abs(p5 - 20.0 * std::log10(2.0)) <= 1e-6, "PSNR(0.5)=" + num(p5, 10));
    return c.outcome();
}

// ---- 10 --------------------------------------------------------------------

Outcome differentiability(const Context&) {
    Checks c;
    RunConfig cfg = RunConfig::desk();
    cfg.train.batch_size = 2;
    cfg.validate();
    const int size = cfg.image_size();
    std::vector<Sample> samples;
    for (std::uint64_t s = 0; s < 2; ++s) {
        samples.push_back(make_sample(synthesize_scene(s, size, size), size, size, cfg.model.spaces));
    }
    Trainer trainer(cfg);
    trainer.step(make_batch(samples, cfg.model.spaces));

    auto grad_mass = [](torch::nn::Module& m, std::size_t& zero_tensors) {
        double g = 0.0;
        for (const auto& p : m.parameters()) {
            const double s = p.grad().defined() ? p.grad().abs().sum().item<double>() : 0.0;
            if (s == 0.0) ++zero_tensors;
            g += s;
        }
        return g;
    };
    auto& gen = trainer.generator();
    std::size_t zero = 0;
    std::vector<std::pair<std::string, double>> groups{{"encoder", grad_mass(*gen->encoder(), zero)}};
    for (std::size_t i = 0; i < gen->module_count(); ++i) {
        groups.emplace_back(MultiColorNetImpl::module_name(cfg.model.spaces[i]), grad_mass(*gen->module_for(i), zero));
    }
    groups.emplace_back("cscnet", grad_mass(*gen->csc(), zero));
    for (const auto& [name, g] : groups) c.expect(g > 0.0, name + " |grad|=" + num(g, 3));
    c.expect(zero == 0, std::to_string(gen->parameters().size()) + " tensors, " + std::to_string(zero) +
                            " without gradient");
    return c.outcome();
}

// ---- 11 --------------------------------------------------------------------

Outcome multi_space_benefit(const Context& ctx) {
    Checks c;
    RunConfig base = RunConfig::desk();
    base.data.root = ctx.corpus.string();
    base.train.iterations = 600;
    base.train.batch_size = 4;
    base.train.lr = 3e-3;
    base.train.disc_lr = 3e-3;
    base.train.augment = false;
    base.train.checkpoint_every = 0;
    base.train.weights.adv = 0.0;
    base.train.weights.colorfulness = 0.0;
    base.validate();

    const auto grid = ablation_grid(base, AblationAxis::ColorSpaces);
    std::vector<AblationRow> rows;
    for (const auto& r : grid) {
        if (r.label == "lab" || r.label == "hsv" || r.label == "yuv" || r.label == "lab+hsv+yuv") rows.push_back(r);
    }
    auto manifest =
        build_manifest(base.data.root, base.data.split_ratio, base.data.split_seed, base.image_size(), base.image_size());
    const auto results = run_ablation(rows, manifest, ctx.work / "multi_space");
    double best_single = std::numeric_limits<double>::infinity();
    double all = std::numeric_limits<double>::quiet_NaN();
    std::ostringstream detail;
    for (const auto& r : results) {
        detail << r.label << "=" << num(r.evaluation.chroma_l1) << " ";
        if (r.label == "lab+hsv+yuv") {
            all = r.evaluation.chroma_l1;
        } else {
            best_single = std::min(best_single, r.evaluation.chroma_l1);
        }
    }
    c.expect(all <= best_single, "validation chroma L1 " + detail.str() + "(all three <= best single)");
    return c.outcome();
}

struct Criterion {
    int id;
    std::string name;
    std::function<Outcome(const Context&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks, one PASS/FAIL line per criterion", "multicolor_acceptance"};
    Context ctx{MULTICOLOR_CORPUS_DIR, fs::temp_directory_path() / "multicolor_acceptance"};
    std::vector<int> only;
    app.add_option("--corpus", ctx.corpus, "Desk corpus folder")->check(CLI::ExistingDirectory);
    app.add_option("--work", ctx.work, "Scratch folder for training runs");
    app.add_option("--only", only, "Criterion numbers to run (default all)")->check(CLI::Range(1, 11));
    CLI11_PARSE(app, argc, argv);
    fs::create_directories(ctx.work);

    const std::vector<Criterion> criteria{
        {1, "color-space round trip", round_trip},
        {2, "gray 102 anchors and gamut slices", gray_anchors},
        {3, "loss identities", loss_identities},
        {4, "gradient checks", gradient_checks},
        {5, "shape and architecture contract", architecture},
        {6, "query permutation equivariance", equivariance},
        {7, "overfit surrogate", overfit},
        {8, "ablation harness structure", ablation_structure},
        {9, "metric machinery", metric_machinery},
        {10, "end-to-end differentiability", differentiability},
        {11, "multi-space benefit surrogate", multi_space_benefit},
    };

    int failed = 0;
    for (const auto& cr : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), cr.id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = cr.run(ctx);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << cr.id << "] " << cr.name << ": " << o.detail << " ("
                  << num(seconds_since(t0), 3) << " s)" << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
