#include "multicolor/metrics.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <ATen/CPUGeneratorImpl.h>
#include <Eigen/Dense>

#include "multicolor/losses.hpp"
#include "multicolor/tensor_bridge.hpp"

namespace multicolor {

namespace nn = torch::nn;

double psnr(const RgbImage& pred, const RgbImage& gt) {
    if (!pred.same_shape(gt)) throw std::invalid_argument("psnr: shape mismatch");
    if (pred.empty()) throw std::invalid_argument("psnr: empty image");
    double sse = 0.0;
    const auto a = pred.data();
    const auto b = gt.data();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        sse += d * d;
    }
    if (sse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(static_cast<double>(a.size()) / sse);
}

double cf_of_set(std::span<const RgbImage> images) {
    if (images.empty()) throw std::invalid_argument("cf_of_set: empty image set");
    double sum = 0.0;
    for (const auto& img : images) sum += colorfulness_score(img);
    return sum / static_cast<double>(images.size());
}

namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Moments {
    Vector mean;
    Matrix cov;
};

Moments moments(const std::vector<std::vector<double>>& xs, std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(xs.size());
    Matrix data(n, static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < n; ++i) {
        if (xs[i].size() != dim) throw std::invalid_argument("frechet_distance: dimension mismatch");
        data.row(i) = Eigen::Map<const Vector>(xs[i].data(), static_cast<Eigen::Index>(dim));
    }
    Moments m;
    m.mean = data.colwise().mean();
    const Matrix centered = data.rowwise() - m.mean.transpose();
    m.cov = centered.transpose() * centered / static_cast<double>(n - 1);
    return m;
}

// Symmetric square root with eigenvalues below the floor set to zero.
Matrix sqrt_psd(const Matrix& m, int& floored) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
    if (es.info() != Eigen::Success) throw std::runtime_error("frechet_distance: eigendecomposition failed");
    Vector ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] < kEigenvalueFloor) {
            ev[i] = 0.0;
            ++floored;
        } else {
            ev[i] = std::sqrt(ev[i]);
        }
    }
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

FrechetResult frechet_distance(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
    if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("frechet_distance: need at least two vectors per set");
    const std::size_t dim = a.front().size();
    if (dim == 0) throw std::invalid_argument("frechet_distance: empty vectors");
    const Moments ma = moments(a, dim);
    const Moments mb = moments(b, dim);

    FrechetResult result;
    // Tr((S_a S_b)^{1/2}) = Tr((S_a^{1/2} S_b S_a^{1/2})^{1/2}); the inner matrix is symmetric PSD.
    const Matrix root_a = sqrt_psd(ma.cov, result.floored_eigenvalues);
    const Matrix inner = root_a * mb.cov * root_a;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (inner + inner.transpose()), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("frechet_distance: eigendecomposition failed");
    double trace_sqrt = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double ev = es.eigenvalues()[i];
        if (ev < kEigenvalueFloor) ++result.floored_eigenvalues;
        trace_sqrt += std::sqrt(std::max(ev, 0.0));
    }
    const double mean_term = (ma.mean - mb.mean).squaredNorm();
    const double d = mean_term + ma.cov.trace() + mb.cov.trace() - 2.0 * trace_sqrt;
    result.distance = std::max(d, 0.0);
    return result;
}

FixedConvEmbedder::FixedConvEmbedder(std::uint64_t seed, int width) {
    auto gen = at::make_generator<at::CPUGeneratorImpl>(seed);
    auto conv = [&](int in, int out, int stride) {
        auto c = nn::Conv2d(nn::Conv2dOptions(in, out, 3).stride(stride).padding(1));
        torch::NoGradGuard no_grad;
        c->weight.normal_(0.0, std::sqrt(2.0 / (in * 9.0)), gen);
        c->bias.zero_();
        return c;
    };
    net_ = nn::Sequential(conv(3, width, 2), nn::ReLU(), conv(width, width, 2), nn::ReLU(),
                          conv(width, 2 * width, 2), nn::ReLU(), conv(2 * width, 2 * width, 1), nn::ReLU());
    for (auto& p : net_->parameters()) p.set_requires_grad(false);
    net_->eval();
}

std::vector<double> FixedConvEmbedder::embed(const RgbImage& img) {
    torch::NoGradGuard no_grad;
    auto features = net_->forward(to_tensor(img).unsqueeze(0)).mean({2, 3}).squeeze(0).to(torch::kFloat64);
    const double* p = features.data_ptr<double>();
    return {p, p + features.numel()};
}

MetricReport evaluate_sets(std::span<const RgbImage> preds, std::span<const RgbImage> gts, Embedder* embedder) {
    if (preds.empty() || preds.size() != gts.size()) {
        throw std::invalid_argument("evaluate_sets: prediction and ground-truth sets must be non-empty and equal in size");
    }
    MetricReport report;
    report.images = preds.size();
    report.cf = cf_of_set(preds);
    report.cf_gt = cf_of_set(gts);
    report.delta_cf = std::abs(report.cf - report.cf_gt);

    double psnr_sum = 0.0;
    std::size_t finite = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double p = psnr(preds[i], gts[i]);
        if (std::isinf(p)) continue;
        psnr_sum += p;
        ++finite;
    }
    // Identical pairs carry no finite value; average over the rest.
    report.psnr = finite == 0 ? std::numeric_limits<double>::infinity() : psnr_sum / static_cast<double>(finite);

    if (embedder != nullptr && preds.size() >= 2) {
        std::vector<std::vector<double>> ea, eb;
        for (const auto& img : preds) ea.push_back(embedder->embed(img));
        for (const auto& img : gts) eb.push_back(embedder->embed(img));
        report.fid = frechet_distance(ea, eb).distance;
    }
    return report;
}

namespace {

std::string format_value(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

double parse_value(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::stod(s);
}

}  // namespace

std::string to_key_value(const MetricReport& report) {
    std::ostringstream os;
    os << "fid=" << (report.fid ? format_value(*report.fid) : std::string("nan")) << '\n';
    os << "cf=" << format_value(report.cf) << '\n';
    os << "cf_gt=" << format_value(report.cf_gt) << '\n';
    os << "delta_cf=" << format_value(report.delta_cf) << '\n';
    os << "psnr=" << format_value(report.psnr) << '\n';
    os << "images=" << report.images << '\n';
    return os.str();
}

MetricReport parse_key_value(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    for (const char* key : {"fid", "cf", "delta_cf", "psnr"}) {
        if (!kv.contains(key)) throw std::invalid_argument(std::string("metric report missing key ") + key);
    }
    MetricReport r;
    if (kv["fid"] != "nan") r.fid = parse_value(kv["fid"]);
    r.cf = parse_value(kv["cf"]);
    if (kv.contains("cf_gt")) r.cf_gt = parse_value(kv["cf_gt"]);
    r.delta_cf = parse_value(kv["delta_cf"]);
    r.psnr = parse_value(kv["psnr"]);
    if (kv.contains("images")) r.images = std::stoul(kv["images"]);
    return r;
}

}  // namespace multicolor
