#include <gtest/gtest.h>

#include "gradcheck.hpp"
#include "multicolor/cscnet.hpp"

using namespace multicolor;
using multicolor::testing::grad_check;

namespace {

std::vector<torch::Tensor> random_pairs(int n, int batch, int h, int w, torch::Dtype dtype = torch::kFloat) {
    std::vector<torch::Tensor> pairs;
    for (int i = 0; i < n; ++i) pairs.push_back(torch::rand({batch, 2, h, w}, torch::dtype(dtype)) * 2.0 - 1.0);
    return pairs;
}

// Independent layer-by-layer count: conv weights k*k*in*out (no bias), BN gamma and beta.
std::int64_t oracle_count(int n_c, int k1, int k2, std::array<int, 4> repeats) {
    const int widths[] = {32, 64, 128, 64};
    std::int64_t total = 0;
    int in = 1 + 2 * n_c;
    for (int b = 0; b < 4; ++b) {
        for (int r = 0; r < repeats[b]; ++r) {
            total += static_cast<std::int64_t>(k1) * k1 * in * widths[b] + 2 * widths[b];
            total += static_cast<std::int64_t>(k2) * k2 * widths[b] * widths[b] + 2 * widths[b];
            in = widths[b];
        }
    }
    total += static_cast<std::int64_t>(k1) * k1 * in * 32 + 2 * 32;
    total += static_cast<std::int64_t>(k2) * k2 * 32 * 3 + 2 * 3;
    return total;
}

std::int64_t trainable(CscNet& net) {
    std::int64_t n = 0;
    for (const auto& p : net->parameters()) n += p.numel();
    return n;
}

}  // namespace

TEST(CscNet, DefaultTraceAndInputWidth) {
    CscConfig cfg;
    EXPECT_EQ(cfg.input_channels(), 7);
    CscNet net(cfg);
    EXPECT_EQ(net->channel_trace(), (std::vector<int>{32, 64, 128, 64, 3}));
    const auto first = net->named_parameters()["body.0.weight"];
    EXPECT_EQ(first.size(1), 7);
}

TEST(CscNet, OutputSizeMatchesInputAndStaysInUnitRange) {
    torch::manual_seed(0);
    CscNet net(CscConfig{});
    for (auto [h, w] : {std::pair{8, 8}, std::pair{13, 7}, std::pair{32, 24}}) {
        const auto out = net->forward(torch::rand({2, 1, h, w}), random_pairs(3, 2, h, w));
        EXPECT_EQ(out.sizes().vec(), (std::vector<std::int64_t>{2, 3, h, w}));
        EXPECT_GE(out.min().item<double>(), 0.0);
        EXPECT_LE(out.max().item<double>(), 1.0);
    }
}

TEST(CscNet, RejectsBadInputs) {
    CscNet net(CscConfig{});
    EXPECT_THROW(net->forward(torch::rand({1, 1, 8, 8}), {}), std::invalid_argument);
    EXPECT_THROW(net->forward(torch::rand({1, 1, 8, 8}), random_pairs(2, 1, 8, 8)), std::invalid_argument);
    EXPECT_THROW(net->forward(torch::rand({1, 1, 8, 8}), random_pairs(3, 1, 8, 9)), std::invalid_argument);
    CscConfig bad;
    bad.kernel2 = 2;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = CscConfig{};
    bad.repeats = {0, 1, 1, 1};
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(CscNet, ParameterCountMatchesOracle) {
    for (auto [k1, k2] : {std::pair{1, 3}, std::pair{1, 1}, std::pair{3, 3}, std::pair{5, 5}, std::pair{1, 5}}) {
        CscConfig cfg;
        cfg.kernel1 = k1;
        cfg.kernel2 = k2;
        CscNet net(cfg);
        EXPECT_EQ(csc_param_count(cfg), oracle_count(3, k1, k2, {1, 1, 1, 1}));
        EXPECT_EQ(trainable(net), oracle_count(3, k1, k2, {1, 1, 1, 1}));
    }
}

TEST(CscNet, DoublingRepeatsIncreasesCount) {
    CscConfig cfg;
    const auto base = csc_param_count(cfg);
    cfg.repeats = {2, 2, 2, 2};
    EXPECT_GT(csc_param_count(cfg), base);
    EXPECT_EQ(csc_param_count(cfg), oracle_count(3, 1, 3, {2, 2, 2, 2}));
}

TEST(CscNet, SpaceCountOnlyChangesFirstConv) {
    CscConfig one;
    one.num_spaces = 1;
    CscConfig three;
    EXPECT_EQ(csc_param_count(three) - csc_param_count(one), 32 * 1 * 1 * 4);
    three.kernel1 = 3;
    one.kernel1 = 3;
    EXPECT_EQ(csc_param_count(three) - csc_param_count(one), 32 * 3 * 3 * 4);
}

TEST(CscNet, BlockAblationConfigsAreValid) {
    torch::manual_seed(1);
    const std::array<std::array<int, 4>, 4> rows{{{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 1, 1, 0}, {1, 1, 1, 1}}};
    for (const auto& r : rows) {
        CscConfig cfg;
        cfg.repeats = r;
        CscNet net(cfg);
        const auto out = net->forward(torch::rand({2, 1, 8, 8}), random_pairs(3, 2, 8, 8));
        EXPECT_TRUE(torch::isfinite(out).all().item<bool>());
        EXPECT_EQ(net->channel_trace().back(), 3);
        EXPECT_EQ(trainable(net), oracle_count(3, 1, 3, r));
    }
}

TEST(CscNet, GradientReachesGrayAndEveryPair) {
    torch::manual_seed(2);
    CscNet net(CscConfig{});
    auto gray = torch::rand({2, 1, 8, 8}).requires_grad_(true);
    auto pairs = random_pairs(3, 2, 8, 8);
    for (auto& p : pairs) p.requires_grad_(true);
    (net->forward(gray, pairs) - 0.3).pow(2).sum().backward();
    EXPECT_GT(gray.grad().abs().sum().item<double>(), 0.0);
    for (const auto& p : pairs) EXPECT_GT(p.grad().abs().sum().item<double>(), 0.0);
}

TEST(CscNet, GradientCheckDouble) {
    torch::manual_seed(3);
    CscConfig cfg;
    cfg.block_channels = {4, 4, 4, 4, 4};
    CscNet net(cfg);
    net->to(torch::kDouble);
    auto gray = torch::rand({2, 1, 8, 8}, torch::kDouble).requires_grad_(true);
    auto pairs = random_pairs(3, 2, 8, 8, torch::kDouble);
    for (auto& p : pairs) p.requires_grad_(true);
    const auto target = torch::rand({2, 3, 8, 8}, torch::kDouble);
    auto loss = [&] { return (net->forward(gray, pairs) - target).pow(2).sum(); };
    std::vector<torch::Tensor> inputs{gray, pairs[0], pairs[1], pairs[2]};
    const auto params = net->parameters();
    inputs.push_back(params.front());
    inputs.push_back(params.back());
    const auto r = grad_check(loss, inputs);
    EXPECT_LT(r.max_relative_error, 1e-3);
    EXPECT_GT(r.max_abs_gradient, 1e-4);
}
