#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "multicolor/colorspace.hpp"
#include "multicolor/data.hpp"
#include "multicolor/image_io.hpp"
#include "multicolor/metrics.hpp"
#include "multicolor/trainer.hpp"

using namespace multicolor;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("multicolor_cli_test_" + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    [[nodiscard]] const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::map<std::string, std::string> key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const std::vector<std::string> kTinyRun{"-d", MULTICOLOR_CORPUS_DIR,         "-s", "model.image_size=32",
                                        "-s", "train.iterations=2",           "-s", "train.batch_size=2",
                                        "-s", "train.checkpoint_every=0"};

std::vector<std::string> train_args(const fs::path& out, std::vector<std::string> extra = {}) {
    std::vector<std::string> args{"train", "-o", out.string()};
    args.insert(args.end(), kTinyRun.begin(), kTinyRun.end());
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
    EXPECT_EQ(run_cli({"--help"}).code, cli::kExitOk);
    EXPECT_EQ(run_cli({}).code, cli::kExitConfig);
    EXPECT_EQ(run_cli({"paint"}).code, cli::kExitConfig);
    EXPECT_EQ(run_cli({"gamut", "-o", "x", "--bogus"}).code, cli::kExitConfig);
    EXPECT_EQ(run_cli({"gamut", "-o", "x", "-g", "300"}).code, cli::kExitConfig);
}

TEST(Cli, TrainWithoutDatasetNamesTheMissingKey) {
    TempDir tmp;
    const auto r = run_cli({"train", "-o", (tmp.path() / "run").string()});
    EXPECT_EQ(r.code, cli::kExitConfig);
    EXPECT_NE(r.err.find("data.root"), std::string::npos) << r.err;
}

TEST(Cli, InvalidOverrideIsAConfigError) {
    TempDir tmp;
    const auto r = run_cli(train_args(tmp.path() / "run", {"-s", "train.batch_size=0"}));
    EXPECT_EQ(r.code, cli::kExitConfig);
    EXPECT_FALSE(fs::exists(tmp.path() / "run" / "checkpoint.pt"));
}

TEST(Cli, TrainWritesArtifactsAndHonorsColorSpaces) {
    TempDir tmp;
    const fs::path run = tmp.path() / "run";
    const auto r = run_cli(train_args(run, {"--color-spaces", "lab,hsv"}));
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    for (const char* name : {"checkpoint.pt", "loss_curve.csv", "config.ini", "manifest.json"}) {
        EXPECT_TRUE(fs::exists(run / name)) << name;
    }
    const auto trainer = Trainer::load(run / "checkpoint.pt");
    EXPECT_EQ(trainer->config().model.spaces, (std::vector<ColorSpace>{ColorSpace::CIELab, ColorSpace::HSV}));
    EXPECT_EQ(trainer->generator()->module_count(), 2u);
    EXPECT_EQ(trainer->iteration(), 2);
}

TEST(Cli, ConfigSnapshotReproducesTheLossCurve) {
    TempDir tmp;
    const fs::path a = tmp.path() / "a";
    const fs::path b = tmp.path() / "b";
    ASSERT_EQ(run_cli(train_args(a)).code, cli::kExitOk);
    ASSERT_EQ(run_cli({"train", "-c", (a / "config.ini").string(), "-o", b.string()}).code, cli::kExitOk);
    EXPECT_EQ(read_file(a / "loss_curve.csv"), read_file(b / "loss_curve.csv"));
    EXPECT_EQ(read_file(a / "config.ini"), read_file(b / "config.ini"));
}

TEST(Cli, ColorizeAllBlackGrayGivesValidImageOfSameSize) {
    TempDir tmp;
    const fs::path run = tmp.path() / "run";
    ASSERT_EQ(run_cli(train_args(run)).code, cli::kExitOk);
    const fs::path in = tmp.path() / "black.png";
    write_png(in, GrayImage(40, 50));
    const auto r = run_cli({"colorize", "-k", (run / "checkpoint.pt").string(), "-o", (tmp.path() / "out").string(),
                            in.string()});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    const RgbImage result = read_rgb(tmp.path() / "out" / "black.png");
    EXPECT_EQ(result.height(), 40);
    EXPECT_EQ(result.width(), 50);
    for (float v : result.data()) {
        ASSERT_GE(v, 0.0f);
        ASSERT_LE(v, 1.0f);
    }
}

TEST(Cli, EvaluateGroundTruthAgainstItself) {
    const auto r = run_cli({"evaluate", "-d", MULTICOLOR_CORPUS_DIR, "-p", MULTICOLOR_CORPUS_DIR, "--split", "all"});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    const auto kv = key_values(r.out);
    ASSERT_TRUE(kv.count("fid") && kv.count("cf") && kv.count("delta_cf") && kv.count("psnr"));
    EXPECT_NEAR(std::stod(kv.at("fid")), 0.0, 1e-6);
    EXPECT_EQ(std::stod(kv.at("delta_cf")), 0.0);
    EXPECT_EQ(kv.at("psnr"), "inf");

    std::vector<RgbImage> images;
    for (const auto& entry : fs::directory_iterator(MULTICOLOR_CORPUS_DIR)) images.push_back(read_rgb(entry.path()));
    EXPECT_NEAR(std::stod(kv.at("cf")), cf_of_set(images), 1e-9);
}

TEST(Cli, EvaluateNeedsExactlyOneSource) {
    EXPECT_EQ(run_cli({"evaluate", "-d", MULTICOLOR_CORPUS_DIR}).code, cli::kExitConfig);
}

TEST(Cli, AblateRejectsUnknownAxis) {
    TempDir tmp;
    const auto r = run_cli({"ablate", "-d", MULTICOLOR_CORPUS_DIR, "-a", "depth", "-o", tmp.path().string()});
    EXPECT_EQ(r.code, cli::kExitConfig);
}

TEST(Cli, GamutAtExtremeAndMidGray) {
    for (int gray : {0, 102, 255}) {
        TempDir tmp;
        const auto r = run_cli({"gamut", "-g", std::to_string(gray), "--resolution", "32", "-o", tmp.path().string()});
        ASSERT_EQ(r.code, cli::kExitOk) << r.err;
        for (const char* space : {"lab", "hsv", "yuv"}) {
            const RgbImage img = read_rgb(tmp.path() / ("gamut_" + std::string(space) + ".png"));
            EXPECT_EQ(img.height(), 32);
            EXPECT_EQ(img.width(), 32);
        }
    }
}

TEST(Cli, ConvertRecomposesWithinOneLevel) {
    TempDir tmp;
    const fs::path in = tmp.path() / "scene.png";
    write_png(in, synthesize_scene(7, 24, 24));
    for (const char* space : {"lab", "hsv", "yuv"}) {
        const auto r = run_cli({"convert", in.string(), "--space", space, "-o", tmp.path().string()});
        ASSERT_EQ(r.code, cli::kExitOk) << r.err;
        EXPECT_LT(std::stod(key_values(r.out).at("max_recomposition_error")), 1.0 / 255.0);
        const RgbImage original = read_rgb(in);
        const RgbImage recomposed = read_rgb(tmp.path() / ("scene_" + std::string(space) + "_recomposed.png"));
        for (std::size_t i = 0; i < original.data().size(); ++i) {
            ASSERT_LE(std::abs(original.data()[i] - recomposed.data()[i]), 1.0f / 255.0f + 1e-6f);
        }
    }
    EXPECT_NE(run_cli({"convert", in.string(), "--space", "cmyk", "-o", tmp.path().string()}).code, cli::kExitOk);
}
