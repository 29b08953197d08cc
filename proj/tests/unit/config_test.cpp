#include <gtest/gtest.h>

#include "multicolor/config.hpp"

using namespace multicolor;

TEST(Config, IniRoundTripIsExact) {
    auto c = RunConfig::desk();
    c.train.lr = 3.0000000000000001e-3;
    c.train.milestones = {10, 20, 35};
    c.train.weights.per_space[ColorSpace::HSV] = 0.123456789012345;
    c.train.weights.stages[3] = 0.7;
    c.train.weights.channel_reduction = Reduction::Sum;
    c.model.decoder.levels = {0, 2};
    c.set_color_spaces({ColorSpace::YUV, ColorSpace::CIELab});
    c.data.root = "/some/where";
    const auto text = to_ini(c);
    const auto back = parse_config(text);
    EXPECT_EQ(to_ini(back), text);
    EXPECT_EQ(back.train.lr, c.train.lr);
    EXPECT_EQ(back.train.milestones, c.train.milestones);
    EXPECT_EQ(back.model.spaces, c.model.spaces);
    EXPECT_EQ(back.model.csc.num_spaces, 2);
    EXPECT_EQ(back.model.decoder.levels, c.model.decoder.levels);
    EXPECT_EQ(back.train.weights.channel_reduction, Reduction::Sum);
    EXPECT_EQ(back.data.root, c.data.root);
}

TEST(Config, PresetsDiffer) {
    const auto paper = parse_config("[meta]\npreset = paper\n");
    EXPECT_EQ(paper.train.iterations, 400000);
    EXPECT_EQ(paper.train.batch_size, 16);
    EXPECT_EQ(paper.image_size(), 256);
    EXPECT_EQ(paper.model.decoder.num_queries, 100);
    const auto desk = parse_config("");
    EXPECT_EQ(desk.image_size(), 64);
    EXPECT_EQ(to_ini(desk), to_ini(RunConfig::desk()));
}

TEST(Config, PaperOptimizerSettings) {
    const auto t = TrainConfig::paper();
    EXPECT_EQ(t.lr, 1e-4);
    EXPECT_EQ(t.beta1, 0.9);
    EXPECT_EQ(t.beta2, 0.99);
    EXPECT_EQ(t.weight_decay, 0.01);
    EXPECT_EQ(t.milestones, (std::vector<std::int64_t>{80000}));
    EXPECT_EQ(t.decay_every, 40000);
    EXPECT_EQ(t.decay, 0.5);
}

TEST(Config, UnknownKeysAndSectionsRejected) {
    EXPECT_THROW(parse_config("[train]\nlearning_rate = 1\n"), ConfigError);
    EXPECT_THROW(parse_config("[bogus]\nx = 1\n"), ConfigError);
    EXPECT_THROW(parse_config("", {"train.nope=3"}), ConfigError);
}

TEST(Config, SchemaVersionChecked) {
    EXPECT_NO_THROW(parse_config("[meta]\nschema = 1\n"));
    EXPECT_THROW(parse_config("[meta]\nschema = 2\n"), ConfigError);
    EXPECT_THROW(parse_config("[meta]\npreset = huge\n"), ConfigError);
}

TEST(Config, OverridesApplyAfterText) {
    const auto c = parse_config("[train]\nlr = 0.5\n", {"train.lr=0.25", "model.color_spaces=hsv", "loss.per=2"});
    EXPECT_EQ(c.train.lr, 0.25);
    EXPECT_EQ(c.model.spaces, (std::vector<ColorSpace>{ColorSpace::HSV}));
    EXPECT_EQ(c.model.csc.num_spaces, 1);
    EXPECT_EQ(c.train.weights.per, 2.0);
    EXPECT_THROW(parse_config("", {"train.lr"}), ConfigError);
}

TEST(Config, InvalidValuesRejected) {
    EXPECT_THROW(parse_config("", {"train.lr=abc"}), ConfigError);
    EXPECT_THROW(parse_config("", {"model.image_size=50"}), ConfigError);
    EXPECT_THROW(parse_config("", {"loss.cc=-1"}), ConfigError);
    EXPECT_THROW(parse_config("", {"model.color_spaces=lab,lab"}), ConfigError);
    EXPECT_THROW(parse_config("", {"model.color_spaces=rgb"}), ConfigError);
    EXPECT_THROW(parse_config("", {"train.batch_size=0"}), ConfigError);
}

TEST(Config, ColorSpaceListFormatting) {
    const auto spaces = parse_color_space_list("lab, yuv");
    EXPECT_EQ(spaces, (std::vector<ColorSpace>{ColorSpace::CIELab, ColorSpace::YUV}));
    EXPECT_EQ(parse_color_space_list(format_color_space_list(spaces)), spaces);
}
