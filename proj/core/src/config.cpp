#include "multicolor/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace multicolor {

namespace pt = boost::property_tree;

void TrainConfig::validate() const {
    if (iterations < 0) throw ConfigError("train.iterations must be >= 0");
    if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("train.lr must be finite and non-negative");
    if (!(disc_lr >= 0.0) || !std::isfinite(disc_lr)) throw ConfigError("train.disc_lr must be finite and non-negative");
    if (!(decay > 0.0 && decay <= 1.0)) throw ConfigError("train.decay must lie in (0, 1]");
    for (std::size_t i = 0; i < milestones.size(); ++i) {
        if (milestones[i] <= 0 || (i > 0 && milestones[i] <= milestones[i - 1])) {
            throw ConfigError("train.milestones must be positive and strictly increasing");
        }
    }
    if (decay_every < 0) throw ConfigError("train.decay_every must be >= 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw ConfigError("train.beta1 and train.beta2 must lie in [0, 1)");
    }
    if (!(weight_decay >= 0.0)) throw ConfigError("train.weight_decay must be >= 0");
    const auto& a = augmentation;
    if (!(a.saturation_min >= 0.0 && a.saturation_min <= a.saturation_max)) {
        throw ConfigError("train.saturation_min must be >= 0 and <= train.saturation_max");
    }
    if (!(a.brightness >= 0.0 && a.brightness <= 1.0)) throw ConfigError("train.brightness_shift must lie in [0, 1]");
    if (checkpoint_every < 0) throw ConfigError("train.checkpoint_every must be >= 0");
    try {
        weights.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("loss: ") + e.what());
    }
}

TrainConfig TrainConfig::paper() {
    TrainConfig c;
    c.iterations = 400000;
    c.batch_size = 16;
    c.checkpoint_every = 10000;
    return c;
}

TrainConfig TrainConfig::desk() { return TrainConfig{}; }

void RunConfig::set_image_size(int size) {
    model.encoder.height = size;
    model.encoder.width = size;
}

void RunConfig::set_color_spaces(std::vector<ColorSpace> spaces) {
    model.spaces = std::move(spaces);
    model.csc.num_spaces = static_cast<int>(model.spaces.size());
}

void RunConfig::validate() const {
    try {
        model.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
    train.validate();
    for (ColorSpace s : model.spaces) {
        if (!train.weights.per_space.contains(s)) {
            throw ConfigError("loss." + std::string(to_string(s)) + " is required for the configured color spaces");
        }
    }
    if (!(data.split_ratio >= 0.0 && data.split_ratio <= 1.0)) throw ConfigError("data.split_ratio must lie in [0, 1]");
}

RunConfig RunConfig::desk() {
    RunConfig c;
    c.model = ModelConfig::desk();
    c.train = TrainConfig::desk();
    return c;
}

RunConfig RunConfig::paper() {
    RunConfig c;
    c.model = ModelConfig::paper();
    c.train = TrainConfig::paper();
    return c;
}

std::vector<ColorSpace> parse_color_space_list(const std::string& text) {
    std::vector<ColorSpace> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        if (first == std::string::npos) throw ConfigError("empty color space name in '" + text + "'");
        const auto space = parse_color_space(item.substr(first, last - first + 1));
        if (!space) throw ConfigError("unknown color space '" + item + "'");
        out.push_back(*space);
    }
    if (out.empty()) throw ConfigError("color space list is empty");
    return out;
}

std::string format_color_space_list(const std::vector<ColorSpace>& spaces) {
    std::string out;
    for (std::size_t i = 0; i < spaces.size(); ++i) {
        if (i > 0) out += ',';
        out += to_string(spaces[i]);
    }
    return out;
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

template <typename T>
T parse_number(const std::string& raw, const std::string& field) {
    const std::string s = trim(raw);
    T value{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ConfigError(field + ": cannot parse '" + raw + "'");
    }
    return value;
}

bool parse_bool(const std::string& raw, const std::string& field) {
    const std::string s = trim(raw);
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError(field + ": expected true or false, got '" + raw + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& raw, const std::string& field) {
    std::vector<T> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number<T>(item, field));
    return out;
}

template <typename T, std::size_t N>
std::array<T, N> parse_array(const std::string& raw, const std::string& field) {
    const auto v = parse_list<T>(raw, field);
    if (v.size() != N) throw ConfigError(field + ": expected " + std::to_string(N) + " values");
    std::array<T, N> out{};
    std::copy(v.begin(), v.end(), out.begin());
    return out;
}

template <typename Range>
std::string join(const Range& r) {
    std::string out;
    bool first = true;
    for (const auto& v : r) {
        if (!first) out += ',';
        first = false;
        if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>) {
            out += fmt(v);
        } else {
            out += std::to_string(v);
        }
    }
    return out;
}

struct Field {
    std::string section;
    std::string key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

#define MC_NUM(sec, name, member, T)                                                       \
    Field {                                                                                \
        sec, name, [](const RunConfig& c) { return num_to_string(c.member); },            \
            [](RunConfig& c, const std::string& v) { c.member = parse_number<T>(v, sec "." name); } \
    }

template <typename T>
std::string num_to_string(T v) {
    if constexpr (std::is_floating_point_v<T>) {
        return fmt(v);
    } else {
        return std::to_string(v);
    }
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        {"data", "root", [](const RunConfig& c) { return c.data.root.string(); },
         [](RunConfig& c, const std::string& v) { c.data.root = trim(v); }},
        MC_NUM("data", "split_ratio", data.split_ratio, double),
        MC_NUM("data", "split_seed", data.split_seed, std::uint64_t),

        {"model", "image_size", [](const RunConfig& c) { return std::to_string(c.image_size()); },
         [](RunConfig& c, const std::string& v) { c.set_image_size(parse_number<int>(v, "model.image_size")); }},
        {"model", "color_spaces", [](const RunConfig& c) { return format_color_space_list(c.model.spaces); },
         [](RunConfig& c, const std::string& v) { c.set_color_spaces(parse_color_space_list(v)); }},
        {"model", "encoder_channels", [](const RunConfig& c) { return join(c.model.encoder.stage_channels); },
         [](RunConfig& c, const std::string& v) {
             c.model.encoder.stage_channels = parse_array<int, 4>(v, "model.encoder_channels");
         }},
        {"model", "backbone_widths", [](const RunConfig& c) { return join(c.model.encoder.backbone_widths); },
         [](RunConfig& c, const std::string& v) {
             c.model.encoder.backbone_widths = parse_array<int, 4>(v, "model.backbone_widths");
         }},
        MC_NUM("model", "query_dim", model.decoder.dim, int),
        MC_NUM("model", "num_queries", model.decoder.num_queries, int),
        MC_NUM("model", "heads", model.decoder.heads, int),
        MC_NUM("model", "ffn_dim", model.decoder.ffn_dim, int),
        MC_NUM("model", "num_rounds", model.decoder.num_rounds, int),
        {"model", "feature_scales",
         [](const RunConfig& c) {
             std::vector<int> one_based;
             for (int l : c.model.decoder.levels) one_based.push_back(l + 1);
             return join(one_based);
         },
         [](RunConfig& c, const std::string& v) {
             std::vector<int> levels;
             for (int l : parse_list<int>(v, "model.feature_scales")) levels.push_back(l - 1);
             c.model.decoder.levels = levels;
         }},
        MC_NUM("model", "csc_kernel1", model.csc.kernel1, int),
        MC_NUM("model", "csc_kernel2", model.csc.kernel2, int),
        {"model", "csc_blocks", [](const RunConfig& c) { return join(c.model.csc.repeats); },
         [](RunConfig& c, const std::string& v) { c.model.csc.repeats = parse_array<int, 4>(v, "model.csc_blocks"); }},
        {"model", "csc_channels", [](const RunConfig& c) { return join(c.model.csc.block_channels); },
         [](RunConfig& c, const std::string& v) {
             c.model.csc.block_channels = parse_array<int, 5>(v, "model.csc_channels");
         }},
        MC_NUM("model", "disc_layers", model.discriminator.num_layers, int),
        MC_NUM("model", "disc_channels", model.discriminator.base_channels, int),

        MC_NUM("train", "iterations", train.iterations, std::int64_t),
        MC_NUM("train", "batch_size", train.batch_size, int),
        MC_NUM("train", "lr", train.lr, double),
        MC_NUM("train", "disc_lr", train.disc_lr, double),
        MC_NUM("train", "decay", train.decay, double),
        {"train", "milestones", [](const RunConfig& c) { return join(c.train.milestones); },
         [](RunConfig& c, const std::string& v) {
             c.train.milestones = trim(v).empty() ? std::vector<std::int64_t>{}
                                                  : parse_list<std::int64_t>(v, "train.milestones");
         }},
        MC_NUM("train", "decay_every", train.decay_every, std::int64_t),
        MC_NUM("train", "beta1", train.beta1, double),
        MC_NUM("train", "beta2", train.beta2, double),
        MC_NUM("train", "weight_decay", train.weight_decay, double),
        MC_NUM("train", "seed", train.seed, std::uint64_t),
        {"train", "augment", [](const RunConfig& c) { return std::string(c.train.augment ? "true" : "false"); },
         [](RunConfig& c, const std::string& v) { c.train.augment = parse_bool(v, "train.augment"); }},
        MC_NUM("train", "saturation_min", train.augmentation.saturation_min, double),
        MC_NUM("train", "saturation_max", train.augmentation.saturation_max, double),
        MC_NUM("train", "brightness_shift", train.augmentation.brightness, double),
        MC_NUM("train", "checkpoint_every", train.checkpoint_every, std::int64_t),

        MC_NUM("loss", "cc", train.weights.cc, double),
        MC_NUM("loss", "per", train.weights.per, double),
        MC_NUM("loss", "adv", train.weights.adv, double),
        MC_NUM("loss", "colorfulness", train.weights.colorfulness, double),
        {"loss", "lab", [](const RunConfig& c) { return fmt(c.train.weights.per_space.at(ColorSpace::CIELab)); },
         [](RunConfig& c, const std::string& v) {
             c.train.weights.per_space[ColorSpace::CIELab] = parse_number<double>(v, "loss.lab");
         }},
        {"loss", "hsv", [](const RunConfig& c) { return fmt(c.train.weights.per_space.at(ColorSpace::HSV)); },
         [](RunConfig& c, const std::string& v) {
             c.train.weights.per_space[ColorSpace::HSV] = parse_number<double>(v, "loss.hsv");
         }},
        {"loss", "yuv", [](const RunConfig& c) { return fmt(c.train.weights.per_space.at(ColorSpace::YUV)); },
         [](RunConfig& c, const std::string& v) {
             c.train.weights.per_space[ColorSpace::YUV] = parse_number<double>(v, "loss.yuv");
         }},
        {"loss", "stages", [](const RunConfig& c) { return join(c.train.weights.stages); },
         [](RunConfig& c, const std::string& v) {
             c.train.weights.stages = parse_array<double, 5>(v, "loss.stages");
         }},
        {"loss", "reduction",
         [](const RunConfig& c) {
             return std::string(c.train.weights.channel_reduction == Reduction::Mean ? "mean" : "sum");
         },
         [](RunConfig& c, const std::string& v) {
             const std::string s = trim(v);
             if (s == "mean") {
                 c.train.weights.channel_reduction = Reduction::Mean;
             } else if (s == "sum") {
                 c.train.weights.channel_reduction = Reduction::Sum;
             } else {
                 throw ConfigError("loss.reduction: expected mean or sum, got '" + v + "'");
             }
         }},
    };
    return table;
}

#undef MC_NUM

const Field& find_field(const std::string& section, const std::string& key) {
    for (const auto& f : fields()) {
        if (f.section == section && f.key == key) return f;
    }
    throw ConfigError("unknown config key " + section + "." + key);
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }

    std::string preset = "desk";
    if (const auto meta = tree.get_child_optional("meta")) {
        for (const auto& [key, node] : *meta) {
            if (key == "schema") {
                if (parse_number<int>(node.data(), "meta.schema") != kConfigSchemaVersion) {
                    throw ConfigError("meta.schema: unsupported version " + node.data());
                }
            } else if (key == "preset") {
                preset = trim(node.data());
            } else {
                throw ConfigError("unknown config key meta." + key);
            }
        }
    }
    RunConfig config;
    if (preset == "desk") {
        config = RunConfig::desk();
    } else if (preset == "paper") {
        config = RunConfig::paper();
    } else {
        throw ConfigError("meta.preset: expected desk or paper, got '" + preset + "'");
    }

    for (const auto& [section, node] : tree) {
        if (section == "meta") continue;
        if (node.empty()) throw ConfigError("config key '" + section + "' must live inside a section");
        for (const auto& [key, value] : node) find_field(section, key).set(config, value.data());
    }
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        const auto dot = ov.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
            throw ConfigError("override '" + ov + "' must look like section.key=value");
        }
        find_field(ov.substr(0, dot), ov.substr(dot + 1, eq - dot - 1)).set(config, ov.substr(eq + 1));
    }
    config.validate();
    return config;
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), overrides);
}

std::string to_ini(const RunConfig& config) {
    std::ostringstream os;
    os << "[meta]\nschema = " << kConfigSchemaVersion << '\n';
    std::string section;
    for (const auto& f : fields()) {
        if (f.section != section) {
            section = f.section;
            os << "\n[" << section << "]\n";
        }
        os << f.key << " = " << f.get(config) << '\n';
    }
    return os.str();
}

}  // namespace multicolor
