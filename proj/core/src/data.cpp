#include "multicolor/data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include <json.hpp>

#include "multicolor/image_io.hpp"

namespace multicolor {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kManifestVersion = 1;

bool is_image_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp";
}

std::string fnv1a_hex(const std::vector<ManifestEntry>& entries) {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&h](unsigned char c) {
        h ^= c;
        h *= 1099511628211ull;
    };
    for (const auto& e : entries) {
        for (unsigned char c : e.path) mix(c);
        mix('\n');
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

std::vector<std::size_t> DatasetManifest::indices(Split split) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].split == split) out.push_back(i);
    }
    return out;
}

void DatasetManifest::rehash() { hash = fnv1a_hex(entries); }

DatasetManifest build_manifest(const fs::path& root, double split_ratio, std::uint64_t seed, int height, int width) {
    if (!(split_ratio >= 0.0 && split_ratio <= 1.0)) throw DataError("split ratio must lie in [0, 1]");
    if (height <= 0 || width <= 0) throw DataError("target size must be positive");
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw DataError("dataset root is not a directory: " + root.string());

    std::vector<std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file() && is_image_file(entry.path())) {
            files.push_back(fs::relative(entry.path(), root).generic_string());
        }
    }
    if (files.empty()) throw DataError("no image files under " + root.string());
    std::sort(files.begin(), files.end());
    std::mt19937_64 rng(seed);
    std::shuffle(files.begin(), files.end(), rng);

    DatasetManifest m;
    m.root = root;
    m.height = height;
    m.width = width;
    m.split_ratio = split_ratio;
    m.seed = seed;
    const auto n_train = static_cast<std::size_t>(std::floor(split_ratio * static_cast<double>(files.size())));
    for (std::size_t i = 0; i < files.size(); ++i) {
        m.entries.push_back({files[i], i < n_train ? Split::Train : Split::Validation});
    }
    m.rehash();
    return m;
}

void save_manifest(const DatasetManifest& m, const fs::path& path) {
    json j;
    j["version"] = kManifestVersion;
    j["root"] = m.root.string();
    j["height"] = m.height;
    j["width"] = m.width;
    j["split_ratio"] = m.split_ratio;
    j["seed"] = m.seed;
    j["hash"] = m.hash;
    j["files"] = json::array();
    for (const auto& e : m.entries) {
        j["files"].push_back({{"path", e.path}, {"split", e.split == Split::Train ? "train" : "val"}});
    }
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw DataError("cannot write manifest " + path.string());
    out << j.dump(2) << '\n';
}

DatasetManifest load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read manifest " + path.string());
    json j;
    try {
        in >> j;
        if (j.at("version").get<int>() != kManifestVersion) throw DataError("unsupported manifest version");
        DatasetManifest m;
        m.root = j.at("root").get<std::string>();
        m.height = j.at("height").get<int>();
        m.width = j.at("width").get<int>();
        m.split_ratio = j.at("split_ratio").get<double>();
        m.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& f : j.at("files")) {
            m.entries.push_back(
                {f.at("path").get<std::string>(), f.at("split").get<std::string>() == "train" ? Split::Train : Split::Validation});
        }
        m.rehash();
        if (m.hash != j.at("hash").get<std::string>()) throw DataError("manifest hash does not match its file list");
        return m;
    } catch (const json::exception& e) {
        throw DataError("malformed manifest " + path.string() + ": " + e.what());
    }
}

Sample make_sample(const RgbImage& decoded, int height, int width, std::span<const ColorSpace> spaces) {
    Sample s;
    s.rgb = resize_bilinear(decoded, height, width);
    s.gray = to_gray(s.rgb);
    for (ColorSpace space : spaces) s.pairs.push_back(extract_color_channels(s.rgb, space));
    return s;
}

Sample load_sample(DatasetManifest& m, std::size_t index, std::span<const ColorSpace> spaces) {
    if (index >= m.entries.size()) throw std::out_of_range("load_sample: index out of range");
    while (!m.entries.empty()) {
        const auto& entry = m.entries[index];
        try {
            Sample s = make_sample(read_rgb(m.root / entry.path), m.height, m.width, spaces);
            s.path = entry.path;
            return s;
        } catch (const ImageIoError& e) {
            std::cerr << "warning: skipping " << entry.path << ": " << e.what() << '\n';
            m.entries.erase(m.entries.begin() + static_cast<std::ptrdiff_t>(index));
            m.rehash();
            if (index >= m.entries.size()) index = 0;
        }
    }
    throw DataError("no decodable images left in the dataset");
}

std::vector<Sample> load_split(DatasetManifest& m, Split split, std::span<const ColorSpace> spaces) {
    std::vector<Sample> out;
    std::size_t i = 0;
    while (i < m.entries.size()) {
        const auto& entry = m.entries[i];
        if (entry.split != split) {
            ++i;
            continue;
        }
        try {
            Sample s = make_sample(read_rgb(m.root / entry.path), m.height, m.width, spaces);
            s.path = entry.path;
            out.push_back(std::move(s));
            ++i;
        } catch (const ImageIoError& e) {
            std::cerr << "warning: skipping " << entry.path << ": " << e.what() << '\n';
            m.entries.erase(m.entries.begin() + static_cast<std::ptrdiff_t>(i));
            m.rehash();
        }
    }
    return out;
}

RgbImage synthesize_scene(std::uint64_t seed, int height, int width) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double horizon = (0.35 + 0.25 * u(rng)) * height;
    const double sun_x = (0.15 + 0.7 * u(rng)) * width;
    const double sun_y = (0.1 + 0.15 * u(rng)) * height;
    const double sun_r = (0.06 + 0.06 * u(rng)) * std::min(height, width);
    const int wall_x0 = static_cast<int>((0.05 + 0.5 * u(rng)) * width);
    const int wall_x1 = wall_x0 + static_cast<int>((0.2 + 0.2 * u(rng)) * width);
    const int wall_y0 = static_cast<int>(horizon - (0.1 + 0.15 * u(rng)) * height);
    const int wall_y1 = static_cast<int>(horizon + (0.1 + 0.2 * u(rng)) * height);
    const int brick_h = std::max(2, height / 16);
    const int brick_w = 2 * brick_h;
    const double sky_tint = 0.1 * (u(rng) - 0.5);
    const double grass_tint = 0.1 * (u(rng) - 0.5);

    RgbImage img(height, width);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            std::array<double, 3> c{};
            const double dx = x - sun_x, dy = y - sun_y;
            if (x >= wall_x0 && x < wall_x1 && y >= wall_y0 && y < wall_y1) {
                const int row = (y - wall_y0) / brick_h;
                const int offset = (row % 2) * brick_w / 2;
                const bool mortar = (y - wall_y0) % brick_h == 0 || (x - wall_x0 + offset) % brick_w == 0;
                const double n = 0.08 * (u(rng) - 0.5);
                c = mortar ? std::array<double, 3>{0.82, 0.8, 0.76} : std::array<double, 3>{0.66 + n, 0.24 + n, 0.14 + n};
            } else if (y < horizon) {
                if (dx * dx + dy * dy <= sun_r * sun_r) {
                    c = {1.0, 0.88, 0.3};
                } else {
                    const double t = y / horizon;
                    c = {0.15 + 0.45 * t, 0.35 + sky_tint + 0.45 * t, 0.8 + 0.15 * t};
                }
            } else {
                const double depth = (y - horizon) / std::max(1.0, height - horizon);
                const double n = 0.25 * (u(rng) - 0.5);
                const double shade = 1.0 - 0.35 * depth + n;
                c = {(0.22 + grass_tint) * shade, 0.55 * shade, 0.12 * shade};
            }
            auto p = img.pixel(static_cast<std::size_t>(y) * width + x);
            for (int k = 0; k < 3; ++k) p[k] = static_cast<float>(std::clamp(c[k], 0.0, 1.0));
        }
    }
    return img;
}

std::vector<fs::path> write_synthetic_corpus(const fs::path& dir, int count, int size, std::uint64_t seed) {
    if (count <= 0 || size <= 0) throw DataError("corpus count and size must be positive");
    fs::create_directories(dir);
    std::vector<fs::path> paths;
    for (int i = 0; i < count; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "scene_%03d.png", i);
        const fs::path p = dir / name;
        write_png(p, synthesize_scene(seed + static_cast<std::uint64_t>(i), size, size));
        paths.push_back(p);
    }
    return paths;
}

}  // namespace multicolor
