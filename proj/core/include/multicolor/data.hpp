#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "multicolor/colorspace.hpp"
#include "multicolor/image.hpp"

namespace multicolor {

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Split { Train, Validation };

struct ManifestEntry {
    /// Relative to the manifest root.
    std::string path;
    Split split = Split::Train;
};

struct DatasetManifest {
    std::filesystem::path root;
    std::vector<ManifestEntry> entries;
    int height = 64;
    int width = 64;
    double split_ratio = 0.8;
    std::uint64_t seed = 0;
    /// FNV-1a over the ordered file list; recomputed by rehash().
    std::string hash;

    [[nodiscard]] std::size_t size() const noexcept { return entries.size(); }
    [[nodiscard]] std::vector<std::size_t> indices(Split split) const;
    void rehash();
};

/// Lists PNG/JPEG/BMP files under `root` (recursively), shuffles them with
/// `seed` and assigns the first floor(n * split_ratio) to the training split.
/// Throws DataError for a missing or empty folder.
DatasetManifest build_manifest(const std::filesystem::path& root, double split_ratio, std::uint64_t seed,
                               int height = 64, int width = 64);

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);

struct Sample {
    std::string path;
    RgbImage rgb;
    /// BT.601 luma of `rgb`, equal to its YUV brightness channel.
    GrayImage gray;
    /// Normalized channel pairs, one per requested space in request order.
    std::vector<ChannelPair> pairs;
};

/// Prepares a decoded image: bilinear resize to the target size, gray and channel pairs.
Sample make_sample(const RgbImage& decoded, int height, int width, std::span<const ColorSpace> spaces);

/// Loads entry `index`. An undecodable file is reported on stderr and removed
/// from the manifest; the entry that takes its place is loaded instead (wrapping
/// to the start). Throws DataError when no decodable entry remains.
Sample load_sample(DatasetManifest& manifest, std::size_t index, std::span<const ColorSpace> spaces);

/// Loads every entry of `split`, dropping undecodable files from the manifest
/// with a warning.
std::vector<Sample> load_split(DatasetManifest& manifest, Split split, std::span<const ColorSpace> spaces);

/// Procedural outdoor scene whose colors follow from brightness, texture and
/// position: sky gradient, textured grass, a sun disk and a brick wall.
RgbImage synthesize_scene(std::uint64_t seed, int height, int width);

/// Writes `count` scenes as scene_000.png ... into `dir`; returns the paths.
std::vector<std::filesystem::path> write_synthetic_corpus(const std::filesystem::path& dir, int count, int size,
                                                          std::uint64_t seed);

}  // namespace multicolor
