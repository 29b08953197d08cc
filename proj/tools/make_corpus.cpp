#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "multicolor/data.hpp"

// Writes the procedural scene corpus used for desk-scale runs.
int main(int argc, char** argv) {
    CLI::App app{"Write a synthetic scene corpus", "multicolor_make_corpus"};
    std::string out;
    int count = 16;
    int size = 64;
    std::uint64_t seed = 0;
    app.add_option("-o,--out", out, "Output folder")->required();
    app.add_option("-n,--count", count, "Number of images")->check(CLI::PositiveNumber);
    app.add_option("--size", size, "Side length in pixels")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Scene seed");
    CLI11_PARSE(app, argc, argv);
    try {
        const auto paths = multicolor::write_synthetic_corpus(out, count, size, seed);
        std::cout << "wrote " << paths.size() << " images to " << out << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
