// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

// Writes synthetic raw volumes with their JSON headers, for trying out the pipeline.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "gaussvdb/error.hpp"
#include "gaussvdb/phantom.hpp"

int main(int argc, char** argv) {
    using namespace gaussvdb;
    CLI::App app{"Synthetic volume generator", "gaussvdb_phantom"};
    std::string kind = "dense";
    int size = 64;
    double radius = 0.0;
    double fill = 0.05;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::string name;
    app.add_option("--kind", kind)->check(CLI::IsMember({"dense", "ball", "noise", "levelset"}));
    app.add_option("--size", size)->check(CLI::Range(1, 1024));
    app.add_option("--radius", radius, "Ball or sphere radius in voxels (default: size / 3)");
    app.add_option("--fill", fill, "Active fraction for noise")->check(CLI::Range(0.0, 1.0));
    app.add_option("--seed", seed);
    app.add_option("--out-dir", out_dir);
    app.add_option("--name", name, "File stem (default: <kind><size>)");
    CLI11_PARSE(app, argc, argv);

    if (radius <= 0.0) radius = size / 3.0;
    if (name.empty()) name = kind + std::to_string(size);
    try {
        Phantom p;
        if (kind == "dense") p = dense_phantom(size);
        else if (kind == "ball") p = ball_phantom(size, radius);
        else if (kind == "noise") p = noise_phantom(size, fill, seed);
        else p = sphere_levelset_phantom(size, radius, 3.0);

        const std::filesystem::path dir(out_dir);
        std::filesystem::create_directories(dir);
        const std::string header = format_raw_header(p.header);
        write_file(dir / (name + ".json"),
                   std::span(reinterpret_cast<const std::uint8_t*>(header.data()), header.size()));
        write_file(dir / (name + ".raw"), p.raw_bytes());
        std::cout << (dir / (name + ".json")).string() << '\n' << (dir / (name + ".raw")).string() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
