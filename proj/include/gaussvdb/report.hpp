// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaussvdb/gaussian.hpp"
#include "gaussvdb/sparse_grid.hpp"

namespace gaussvdb {

struct GridStats {
    std::uint64_t active_voxels = 0;
    std::uint64_t leaf_count = 0;
    std::uint64_t tile_count = 0;
    std::uint64_t dense_leaf_count = 0;

    /// Dense leaves over all leaves; 0 for a grid without leaves.
    double dense_ratio() const {
        return leaf_count ? double(dense_leaf_count) / double(leaf_count) : 0.0;
    }
};

/// Storage accounting for a Gaussian set: 3 floats of position, 1 (sphere) or 3 (ellipsoid)
/// floats of radii, and 1 float of opacity for volumes only. Shape tags are not included.
struct FootprintReport {
    std::uint64_t gaussian_count = 0;
    std::uint64_t sphere_count = 0;
    std::uint64_t ellipsoid_count = 0;
    std::uint64_t payload_bytes = 0;
    GridClass grid_class = GridClass::volume;
    Lod lod = Lod::low;
    std::optional<GridStats> grid_stats;

    std::uint64_t tag_bytes() const { return gaussian_count; }
};

FootprintReport footprint(const GaussianSet& set);
std::uint64_t footprint_bytes(const GaussianSet& set);

GridStats grid_stats(const SparseGrid& grid);

/// "2.8MB" style: decimal megabytes, three significant digits, trailing zeros dropped.
std::string format_megabytes(std::uint64_t bytes);
/// "66K" / "3.5M" style count.
std::string format_count(std::uint64_t count);
/// One LOD cell of a summary row, e.g. "Low 2.8MB / 66K".
std::string format_lod_cell(Lod lod, std::uint64_t bytes, std::uint64_t count);

/// Dataset summary: voxel count and one footprint per extracted LOD.
struct SummaryRow {
    std::string dataset;
    std::uint64_t voxels = 0;
    std::vector<FootprintReport> lods;
};

std::string format_summary_table(const std::vector<SummaryRow>& rows);

nlohmann::ordered_json to_json(const GridStats& stats);
nlohmann::ordered_json to_json(const FootprintReport& report);

}  // namespace gaussvdb
