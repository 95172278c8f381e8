// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "gaussvdb/report.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

namespace gaussvdb {
namespace {

std::string three_significant(double v) {
    if (v == 0.0) return "0";
    const int magnitude = int(std::floor(std::log10(std::abs(v))));
    const int decimals = std::max(0, 2 - magnitude);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s(buf);
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    return s;
}

std::string lod_label(Lod lod) {
    switch (lod) {
    case Lod::low: return "Low";
    case Lod::medium: return "Mid";
    case Lod::high: return "High";
    }
    return "?";
}

}  // namespace

FootprintReport footprint(const GaussianSet& set) {
    FootprintReport r;
    r.grid_class = set.grid_class;
    r.lod = set.lod;
    r.gaussian_count = set.size();
    for (const auto& g : set.gaussians) {
        if (g.shape == Shape::sphere) ++r.sphere_count;
        else ++r.ellipsoid_count;
    }
    const std::uint64_t opacity = set.grid_class == GridClass::volume ? r.gaussian_count : 0;
    r.payload_bytes = 4 * (3 * r.gaussian_count + r.sphere_count + 3 * r.ellipsoid_count + opacity);
    return r;
}

std::uint64_t footprint_bytes(const GaussianSet& set) { return footprint(set).payload_bytes; }

GridStats grid_stats(const SparseGrid& grid) {
    const auto c = grid.counts();
    return {c.active_voxels, c.leaf_count, c.tile_count, c.dense_leaf_count};
}

std::string format_megabytes(std::uint64_t bytes) { return three_significant(double(bytes) / 1e6) + "MB"; }

std::string format_count(std::uint64_t count) {
    if (count >= 1'000'000'000) return three_significant(double(count) / 1e9) + "B";
    if (count >= 1'000'000) return three_significant(double(count) / 1e6) + "M";
    if (count >= 1'000) return three_significant(double(count) / 1e3) + "K";
    return std::to_string(count);
}

std::string format_lod_cell(Lod lod, std::uint64_t bytes, std::uint64_t count) {
    return lod_label(lod) + " " + format_megabytes(bytes) + " / " + format_count(count);
}

std::string format_summary_table(const std::vector<SummaryRow>& rows) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"Dataset", "Voxels", "Low LOD", "Mid LOD", "High LOD"});
    for (const auto& row : rows) {
        std::vector<std::string> line{row.dataset, format_count(row.voxels), "-", "-", "-"};
        for (const auto& f : row.lods) {
            line[2 + std::size_t(f.lod)] = format_megabytes(f.payload_bytes) + " / " + format_count(f.gaussian_count);
        }
        cells.push_back(std::move(line));
    }
    std::vector<std::size_t> widths(5, 0);
    for (const auto& line : cells)
        for (std::size_t i = 0; i < line.size(); ++i) widths[i] = std::max(widths[i], line[i].size());
    std::ostringstream os;
    for (const auto& line : cells) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            os << std::left << std::setw(int(widths[i])) << line[i];
            if (i + 1 < line.size()) os << "  ";
        }
        os << '\n';
    }
    return os.str();
}

nlohmann::ordered_json to_json(const GridStats& s) {
    nlohmann::ordered_json j;
    j["active_voxels"] = s.active_voxels;
    j["leaf_count"] = s.leaf_count;
    j["tile_count"] = s.tile_count;
    j["dense_leaf_count"] = s.dense_leaf_count;
    j["dense_ratio"] = s.dense_ratio();
    return j;
}

nlohmann::ordered_json to_json(const FootprintReport& r) {
    nlohmann::ordered_json j;
    j["gaussian_count"] = r.gaussian_count;
    j["sphere_count"] = r.sphere_count;
    j["ellipsoid_count"] = r.ellipsoid_count;
    j["payload_bytes"] = r.payload_bytes;
    j["tag_bytes"] = r.tag_bytes();
    j["grid_class"] = std::string(to_string(r.grid_class));
    j["lod"] = std::string(to_string(r.lod));
    if (r.grid_stats) j["grid_stats"] = to_json(*r.grid_stats);
    return j;
}

}  // namespace gaussvdb
