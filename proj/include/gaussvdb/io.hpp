// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gaussvdb/gaussian.hpp"
#include "gaussvdb/sparse_grid.hpp"

namespace gaussvdb {

inline constexpr std::array<char, 6> kGridMagic{'S', 'V', 'D', 'B', '1', '\0'};
inline constexpr std::array<char, 6> kGaussianMagic{'G', 'P', 'T', 'S', '1', '\0'};

/// Bytes before the first record of a .gpts file: magic, count, class, lod, 4x4 f64 matrix.
inline constexpr std::size_t kGaussianHeaderBytes = 6 + 8 + 1 + 1 + 16 * 8;

enum class ValueType : std::uint8_t { f32, u8, u16 };

/// JSON sidecar describing a headerless little-endian voxel array (x fastest).
struct RawVolumeHeader {
    std::array<int, 3> dims{0, 0, 0};
    ValueType value_type = ValueType::f32;
    Vec3d voxel_size{1.0};
    float background = 0.f;
    float threshold = 0.f;
    GridClass grid_class = GridClass::volume;

    std::size_t value_bytes() const;
    std::size_t voxel_count() const {
        return std::size_t(dims[0]) * std::size_t(dims[1]) * std::size_t(dims[2]);
    }
};

RawVolumeHeader parse_raw_header(std::string_view json_text);
std::string format_raw_header(const RawVolumeHeader& header);

/// Integer types are normalized to [0, 1] (u8 / 255, u16 / 65535).
std::vector<float> decode_raw_values(std::span<const std::uint8_t> bytes, const RawVolumeHeader& header);

SparseGrid grid_from_raw(const RawVolumeHeader& header, std::span<const std::uint8_t> data,
                         bool collapse_tiles = false);
SparseGrid read_raw(const std::filesystem::path& header_path, const std::filesystem::path& data_path,
                    bool collapse_tiles = false);

std::vector<std::uint8_t> write_grid(const SparseGrid& grid);
SparseGrid read_grid(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> write_gaussians(const GaussianSet& set);
GaussianSet read_gaussians(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace gaussvdb
