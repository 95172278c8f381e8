// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "gaussvdb/math.hpp"

namespace gaussvdb {

enum class TransferFunction : std::uint8_t { jet = 0, viridis = 1 };

std::string_view to_string(TransferFunction tf);
std::optional<TransferFunction> parse_transfer_function(std::string_view s);

struct ColorLut {
    static constexpr std::size_t kSize = 256;
    std::array<Vec3d, kSize> entries;
};

const ColorLut& color_lut(TransferFunction tf);

/// Clamps value into [lo, hi], normalizes, and returns the nearest of the 256 entries.
Vec3d tf_lookup(TransferFunction tf, double value, double lo, double hi);

}  // namespace gaussvdb
