// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <functional>

#include "gaussvdb/math.hpp"

namespace gaussvdb {

/// Signed index-space voxel coordinate.
struct Coord {
    std::int32_t x = 0, y = 0, z = 0;

    constexpr Coord() = default;
    constexpr Coord(std::int32_t x_, std::int32_t y_, std::int32_t z_) : x(x_), y(y_), z(z_) {}

    constexpr auto operator<=>(const Coord&) const = default;

    constexpr Coord operator+(const Coord& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Coord operator-(const Coord& o) const { return {x - o.x, y - o.y, z - o.z}; }

    /// Round each component down to a multiple of 2^log2 (floor semantics for negatives).
    constexpr Coord aligned(int log2) const {
        const std::int32_t m = ~((std::int32_t{1} << log2) - 1);
        return {x & m, y & m, z & m};
    }

    constexpr std::int32_t operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3d as_vec() const { return {double(x), double(y), double(z)}; }
};

constexpr Coord cmin(const Coord& a, const Coord& b) {
    return {a.x < b.x ? a.x : b.x, a.y < b.y ? a.y : b.y, a.z < b.z ? a.z : b.z};
}
constexpr Coord cmax(const Coord& a, const Coord& b) {
    return {a.x > b.x ? a.x : b.x, a.y > b.y ? a.y : b.y, a.z > b.z ? a.z : b.z};
}

/// Half-open index-space box [min, max).
struct CoordBox {
    Coord min;
    Coord max;

    constexpr bool operator==(const CoordBox&) const = default;

    constexpr bool empty() const { return !(min.x < max.x && min.y < max.y && min.z < max.z); }

    constexpr bool contains(const Coord& c) const {
        return c.x >= min.x && c.x < max.x && c.y >= min.y && c.y < max.y && c.z >= min.z &&
               c.z < max.z;
    }

    /// True when the interiors share at least one voxel.
    constexpr bool overlaps(const CoordBox& o) const {
        return min.x < o.max.x && o.min.x < max.x && min.y < o.max.y && o.min.y < max.y &&
               min.z < o.max.z && o.min.z < max.z;
    }

    /// True when the closed boxes meet but the interiors are disjoint.
    constexpr bool touches(const CoordBox& o) const {
        const bool closed = min.x <= o.max.x && o.min.x <= max.x && min.y <= o.max.y &&
                            o.min.y <= max.y && min.z <= o.max.z && o.min.z <= max.z;
        return closed && !overlaps(o);
    }

    std::int64_t volume() const {
        if (empty()) return 0;
        return std::int64_t(max.x - min.x) * (max.y - min.y) * (max.z - min.z);
    }

    Vec3d center() const { return (min.as_vec() + max.as_vec()) * 0.5; }
    Vec3d extent() const { return max.as_vec() - min.as_vec(); }

    static constexpr CoordBox cube(const Coord& origin, std::int32_t span) {
        return {origin, origin + Coord{span, span, span}};
    }
};

/// Componentwise union of two boxes.
constexpr CoordBox merge_boxes(const CoordBox& a, const CoordBox& b) {
    return {cmin(a.min, b.min), cmax(a.max, b.max)};
}

struct CoordHash {
    std::size_t operator()(const Coord& c) const noexcept {
        std::uint64_t h = std::uint64_t(std::uint32_t(c.x)) * 73856093u;
        h ^= std::uint64_t(std::uint32_t(c.y)) * 19349663u;
        h ^= std::uint64_t(std::uint32_t(c.z)) * 83492791u;
        return std::size_t(h);
    }
};

}  // namespace gaussvdb
