// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gaussvdb/gaussian.hpp"
#include "gaussvdb/math.hpp"

namespace gaussvdb {

struct Ray {
    Vec3d origin;
    Vec3d direction;  // unit length

    Vec3d at(double t) const { return origin + direction * t; }
};

struct Aabb {
    Vec3d min{0.0};
    Vec3d max{0.0};

    static Aabb of(const Gaussian& g);
    void grow(const Aabb& o) {
        min = vmin(min, o.min);
        max = vmax(max, o.max);
    }
    bool contains(const Aabb& o) const {
        return min.x <= o.min.x && min.y <= o.min.y && min.z <= o.min.z && max.x >= o.max.x &&
               max.y >= o.max.y && max.z >= o.max.z;
    }
    Vec3d centre() const { return (min + max) * 0.5; }
};

struct Interval {
    double t0 = 0.0;
    double t1 = 0.0;
};

/// Slab test; the interval is clipped to t >= 0.
std::optional<Interval> ray_aabb(const Ray& ray, const Aabb& box);

/// Median-split bounding volume hierarchy over per-Gaussian AABBs.
class Bvh {
public:
    static constexpr std::uint32_t kLeafSize = 4;

    struct Node {
        Aabb bounds;
        /// Leaf: first index into primitive order. Interior: index of the right child
        /// (the left child immediately follows its parent).
        std::uint32_t index = 0;
        /// Number of primitives for a leaf, 0 for an interior node.
        std::uint32_t count = 0;

        bool leaf() const { return count > 0; }
    };

    Bvh() = default;
    explicit Bvh(const GaussianSet& set);

    bool empty() const { return nodes_.empty(); }
    const std::vector<Node>& nodes() const { return nodes_; }
    /// Gaussian indices in leaf order.
    const std::vector<std::uint32_t>& order() const { return order_; }
    /// Primitive AABBs, permuted to match order().
    const std::vector<Aabb>& boxes() const { return boxes_; }

    /// Every Gaussian index whose AABB the ray overlaps at t >= 0, ascending.
    std::vector<std::uint32_t> overlaps(const Ray& ray) const;

private:
    std::uint32_t build(std::vector<std::uint32_t>& ids, std::uint32_t begin, std::uint32_t end,
                        const std::vector<Aabb>& prim_boxes, const std::vector<Vec3d>& centres);

    std::vector<Node> nodes_;
    std::vector<std::uint32_t> order_;
    std::vector<Aabb> boxes_;
};

}  // namespace gaussvdb
