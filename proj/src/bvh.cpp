// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "gaussvdb/bvh.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace gaussvdb {

Aabb Aabb::of(const Gaussian& g) {
    const Vec3d p(g.position);
    const Vec3d r(g.radii);
    return {p - r, p + r};
}

std::optional<Interval> ray_aabb(const Ray& ray, const Aabb& box) {
    double t0 = 0.0;
    double t1 = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < 3; ++a) {
        const double o = ray.origin[a];
        const double d = ray.direction[a];
        if (d == 0.0) {
            if (o < box.min[a] || o > box.max[a]) return std::nullopt;
            continue;
        }
        const double inv = 1.0 / d;
        double near = (box.min[a] - o) * inv;
        double far = (box.max[a] - o) * inv;
        if (near > far) std::swap(near, far);
        t0 = std::max(t0, near);
        t1 = std::min(t1, far);
        if (t0 > t1) return std::nullopt;
    }
    return Interval{t0, t1};
}

Bvh::Bvh(const GaussianSet& set) {
    const std::size_t n = set.size();
    if (n == 0) return;
    std::vector<Aabb> prim_boxes(n);
    std::vector<Vec3d> centres(n);
    for (std::size_t i = 0; i < n; ++i) {
        prim_boxes[i] = Aabb::of(set.gaussians[i]);
        centres[i] = Vec3d(set.gaussians[i].position);
    }
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), std::uint32_t{0});
    nodes_.reserve(2 * (n / kLeafSize + 1));
    build(order_, 0, std::uint32_t(n), prim_boxes, centres);
    boxes_.resize(n);
    for (std::size_t i = 0; i < n; ++i) boxes_[i] = prim_boxes[order_[i]];
}

std::uint32_t Bvh::build(std::vector<std::uint32_t>& ids, std::uint32_t begin, std::uint32_t end,
                         const std::vector<Aabb>& prim_boxes, const std::vector<Vec3d>& centres) {
    const auto node_index = std::uint32_t(nodes_.size());
    nodes_.emplace_back();

    Aabb bounds = prim_boxes[ids[begin]];
    Vec3d cmin = centres[ids[begin]];
    Vec3d cmax = cmin;
    for (std::uint32_t i = begin + 1; i < end; ++i) {
        bounds.grow(prim_boxes[ids[i]]);
        cmin = vmin(cmin, centres[ids[i]]);
        cmax = vmax(cmax, centres[ids[i]]);
    }
    nodes_[node_index].bounds = bounds;

    const Vec3d spread = cmax - cmin;
    if (end - begin <= kLeafSize || (spread.x == 0.0 && spread.y == 0.0 && spread.z == 0.0)) {
        nodes_[node_index].index = begin;
        nodes_[node_index].count = end - begin;
        return node_index;
    }

    std::size_t axis = 0;
    if (spread.y > spread[axis]) axis = 1;
    if (spread.z > spread[axis]) axis = 2;
    const std::uint32_t mid = begin + (end - begin) / 2;
    // Ties broken by index so the tree only depends on the input, not on nth_element internals.
    std::nth_element(ids.begin() + begin, ids.begin() + mid, ids.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         const double ca = centres[a][axis], cb = centres[b][axis];
                         return ca < cb || (ca == cb && a < b);
                     });

    build(ids, begin, mid, prim_boxes, centres);
    const std::uint32_t right = build(ids, mid, end, prim_boxes, centres);
    nodes_[node_index].index = right;
    nodes_[node_index].count = 0;
    return node_index;
}

std::vector<std::uint32_t> Bvh::overlaps(const Ray& ray) const {
    std::vector<std::uint32_t> out;
    if (nodes_.empty()) return out;
    std::vector<std::uint32_t> stack{0};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        const std::uint32_t idx = stack.back();
        stack.pop_back();
        if (!ray_aabb(ray, node.bounds)) continue;
        if (node.leaf()) {
            for (std::uint32_t i = node.index; i < node.index + node.count; ++i) {
                if (ray_aabb(ray, boxes_[i])) out.push_back(order_[i]);
            }
        } else {
            stack.push_back(node.index);
            stack.push_back(idx + 1);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace gaussvdb
