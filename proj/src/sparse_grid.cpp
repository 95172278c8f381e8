// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "gaussvdb/sparse_grid.hpp"

#include <cmath>
#include <limits>

#include "gaussvdb/error.hpp"

namespace gaussvdb {

LeafNode::LeafNode(const Coord& origin, float fill, bool active) : origin_(origin) {
    values_.fill(fill);
    if (active) mask_.fill();
}

SparseGrid::SparseGrid(float background, GridTransform transform, GridClass grid_class,
                       std::string name)
    : background_(background),
      transform_(std::move(transform)),
      grid_class_(grid_class),
      name_(std::move(name)) {}

TopNode& SparseGrid::ensure_top(const Coord& origin) {
    auto& slot = top_[origin];
    if (!slot) slot = std::make_unique<TopNode>(origin);
    return *slot;
}

void SparseGrid::set_voxel(const Coord& c, float value) {
    TopNode& top = ensure_top(c.aligned(TopNode::kLog2Total));
    Internal4Node& mid = top.ensure_child(TopNode::slot_of(c), background_);
    LeafNode& leaf = mid.ensure_child(Internal4Node::slot_of(c), background_);
    leaf.set_active_value(LeafNode::offset_of(c), value);
}

VoxelValue SparseGrid::get_voxel(const Coord& c) const {
    const auto it = top_.find(c.aligned(TopNode::kLog2Total));
    if (it == top_.end()) return {background_, false};
    return it->second->get(c, background_);
}

void SparseGrid::set_tile(const Coord& c, float value, int level) {
    TopNode& top = ensure_top(c.aligned(TopNode::kLog2Total));
    if (level == 5) {
        top.set_tile(TopNode::slot_of(c), value);
    } else if (level == 4) {
        Internal4Node& mid = top.ensure_child(TopNode::slot_of(c), background_);
        mid.set_tile(Internal4Node::slot_of(c), value);
    } else {
        throw ValueError("tile level must be 4 or 5");
    }
}

void SparseGrid::insert_leaf(std::unique_ptr<LeafNode> leaf) {
    const Coord o = leaf->origin();
    if (o.aligned(LeafNode::kLog2Total) != o) throw ValueError("leaf origin not aligned to 8");
    TopNode& top = ensure_top(o.aligned(TopNode::kLog2Total));
    Internal4Node& mid = top.ensure_child(TopNode::slot_of(o), background_);
    mid.adopt_child(Internal4Node::slot_of(o), std::move(leaf));
}

std::vector<const LeafNode*> SparseGrid::leaves() const {
    std::vector<const LeafNode*> out;
    for (const auto& [origin, top] : top_) {
        top->child_mask().for_each_on([&](std::size_t s5) {
            const Internal4Node& mid = *top->child(int(s5));
            mid.child_mask().for_each_on([&](std::size_t s4) { out.push_back(mid.child(int(s4))); });
        });
    }
    return out;
}

std::vector<TileInfo> SparseGrid::tiles() const {
    std::vector<TileInfo> out;
    for (const auto& [origin, top] : top_) {
        for (int s5 = 0; s5 < TopNode::kSlots; ++s5) {
            if (top->value_mask().test(std::size_t(s5))) {
                out.push_back({CoordBox::cube(top->slot_origin(s5), TopNode::kChildSpan),
                               top->tile_value(s5), 5});
            } else if (const Internal4Node* mid = top->child(s5)) {
                mid->value_mask().for_each_on([&](std::size_t s4) {
                    out.push_back({CoordBox::cube(mid->slot_origin(int(s4)),
                                                  Internal4Node::kChildSpan),
                                   mid->tile_value(int(s4)), 4});
                });
            }
        }
    }
    return out;
}

GridStatsCounts SparseGrid::counts() const {
    GridStatsCounts c;
    constexpr std::uint64_t kTile4 = std::uint64_t(Internal4Node::kChildSpan) *
                                     Internal4Node::kChildSpan * Internal4Node::kChildSpan;
    constexpr std::uint64_t kTile5 =
        std::uint64_t(TopNode::kChildSpan) * TopNode::kChildSpan * TopNode::kChildSpan;
    for (const auto& [origin, top] : top_) {
        const auto t5 = top->value_mask().count();
        c.tile_count += t5;
        c.active_voxels += t5 * kTile5;
        top->child_mask().for_each_on([&](std::size_t s5) {
            const Internal4Node& mid = *top->child(int(s5));
            const auto t4 = mid.value_mask().count();
            c.tile_count += t4;
            c.active_voxels += t4 * kTile4;
            mid.child_mask().for_each_on([&](std::size_t s4) {
                const LeafNode& leaf = *mid.child(int(s4));
                const auto n = std::uint64_t(leaf.active_count());
                ++c.leaf_count;
                c.active_voxels += n;
                if (n == LeafNode::kSize) ++c.dense_leaf_count;
            });
        });
    }
    return c;
}

std::optional<CoordBox> SparseGrid::active_bbox() const {
    std::optional<CoordBox> box;
    auto include = [&](const CoordBox& b) { box = box ? merge_boxes(*box, b) : b; };
    for (const LeafNode* leaf : leaves()) {
        if (auto b = leaf_active_bbox(*leaf)) include(*b);
    }
    for (const TileInfo& t : tiles()) include(t.bbox);
    return box;
}

std::optional<CoordBox> leaf_active_bbox(const LeafNode& leaf) {
    if (leaf.mask().none()) return std::nullopt;
    Coord lo{LeafNode::kDim, LeafNode::kDim, LeafNode::kDim};
    Coord hi{-1, -1, -1};
    leaf.mask().for_each_on([&](std::size_t off) {
        const Coord l = LeafNode::local_coord(int(off));
        lo = cmin(lo, l);
        hi = cmax(hi, l);
    });
    return CoordBox{leaf.origin() + lo, leaf.origin() + hi + Coord{1, 1, 1}};
}

SparseGrid sparsify_from_dense(std::span<const float> data, const std::array<int, 3>& dims,
                               float background, float tolerance, const GridTransform& transform,
                               bool collapse_tiles) {
    if (dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0) throw ValueError("dims must be positive");
    const std::size_t expected = std::size_t(dims[0]) * std::size_t(dims[1]) * std::size_t(dims[2]);
    if (data.size() != expected) {
        throw ValueError("dense data length " + std::to_string(data.size()) +
                         " does not match dims product " + std::to_string(expected));
    }
    if (!(tolerance >= 0.f)) throw ValueError("tolerance must be non-negative");

    SparseGrid grid(background, transform);
    auto at = [&](int x, int y, int z) {
        return data[std::size_t(x) + std::size_t(dims[0]) * (std::size_t(y) + std::size_t(dims[1]) * std::size_t(z))];
    };

    for (int bx = 0; bx < dims[0]; bx += LeafNode::kDim) {
        for (int by = 0; by < dims[1]; by += LeafNode::kDim) {
            for (int bz = 0; bz < dims[2]; bz += LeafNode::kDim) {
                auto leaf = std::make_unique<LeafNode>(Coord{bx, by, bz}, background);
                for (int lx = 0; lx < LeafNode::kDim && bx + lx < dims[0]; ++lx) {
                    for (int ly = 0; ly < LeafNode::kDim && by + ly < dims[1]; ++ly) {
                        for (int lz = 0; lz < LeafNode::kDim && bz + lz < dims[2]; ++lz) {
                            const float v = at(bx + lx, by + ly, bz + lz);
                            if (std::abs(v - background) <= tolerance) continue;
                            leaf->set_active_value(LeafNode::offset_of({lx, ly, lz}), v);
                        }
                    }
                }
                if (leaf->mask().none()) continue;

                if (collapse_tiles && leaf->dense()) {
                    double sum = 0.0;
                    for (float v : leaf->values()) sum += v;
                    const double mean = sum / LeafNode::kSize;
                    bool uniform = true;
                    for (float v : leaf->values()) {
                        if (std::abs(double(v) - mean) > double(tolerance)) {
                            uniform = false;
                            break;
                        }
                    }
                    if (uniform) {
                        grid.set_tile(leaf->origin(), float(mean), 4);
                        continue;
                    }
                }
                grid.insert_leaf(std::move(leaf));
            }
        }
    }
    return grid;
}

}  // namespace gaussvdb
