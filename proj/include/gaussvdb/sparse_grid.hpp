// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "gaussvdb/coord.hpp"
#include "gaussvdb/transform.hpp"

namespace gaussvdb {

enum class GridClass : std::uint8_t { volume = 0, levelset = 1 };

struct VoxelValue {
    float value = 0.f;
    bool active = false;

    bool operator==(const VoxelValue&) const = default;
};

/// Fixed-size bitset with word access, used for child, value and activity masks.
template <std::size_t N>
class BitMask {
    static_assert(N % 64 == 0);

public:
    static constexpr std::size_t kBits = N;
    static constexpr std::size_t kWords = N / 64;

    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    void fill() { words_.fill(~std::uint64_t{0}); }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto w : words_) n += std::size_t(std::popcount(w));
        return n;
    }
    bool all() const { return count() == N; }
    bool none() const {
        for (auto w : words_)
            if (w) return false;
        return true;
    }

    bool disjoint(const BitMask& o) const {
        for (std::size_t i = 0; i < kWords; ++i)
            if (words_[i] & o.words_[i]) return false;
        return true;
    }

    /// Calls fn(index) for every set bit in ascending order.
    template <typename Fn>
    void for_each_on(Fn&& fn) const {
        for (std::size_t w = 0; w < kWords; ++w) {
            std::uint64_t bits = words_[w];
            while (bits) {
                const int b = std::countr_zero(bits);
                fn(w * 64 + std::size_t(b));
                bits &= bits - 1;
            }
        }
    }

    std::span<const std::uint64_t, kWords> words() const { return words_; }
    std::span<std::uint64_t, kWords> words() { return words_; }

    bool operator==(const BitMask&) const = default;

private:
    std::array<std::uint64_t, kWords> words_{};
};

/// 8x8x8 block of voxels. Linear offset is x-major: (x << 6) | (y << 3) | z.
class LeafNode {
public:
    static constexpr int kLevel = 3;
    static constexpr int kLog2Dim = 3;
    static constexpr int kLog2Total = 3;
    static constexpr int kDim = 8;
    static constexpr int kSize = 512;
    using Mask = BitMask<kSize>;

    LeafNode(const Coord& origin, float fill, bool active = false);

    const Coord& origin() const { return origin_; }
    CoordBox bbox() const { return CoordBox::cube(origin_, kDim); }

    static int offset_of(const Coord& c) { return ((c.x & 7) << 6) | ((c.y & 7) << 3) | (c.z & 7); }
    static Coord local_coord(int offset) { return {offset >> 6, (offset >> 3) & 7, offset & 7}; }
    Coord voxel_coord(int offset) const { return origin_ + local_coord(offset); }

    float value(int offset) const { return values_[std::size_t(offset)]; }
    bool is_active(int offset) const { return mask_.test(std::size_t(offset)); }
    void set_active_value(int offset, float v) {
        values_[std::size_t(offset)] = v;
        mask_.set(std::size_t(offset));
    }

    int active_count() const { return int(mask_.count()); }
    bool dense() const { return mask_.all(); }

    std::span<const float, kSize> values() const { return values_; }
    std::span<float, kSize> values() { return values_; }
    const Mask& mask() const { return mask_; }
    Mask& mask() { return mask_; }

private:
    Coord origin_;
    std::array<float, kSize> values_;
    Mask mask_;
};

/// Interior node with (2^Log2Dim)^3 slots; each slot is empty, a child subtree, or an active
/// tile. The child and value masks never share a bit.
template <typename ChildT, int Log2Dim>
class InternalNode {
public:
    using Child = ChildT;
    static constexpr int kLevel = ChildT::kLevel + 1;
    static constexpr int kLog2Dim = Log2Dim;
    static constexpr int kChildLog2 = ChildT::kLog2Total;
    static constexpr int kLog2Total = Log2Dim + kChildLog2;
    static constexpr int kSlots = 1 << (3 * Log2Dim);
    static constexpr int kChildSpan = 1 << kChildLog2;
    static constexpr int kSpan = 1 << kLog2Total;
    using Mask = BitMask<std::size_t(kSlots)>;

    explicit InternalNode(const Coord& origin)
        : origin_(origin), children_(kSlots), tiles_(kSlots, 0.f) {}

    /// Node with every slot an active tile of `value`.
    InternalNode(const Coord& origin, float value)
        : origin_(origin), children_(kSlots), tiles_(kSlots, value) {
        value_mask_.fill();
    }

    const Coord& origin() const { return origin_; }

    static int slot_of(const Coord& c) {
        constexpr int mask = kSpan - 1;
        constexpr int dim_mask = (1 << Log2Dim) - 1;
        const int x = ((c.x & mask) >> kChildLog2) & dim_mask;
        const int y = ((c.y & mask) >> kChildLog2) & dim_mask;
        const int z = ((c.z & mask) >> kChildLog2) & dim_mask;
        return (x << (2 * Log2Dim)) | (y << Log2Dim) | z;
    }

    Coord slot_origin(int slot) const {
        constexpr int dim_mask = (1 << Log2Dim) - 1;
        const int x = slot >> (2 * Log2Dim);
        const int y = (slot >> Log2Dim) & dim_mask;
        const int z = slot & dim_mask;
        return origin_ + Coord{x << kChildLog2, y << kChildLog2, z << kChildLog2};
    }

    const Mask& child_mask() const { return child_mask_; }
    const Mask& value_mask() const { return value_mask_; }

    const ChildT* child(int slot) const { return children_[std::size_t(slot)].get(); }
    float tile_value(int slot) const { return tiles_[std::size_t(slot)]; }

    VoxelValue get(const Coord& c, float background) const {
        const int slot = slot_of(c);
        if (child_mask_.test(std::size_t(slot))) {
            if constexpr (std::is_same_v<ChildT, LeafNode>) {
                const LeafNode& leaf = *children_[std::size_t(slot)];
                const int off = LeafNode::offset_of(c);
                return {leaf.value(off), leaf.is_active(off)};
            } else {
                return children_[std::size_t(slot)]->get(c, background);
            }
        }
        if (value_mask_.test(std::size_t(slot))) return {tiles_[std::size_t(slot)], true};
        return {background, false};
    }

    /// Child at slot, created on demand. A tile in that slot is first expanded into a dense
    /// child whose voxels all carry the tile value.
    ChildT& ensure_child(int slot, float background) {
        const auto s = std::size_t(slot);
        if (!child_mask_.test(s)) {
            if (value_mask_.test(s)) {
                if constexpr (std::is_same_v<ChildT, LeafNode>) {
                    children_[s] = std::make_unique<ChildT>(slot_origin(slot), tiles_[s], true);
                } else {
                    children_[s] = std::make_unique<ChildT>(slot_origin(slot), tiles_[s]);
                }
                value_mask_.reset(s);
                tiles_[s] = 0.f;
            } else {
                if constexpr (std::is_same_v<ChildT, LeafNode>) {
                    children_[s] = std::make_unique<ChildT>(slot_origin(slot), background, false);
                } else {
                    children_[s] = std::make_unique<ChildT>(slot_origin(slot));
                }
            }
            child_mask_.set(s);
        }
        return *children_[s];
    }

    ChildT* mutable_child(int slot) { return children_[std::size_t(slot)].get(); }

    void adopt_child(int slot, std::unique_ptr<ChildT> child) {
        const auto s = std::size_t(slot);
        value_mask_.reset(s);
        tiles_[s] = 0.f;
        children_[s] = std::move(child);
        child_mask_.set(s);
    }

    void set_tile(int slot, float value) {
        const auto s = std::size_t(slot);
        children_[s].reset();
        child_mask_.reset(s);
        value_mask_.set(s);
        tiles_[s] = value;
    }

    void clear_slot(int slot) {
        const auto s = std::size_t(slot);
        children_[s].reset();
        child_mask_.reset(s);
        value_mask_.reset(s);
        tiles_[s] = 0.f;
    }

    bool empty() const { return child_mask_.none() && value_mask_.none(); }

private:
    Coord origin_;
    Mask child_mask_;
    Mask value_mask_;
    std::vector<std::unique_ptr<ChildT>> children_;
    std::vector<float> tiles_;
};

using Internal4Node = InternalNode<LeafNode, 4>;
using TopNode = InternalNode<Internal4Node, 5>;

struct TileInfo {
    CoordBox bbox;
    float value = 0.f;
    int level = 4;
};

struct GridStatsCounts {
    std::uint64_t active_voxels = 0;
    std::uint64_t leaf_count = 0;
    std::uint64_t tile_count = 0;
    std::uint64_t dense_leaf_count = 0;
};

/// VDB-style sparse grid with a fixed 5-4-3 tree below a map of top nodes.
class SparseGrid {
public:
    using TopMap = std::map<Coord, std::unique_ptr<TopNode>>;

    explicit SparseGrid(float background = 0.f, GridTransform transform = {},
                        GridClass grid_class = GridClass::volume, std::string name = {});

    SparseGrid(SparseGrid&&) noexcept = default;
    SparseGrid& operator=(SparseGrid&&) noexcept = default;

    float background() const { return background_; }
    const GridTransform& transform() const { return transform_; }
    void set_transform(const GridTransform& t) { transform_ = t; }
    GridClass grid_class() const { return grid_class_; }
    void set_grid_class(GridClass c) { grid_class_ = c; }
    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }

    void set_voxel(const Coord& c, float value);
    VoxelValue get_voxel(const Coord& c) const;

    /// Active tile over the level-4 (8^3) or level-5 (128^3) slot containing c; any subtree
    /// previously in that slot is discarded.
    void set_tile(const Coord& c, float value, int level);

    /// Installs a leaf at its origin, replacing whatever occupied that slot.
    void insert_leaf(std::unique_ptr<LeafNode> leaf);

    /// Leaves in top-origin lexicographic order, then ascending slot order.
    std::vector<const LeafNode*> leaves() const;
    /// One entry per value-masked slot, same traversal order as leaves().
    std::vector<TileInfo> tiles() const;

    GridStatsCounts counts() const;
    std::uint64_t active_voxel_count() const { return counts().active_voxels; }
    std::size_t leaf_count() const { return std::size_t(counts().leaf_count); }
    std::size_t tile_count() const { return std::size_t(counts().tile_count); }

    /// Bounding box of all active voxels and tiles, or nullopt for an empty grid.
    std::optional<CoordBox> active_bbox() const;

    const TopMap& top_nodes() const { return top_; }
    TopNode& ensure_top(const Coord& origin);

private:
    TopMap top_;
    float background_;
    GridTransform transform_;
    GridClass grid_class_;
    std::string name_;
};

/// Tight half-open bbox of a leaf's active voxels; nullopt if none are active.
std::optional<CoordBox> leaf_active_bbox(const LeafNode& leaf);

/// Dense array (x fastest, then y, then z) to sparse grid. Voxels within `tolerance` of the
/// background are inactive; with collapse_tiles, a fully active leaf whose voxels all lie
/// within `tolerance` of their mean becomes a level-4 tile holding that mean.
SparseGrid sparsify_from_dense(std::span<const float> data, const std::array<int, 3>& dims,
                               float background, float tolerance, const GridTransform& transform,
                               bool collapse_tiles);

}  // namespace gaussvdb
