// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "gaussvdb/extract.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "gaussvdb/error.hpp"
#include "gaussvdb/parallel.hpp"

namespace gaussvdb {

std::string_view to_string(Lod lod) {
    switch (lod) {
    case Lod::low: return "low";
    case Lod::medium: return "medium";
    case Lod::high: return "high";
    }
    return "unknown";
}

std::string_view to_string(GridClass c) { return c == GridClass::levelset ? "levelset" : "volume"; }

std::optional<Lod> parse_lod(std::string_view s) {
    if (s == "low") return Lod::low;
    if (s == "med" || s == "medium") return Lod::medium;
    if (s == "high") return Lod::high;
    return std::nullopt;
}

Gaussian gaussian_from_box(const CoordBox& box, float opacity, const GridTransform& transform) {
    Gaussian g;
    g.position = Vec3f(transform.index_to_world(box.center()));
    g.radii = Vec3f(box.extent() * transform.voxel_size() * 0.5);
    g.opacity = opacity;
    g.shape = shape_for(g.radii);
    return g;
}

namespace {

FittedGaussian fit(const CoordBox& box, double value_sum, std::uint64_t count,
                   const GridTransform& t, const ExtractConfig& cfg) {
    double alpha = value_sum / double(count);
    if (cfg.opacity_extent_scaling) alpha *= double(count) / double(box.volume());
    return {gaussian_from_box(box, float(alpha), t), {box, count}};
}

/// Cubic block of `span` voxels at a local corner; every voxel must be active.
FittedGaussian block_gaussian(const LeafNode& leaf, const Coord& local, int span,
                              const GridTransform& t, const ExtractConfig& cfg) {
    double sum = 0.0;
    for (int x = 0; x < span; ++x)
        for (int y = 0; y < span; ++y)
            for (int z = 0; z < span; ++z)
                sum += leaf.value(LeafNode::offset_of(local + Coord{x, y, z}));
    const CoordBox box = CoordBox::cube(leaf.origin() + local, span);
    return fit(box, sum, std::uint64_t(span) * span * span, t, cfg);
}

std::vector<FittedGaussian> dense_blocks(const LeafNode& leaf, int span, const GridTransform& t,
                                         const ExtractConfig& cfg) {
    std::vector<FittedGaussian> out;
    const int per_axis = LeafNode::kDim / span;
    out.reserve(std::size_t(per_axis * per_axis * per_axis));
    for (int i = 0; i < per_axis; ++i)
        for (int j = 0; j < per_axis; ++j)
            for (int k = 0; k < per_axis; ++k)
                out.push_back(block_gaussian(leaf, {i * span, j * span, k * span}, span, t, cfg));
    return out;
}

FittedGaussian voxel_gaussian(const LeafNode& leaf, int offset, const GridTransform& t,
                              const ExtractConfig& cfg) {
    return fit(CoordBox::cube(leaf.voxel_coord(offset), 1), leaf.value(offset), 1, t, cfg);
}

std::vector<FittedGaussian> per_voxel(const LeafNode& leaf, const GridTransform& t,
                                      const ExtractConfig& cfg) {
    std::vector<FittedGaussian> out;
    out.reserve(std::size_t(leaf.active_count()));
    leaf.mask().for_each_on(
        [&](std::size_t off) { out.push_back(voxel_gaussian(leaf, int(off), t, cfg)); });
    return out;
}

std::vector<VoxelSample> leaf_samples(const LeafNode& leaf, const GridTransform& t) {
    std::vector<VoxelSample> out;
    out.reserve(std::size_t(leaf.active_count()));
    leaf.mask().for_each_on([&](std::size_t off) {
        const Coord c = leaf.voxel_coord(int(off));
        out.push_back({c, t.index_to_world(c.as_vec() + Vec3d(0.5)), leaf.value(int(off))});
    });
    return out;
}

void split_recursive(std::vector<VoxelSample>& voxels, const GridTransform& t, double threshold,
                     int depth, int depth_limit, std::vector<FittedGaussian>& out) {
    const std::size_t n = voxels.size();
    Vec3d mean{};
    for (const auto& v : voxels) mean += v.world;
    mean = mean / double(n);
    Vec3d axis_var{};
    for (const auto& v : voxels) {
        const Vec3d d = v.world - mean;
        axis_var += d * d;
    }
    axis_var = axis_var / double(n);
    const double variance = axis_var.x + axis_var.y + axis_var.z;

    if (n == 1 || variance <= threshold || depth >= depth_limit) {
        CoordBox box{voxels.front().index, voxels.front().index + Coord{1, 1, 1}};
        double sum = 0.0;
        for (const auto& v : voxels) {
            box = merge_boxes(box, CoordBox::cube(v.index, 1));
            sum += v.value;
        }
        out.push_back({gaussian_from_box(box, float(sum / double(n)), t), {box, n}});
        return;
    }

    std::size_t axis = 0;
    if (axis_var.y > axis_var[axis]) axis = 1;
    if (axis_var.z > axis_var[axis]) axis = 2;

    std::stable_sort(voxels.begin(), voxels.end(), [axis](const VoxelSample& a, const VoxelSample& b) {
        return a.world[axis] < b.world[axis];
    });
    const double pivot = voxels[n / 2].world[axis];
    auto split = std::partition_point(voxels.begin(), voxels.end(),
                                      [&](const VoxelSample& v) { return v.world[axis] < pivot; });
    if (split == voxels.begin()) {
        split = std::partition_point(voxels.begin(), voxels.end(),
                                     [&](const VoxelSample& v) { return v.world[axis] <= pivot; });
    }
    std::vector<VoxelSample> left(voxels.begin(), split);
    std::vector<VoxelSample> right(split, voxels.end());
    split_recursive(left, t, threshold, depth + 1, depth_limit, out);
    split_recursive(right, t, threshold, depth + 1, depth_limit, out);
}

std::vector<FittedGaussian> convert_leaf(const LeafNode& leaf, const GridTransform& t,
                                         const ExtractConfig& cfg) {
    if (cfg.enable_variance_split && !leaf.dense()) {
        const auto samples = leaf_samples(leaf, t);
        if (samples.empty()) return {};
        return variance_split(samples, t, cfg.variance_threshold, cfg.variance_depth_limit);
    }
    switch (cfg.lod) {
    case Lod::low:
        if (auto g = leaf_to_gaussian_low(leaf, t, cfg)) return {*g};
        return {};
    case Lod::medium: return leaf_to_gaussians_medium(leaf, t, cfg);
    case Lod::high: return leaf_to_gaussians_high(leaf, t, cfg);
    }
    return {};
}

}  // namespace

std::optional<FittedGaussian> leaf_to_gaussian_low(const LeafNode& leaf, const GridTransform& t,
                                                   const ExtractConfig& cfg) {
    const auto box = leaf_active_bbox(leaf);
    if (!box) return std::nullopt;
    double sum = 0.0;
    leaf.mask().for_each_on([&](std::size_t off) { sum += leaf.value(int(off)); });
    return fit(*box, sum, std::uint64_t(leaf.active_count()), t, cfg);
}

FittedGaussian tile_to_gaussian(const CoordBox& bbox, float value, const GridTransform& t) {
    return {gaussian_from_box(bbox, value, t), {bbox, std::uint64_t(bbox.volume())}};
}

std::vector<FittedGaussian> leaf_to_gaussians_medium(const LeafNode& leaf, const GridTransform& t,
                                                     const ExtractConfig& cfg) {
    if (leaf.dense()) return dense_blocks(leaf, 4, t, cfg);

    // Greedy scan in linear order: an active voxel at even local coordinates anchors a
    // 2x2x2 block if all eight voxels are active; anything left over is emitted singly.
    std::vector<FittedGaussian> out;
    LeafNode::Mask consumed;
    leaf.mask().for_each_on([&](std::size_t off) {
        if (consumed.test(off)) return;
        const Coord l = LeafNode::local_coord(int(off));
        if ((l.x | l.y | l.z) % 2 == 0) {
            bool full = true;
            for (int i = 0; i < 8 && full; ++i) {
                full = leaf.is_active(LeafNode::offset_of(l + Coord{i >> 2, (i >> 1) & 1, i & 1}));
            }
            if (full) {
                for (int i = 0; i < 8; ++i) {
                    consumed.set(std::size_t(LeafNode::offset_of(l + Coord{i >> 2, (i >> 1) & 1, i & 1})));
                }
                out.push_back(block_gaussian(leaf, l, 2, t, cfg));
                return;
            }
        }
        consumed.set(off);
        out.push_back(voxel_gaussian(leaf, int(off), t, cfg));
    });
    return out;
}

std::vector<FittedGaussian> leaf_to_gaussians_high(const LeafNode& leaf, const GridTransform& t,
                                                   const ExtractConfig& cfg) {
    if (leaf.dense()) return dense_blocks(leaf, 2, t, cfg);
    return per_voxel(leaf, t, cfg);
}

double positional_variance(std::span<const Vec3d> points) {
    if (points.empty()) return 0.0;
    Vec3d mean{};
    for (const auto& p : points) mean += p;
    mean = mean / double(points.size());
    double acc = 0.0;
    for (const auto& p : points) {
        const Vec3d d = p - mean;
        acc += dot(d, d);
    }
    return acc / double(points.size());
}

std::vector<FittedGaussian> variance_split(std::span<const VoxelSample> voxels,
                                           const GridTransform& t, double threshold,
                                           int depth_limit) {
    if (voxels.empty()) throw ValueError("variance_split needs at least one voxel");
    if (!(threshold >= 0.0)) throw ValueError("variance threshold must be non-negative");
    std::vector<VoxelSample> work(voxels.begin(), voxels.end());
    std::vector<FittedGaussian> out;
    split_recursive(work, t, threshold, 0, depth_limit, out);
    return out;
}

GaussianSet extract(const SparseGrid& grid, const ExtractConfig& cfg, unsigned workers) {
    if (!(cfg.variance_threshold >= 0.0)) throw ValueError("variance threshold must be non-negative");

    const auto leaves = grid.leaves();
    const GridTransform& t = grid.transform();
    std::vector<std::vector<FittedGaussian>> per_leaf(leaves.size());
    parallel_for(leaves.size(), workers,
                 [&](std::size_t i) { per_leaf[i] = convert_leaf(*leaves[i], t, cfg); });

    GaussianSet set;
    set.lod = cfg.lod;
    set.grid_class = grid.grid_class();
    set.source_transform = t;

    std::size_t total = 0;
    for (const auto& v : per_leaf) total += v.size();
    set.gaussians.reserve(total);
    set.provenance.reserve(total);

    auto append = [&set](const std::vector<FittedGaussian>& items, const CoordBox& node_box,
                         bool from_tile) {
        SourceRange range{node_box, std::uint32_t(set.gaussians.size()),
                          std::uint32_t(items.size()), from_tile};
        for (const auto& f : items) {
            set.gaussians.push_back(f.gaussian);
            set.provenance.push_back(f.provenance);
        }
        set.sources.push_back(range);
    };

    for (std::size_t i = 0; i < leaves.size(); ++i) append(per_leaf[i], leaves[i]->bbox(), false);
    for (const TileInfo& tile : grid.tiles()) {
        append({tile_to_gaussian(tile.bbox, tile.value, t)}, tile.bbox, true);
    }

    if (cfg.enable_merge_pass) set = merge_pass(set, cfg.merge_threshold);
    // Level sets carry a uniform surface opacity rather than an averaged distance value.
    if (set.grid_class == GridClass::levelset) {
        for (auto& g : set.gaussians) g.opacity = 1.f;
    }
    return set;
}

GaussianSet merge_pass(const GaussianSet& set, double threshold) {
    if (!set.has_provenance() && !set.empty()) {
        throw ValueError("merge_pass needs a set with extraction metadata");
    }
    const auto& sources = set.sources;
    const std::size_t n = sources.size();
    const GridTransform& t = set.source_transform;

    // Neighbour lists: 8-cubes are found through their origins, anything larger by a scan.
    std::unordered_map<Coord, std::size_t, CoordHash> by_origin;
    std::vector<std::size_t> irregular;
    for (std::size_t i = 0; i < n; ++i) {
        const CoordBox& b = sources[i].node_box;
        if (b == CoordBox::cube(b.min, LeafNode::kDim) && b.min.aligned(3) == b.min) {
            by_origin.emplace(b.min, i);
        } else {
            irregular.push_back(i);
        }
    }
    std::vector<std::vector<std::size_t>> neighbours(n);
    for (std::size_t i = 0; i < n; ++i) {
        const CoordBox& b = sources[i].node_box;
        auto& list = neighbours[i];
        if (!irregular.empty() && std::binary_search(irregular.begin(), irregular.end(), i)) {
            for (std::size_t j = 0; j < n; ++j)
                if (j != i && sources[j].node_box.touches(b)) list.push_back(j);
        } else {
            for (int dx = -1; dx <= 1; ++dx)
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dz = -1; dz <= 1; ++dz) {
                        if (dx == 0 && dy == 0 && dz == 0) continue;
                        const Coord o = b.min + Coord{dx * 8, dy * 8, dz * 8};
                        if (auto it = by_origin.find(o); it != by_origin.end()) list.push_back(it->second);
                    }
            for (std::size_t j : irregular)
                if (sources[j].node_box.touches(b)) list.push_back(j);
        }
        std::sort(list.begin(), list.end());
    }

    // Best-connected sources seed first; ties fall back to source order.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return neighbours[a].size() > neighbours[b].size();
    });

    struct Merged {
        std::vector<std::size_t> members;
        FittedGaussian result;
        CoordBox node_box;
    };
    std::vector<bool> consumed(n, false);
    std::vector<std::optional<Merged>> merged_at(n);

    for (std::size_t seed : order) {
        if (consumed[seed]) continue;
        std::vector<std::size_t> group{seed};
        for (std::size_t j : neighbours[seed])
            if (!consumed[j]) group.push_back(j);
        if (group.size() < 2) continue;

        std::vector<Vec3d> centres;
        for (std::size_t m : group) {
            for (std::uint32_t k = 0; k < sources[m].count; ++k) {
                centres.emplace_back(set.gaussians[sources[m].offset + k].position);
            }
        }
        if (centres.empty() || !(positional_variance(centres) < threshold)) continue;

        std::optional<CoordBox> box;
        CoordBox node_box = sources[seed].node_box;
        double weighted = 0.0;
        std::uint64_t voxels = 0;
        for (std::size_t m : group) {
            node_box = merge_boxes(node_box, sources[m].node_box);
            for (std::uint32_t k = 0; k < sources[m].count; ++k) {
                const std::size_t gi = sources[m].offset + k;
                const Provenance& p = set.provenance[gi];
                box = box ? merge_boxes(*box, p.box) : p.box;
                weighted += double(set.gaussians[gi].opacity) * double(p.voxel_count);
                voxels += p.voxel_count;
            }
        }
        const float alpha = voxels ? float(weighted / double(voxels)) : 0.f;
        std::sort(group.begin(), group.end());
        for (std::size_t m : group) consumed[m] = true;
        merged_at[group.front()] =
            Merged{group, {gaussian_from_box(*box, alpha, t), {*box, voxels}}, node_box};
    }

    GaussianSet out;
    out.lod = set.lod;
    out.grid_class = set.grid_class;
    out.source_transform = set.source_transform;
    for (std::size_t i = 0; i < n; ++i) {
        if (merged_at[i]) {
            const Merged& m = *merged_at[i];
            out.sources.push_back({m.node_box, std::uint32_t(out.gaussians.size()), 1, false});
            out.gaussians.push_back(m.result.gaussian);
            out.provenance.push_back(m.result.provenance);
            continue;
        }
        if (consumed[i]) continue;
        const SourceRange& s = sources[i];
        out.sources.push_back({s.node_box, std::uint32_t(out.gaussians.size()), s.count, s.from_tile});
        for (std::uint32_t k = 0; k < s.count; ++k) {
            out.gaussians.push_back(set.gaussians[s.offset + k]);
            out.provenance.push_back(set.provenance[s.offset + k]);
        }
    }
    return out;
}

}  // namespace gaussvdb
