// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gaussvdb/gaussian.hpp"
#include "gaussvdb/sparse_grid.hpp"

namespace gaussvdb {

struct ExtractConfig {
    Lod lod = Lod::low;
    /// Multiply opacity by the occupied fraction of the fitted box.
    bool opacity_extent_scaling = false;
    /// Positional variance threshold (world units squared) for the intra-leaf split.
    double variance_threshold = 1.0;
    bool enable_variance_split = false;
    int variance_depth_limit = 16;
    /// Positional variance threshold for the inter-leaf merge pass.
    double merge_threshold = 1.0;
    bool enable_merge_pass = false;
};

/// A Gaussian plus where it came from.
struct FittedGaussian {
    Gaussian gaussian;
    Provenance provenance;
};

std::optional<FittedGaussian> leaf_to_gaussian_low(const LeafNode& leaf, const GridTransform& t,
                                                   const ExtractConfig& cfg);
FittedGaussian tile_to_gaussian(const CoordBox& bbox, float value, const GridTransform& t);
std::vector<FittedGaussian> leaf_to_gaussians_medium(const LeafNode& leaf, const GridTransform& t,
                                                     const ExtractConfig& cfg);
std::vector<FittedGaussian> leaf_to_gaussians_high(const LeafNode& leaf, const GridTransform& t,
                                                   const ExtractConfig& cfg);

struct VoxelSample {
    Coord index;
    Vec3d world;
    float value = 0.f;
};

/// Population variance of world positions around their centroid: (1/N) sum |x_i - mu|^2.
double positional_variance(std::span<const Vec3d> points);

/// Recursive median split along the axis of largest positional variance until the variance
/// is at most `threshold`, one voxel remains, or depth_limit is hit. Each part becomes one
/// Gaussian over its index-space bbox with the mean value as opacity.
std::vector<FittedGaussian> variance_split(std::span<const VoxelSample> voxels,
                                           const GridTransform& t, double threshold,
                                           int depth_limit = 16);

/// Converts every leaf, then every tile, into Gaussians. Leaves are processed on `workers`
/// threads (0 = default) and concatenated in leaf order, so output is independent of the
/// worker count.
GaussianSet extract(const SparseGrid& grid, const ExtractConfig& cfg, unsigned workers = 0);

/// Second pass merging each source with its face/edge/corner neighbours when the group's
/// Gaussian centres have positional variance below `threshold`.
GaussianSet merge_pass(const GaussianSet& set, double threshold);

}  // namespace gaussvdb
