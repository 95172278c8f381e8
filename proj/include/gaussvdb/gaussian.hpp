// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gaussvdb/coord.hpp"
#include "gaussvdb/math.hpp"
#include "gaussvdb/sparse_grid.hpp"
#include "gaussvdb/transform.hpp"

namespace gaussvdb {

enum class Shape : std::uint8_t { sphere = 0, ellipsoid = 1 };
enum class Lod : std::uint8_t { low = 0, medium = 1, high = 2 };

std::string_view to_string(Lod lod);
std::string_view to_string(GridClass c);
/// Accepts "low", "med", "medium", "high".
std::optional<Lod> parse_lod(std::string_view s);

/// Axis-aligned Gaussian: covariance is diag(radii^2).
struct Gaussian {
    Vec3f position;
    Vec3f radii;
    float opacity = 0.f;
    Shape shape = Shape::sphere;

    bool operator==(const Gaussian&) const = default;
};

inline Shape shape_for(const Vec3f& radii) {
    return (radii.x == radii.y && radii.y == radii.z) ? Shape::sphere : Shape::ellipsoid;
}

/// Index-space region a Gaussian was fitted to, and how many active voxels it stands for.
struct Provenance {
    CoordBox box;
    std::uint64_t voxel_count = 0;

    bool operator==(const Provenance&) const = default;
};

/// Contiguous run of Gaussians produced from one leaf or tile.
struct SourceRange {
    CoordBox node_box;
    std::uint32_t offset = 0;
    std::uint32_t count = 0;
    bool from_tile = false;

    bool operator==(const SourceRange&) const = default;
};

struct GaussianSet {
    std::vector<Gaussian> gaussians;
    Lod lod = Lod::low;
    GridClass grid_class = GridClass::volume;
    GridTransform source_transform;

    /// Extraction metadata. Empty for sets read back from disk.
    std::vector<Provenance> provenance;
    std::vector<SourceRange> sources;

    std::size_t size() const { return gaussians.size(); }
    bool empty() const { return gaussians.empty(); }
    bool has_provenance() const { return provenance.size() == gaussians.size() && !sources.empty(); }
};

/// Builds a Gaussian over the index-space box: centre maps through the transform, radii are
/// half the box extent scaled by voxel size.
Gaussian gaussian_from_box(const CoordBox& box, float opacity, const GridTransform& transform);

}  // namespace gaussvdb
