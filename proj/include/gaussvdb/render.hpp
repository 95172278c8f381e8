// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "gaussvdb/bvh.hpp"
#include "gaussvdb/colormap.hpp"
#include "gaussvdb/gaussian.hpp"

namespace gaussvdb {

/// Pinhole camera. Pixel (0, 0) is the top-left corner of the image.
struct Camera {
    Vec3d eye{0.0, 0.0, 5.0};
    Vec3d target{0.0};
    Vec3d up{0.0, 1.0, 0.0};
    double vertical_fov = 45.0;  // degrees
    int width = 256;
    int height = 256;

    /// Throws ValueError on a degenerate pose, a fov outside (0, 180) or a zero-size image.
    void validate() const;
    Ray primary_ray(int px, int py) const;
};

struct RenderConfig {
    int samples_per_segment = 8;
    double density_scale = 1.0;
    double volume_factor_cap = 1e4;
    double transmittance_floor = 0.01;
    int max_segments = 512;
    TransferFunction tf = TransferFunction::jet;
    /// Defaults to the set's opacity range when unset.
    std::optional<std::pair<double, double>> tf_range;
    Vec3d background{0.0};
    /// One density evaluation at the entry point with the full chord as step.
    bool single_sample = false;

    void validate() const;
};

/// Fills in tf_range from the set when missing and validates.
RenderConfig resolve_config(const RenderConfig& cfg, const GaussianSet& set);

struct RayState {
    Vec3d color{0.0};
    double transmittance = 1.0;
};

struct RayResult {
    Vec3d color{0.0};
    double alpha = 0.0;
    double transmittance = 1.0;
    int segments = 0;
};

/// Raw roots of the ray / unit-Mahalanobis-ellipsoid quadratic, ascending, unclipped.
std::optional<Interval> solve_ray_gaussian(const Ray& ray, const Gaussian& g);
/// Roots clipped to tau >= 0; nullopt on a miss or when the ellipsoid is behind the ray.
std::optional<Interval> ray_gaussian(const Ray& ray, const Gaussian& g);

/// Mahalanobis distance squared of x from the Gaussian mean under diag(r^2).
double mahalanobis_sq(const Vec3d& x, const Gaussian& g);
/// alpha * exp(-D^2 / 2).
double gaussian_density(const Vec3d& x, const Gaussian& g);
/// min(1 / det(Sigma), cap); det(Sigma) = (rx ry rz)^2.
double volume_factor(const Gaussian& g, double cap);

/// Marches the chord [t0, t1] through one Gaussian. cfg must carry a resolved tf_range.
/// Level sets shade with opacity 1 and the LUT midpoint colour.
void integrate_segment(const Ray& ray, const Gaussian& g, const Interval& chord,
                       const RenderConfig& cfg, GridClass grid_class, RayState& state);

/// Called with the ray state after every integrated segment.
using SegmentObserver = std::function<void(const RayState&)>;

/// Front-to-back integration over every Gaussian the ray crosses, ordered by entry distance.
RayResult trace_ray(const Ray& ray, const Bvh& bvh, const GaussianSet& set,
                    const RenderConfig& cfg, const SegmentObserver* observer = nullptr);

/// Same integration testing every Gaussian per ray, no acceleration structure.
RayResult trace_ray_brute_force(const Ray& ray, const GaussianSet& set, const RenderConfig& cfg);

struct Framebuffer {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgba;

    const std::uint8_t* pixel(int x, int y) const {
        return rgba.data() + 4 * (std::size_t(y) * std::size_t(width) + std::size_t(x));
    }
};

std::uint8_t quantize_unit(double v);

Framebuffer render(const GaussianSet& set, const Bvh& bvh, const Camera& camera,
                   const RenderConfig& cfg, unsigned workers = 0);
Framebuffer render(const GaussianSet& set, const Camera& camera, const RenderConfig& cfg,
                   unsigned workers = 0);
/// Reference renderer built on trace_ray_brute_force.
Framebuffer render_brute_force(const GaussianSet& set, const Camera& camera,
                               const RenderConfig& cfg, unsigned workers = 0);

}  // namespace gaussvdb
