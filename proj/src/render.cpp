// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "gaussvdb/render.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include "gaussvdb/error.hpp"
#include "gaussvdb/parallel.hpp"

namespace gaussvdb {
namespace {

struct Basis {
    Vec3d eye, forward, right, up;
    double tan_half = 1.0;
    double aspect = 1.0;
    int width = 1, height = 1;

    explicit Basis(const Camera& cam) : eye(cam.eye), width(cam.width), height(cam.height) {
        forward = normalize(cam.target - cam.eye);
        right = normalize(cross(forward, cam.up));
        up = cross(right, forward);
        tan_half = std::tan(cam.vertical_fov * std::numbers::pi / 360.0);
        aspect = double(cam.width) / double(cam.height);
    }

    Ray ray(int px, int py) const {
        const double u = (2.0 * (px + 0.5) / width - 1.0) * tan_half * aspect;
        const double v = (1.0 - 2.0 * (py + 0.5) / height) * tan_half;
        return {eye, normalize(forward + right * u + up * v)};
    }
};

struct Hit {
    double t0, t1;
    std::uint32_t index;
};

/// Strict weak order on hits that only looks at values, so permuting the input set cannot
/// change the integration order.
struct HitBefore {
    const std::vector<Gaussian>* gaussians;

    bool operator()(const Hit& a, const Hit& b) const {
        if (a.t0 != b.t0) return a.t0 < b.t0;
        if (a.t1 != b.t1) return a.t1 < b.t1;
        const Gaussian& ga = (*gaussians)[a.index];
        const Gaussian& gb = (*gaussians)[b.index];
        const std::array<float, 7> ka{ga.position.x, ga.position.y, ga.position.z, ga.radii.x,
                                      ga.radii.y, ga.radii.z, ga.opacity};
        const std::array<float, 7> kb{gb.position.x, gb.position.y, gb.position.z, gb.radii.x,
                                      gb.radii.y, gb.radii.z, gb.opacity};
        return ka < kb;
    }
};

bool finished(const RayState& s, int segments, const RenderConfig& cfg) {
    return s.transmittance < cfg.transmittance_floor || segments >= cfg.max_segments;
}

RayResult finish(const RayState& s, int segments, const RenderConfig& cfg) {
    RayResult r;
    r.transmittance = s.transmittance;
    r.color = s.color + cfg.background * s.transmittance;
    r.alpha = 1.0 - s.transmittance;
    r.segments = segments;
    return r;
}

}  // namespace

void Camera::validate() const {
    if (width <= 0 || height <= 0) throw ValueError("zero-size image");
    if (!(vertical_fov > 0.0 && vertical_fov < 180.0)) throw ValueError("fov must be in (0, 180)");
    const Vec3d f = target - eye;
    if (dot(f, f) == 0.0) throw ValueError("camera eye equals target");
    const Vec3d side = cross(f, up);
    if (dot(side, side) <= 1e-24 * dot(f, f) * dot(up, up)) {
        throw ValueError("camera up vector is parallel to the view direction");
    }
}

Ray Camera::primary_ray(int px, int py) const { return Basis(*this).ray(px, py); }

void RenderConfig::validate() const {
    if (samples_per_segment < 1) throw ValueError("samples_per_segment must be >= 1");
    if (!(transmittance_floor > 0.0 && transmittance_floor < 1.0)) {
        throw ValueError("t_min must be in (0, 1)");
    }
    if (max_segments < 1) throw ValueError("max_segments must be >= 1");
    if (!(density_scale >= 0.0) || !std::isfinite(density_scale)) {
        throw ValueError("density_scale must be finite and non-negative");
    }
    if (!(volume_factor_cap > 0.0)) throw ValueError("volume_factor_cap must be positive");
    if (tf_range && !(tf_range->first < tf_range->second)) {
        throw ValueError("tf_range must satisfy lo < hi");
    }
}

RenderConfig resolve_config(const RenderConfig& cfg, const GaussianSet& set) {
    RenderConfig out = cfg;
    if (!out.tf_range) {
        if (set.empty()) {
            out.tf_range = std::pair{0.0, 1.0};
        } else {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (const auto& g : set.gaussians) {
                lo = std::min(lo, double(g.opacity));
                hi = std::max(hi, double(g.opacity));
            }
            if (lo == hi) {
                lo -= 0.5;
                hi += 0.5;
            }
            out.tf_range = std::pair{lo, hi};
        }
    }
    out.validate();
    return out;
}

std::optional<Interval> solve_ray_gaussian(const Ray& ray, const Gaussian& g) {
    const Vec3d delta = ray.origin - Vec3d(g.position);
    const Vec3d r(g.radii);
    const Vec3d inv_var = Vec3d(1.0) / (r * r);
    const double a = dot(ray.direction * ray.direction, inv_var);
    const double b = 2.0 * dot(delta * ray.direction, inv_var);
    const double c = dot(delta * delta, inv_var) - 1.0;
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0 || a <= 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    // Cancellation-free form of (-b +/- sqrt(disc)) / 2a.
    const double q = -0.5 * (b + std::copysign(sq, b));
    double t0, t1;
    if (q == 0.0) {
        t0 = t1 = 0.0;
    } else {
        t0 = q / a;
        t1 = c / q;
    }
    if (t0 > t1) std::swap(t0, t1);
    return Interval{t0, t1};
}

std::optional<Interval> ray_gaussian(const Ray& ray, const Gaussian& g) {
    auto roots = solve_ray_gaussian(ray, g);
    if (!roots || roots->t1 < 0.0) return std::nullopt;
    roots->t0 = std::max(roots->t0, 0.0);
    return roots;
}

double mahalanobis_sq(const Vec3d& x, const Gaussian& g) {
    const Vec3d d = x - Vec3d(g.position);
    const Vec3d r(g.radii);
    return dot(d * d, Vec3d(1.0) / (r * r));
}

double gaussian_density(const Vec3d& x, const Gaussian& g) {
    return double(g.opacity) * std::exp(-0.5 * mahalanobis_sq(x, g));
}

double volume_factor(const Gaussian& g, double cap) {
    const double v = double(g.radii.x) * double(g.radii.y) * double(g.radii.z);
    return std::min(1.0 / (v * v), cap);
}

void integrate_segment(const Ray& ray, const Gaussian& g, const Interval& chord,
                       const RenderConfig& cfg, GridClass grid_class, RayState& state) {
    Gaussian shaded = g;
    Vec3d color;
    if (grid_class == GridClass::levelset) {
        shaded.opacity = 1.f;
        color = color_lut(cfg.tf).entries[ColorLut::kSize / 2];
    } else {
        const auto [lo, hi] = cfg.tf_range.value_or(std::pair{0.0, 1.0});
        color = tf_lookup(cfg.tf, g.opacity, lo, hi);
    }
    const double scale = cfg.density_scale * volume_factor(g, cfg.volume_factor_cap);

    const int n = cfg.single_sample ? 1 : cfg.samples_per_segment;
    const double dt = (chord.t1 - chord.t0) / n;
    for (int k = 0; k < n; ++k) {
        const double t = cfg.single_sample ? chord.t0 : chord.t0 + (k + 0.5) * dt;
        const double absorption = scale * gaussian_density(ray.at(t), shaded) * dt;
        state.color += color * (state.transmittance * absorption);
        state.transmittance *= std::exp(-absorption);
        if (state.transmittance < cfg.transmittance_floor) break;
    }
}

RayResult trace_ray(const Ray& ray, const Bvh& bvh, const GaussianSet& set,
                    const RenderConfig& cfg, const SegmentObserver* observer) {
    const RenderConfig resolved = cfg.tf_range ? cfg : resolve_config(cfg, set);
    RayState state;
    int segments = 0;
    if (bvh.empty()) return finish(state, segments, resolved);

    const auto& nodes = bvh.nodes();
    struct Pending {
        double t;
        std::uint32_t node;
        bool operator>(const Pending& o) const { return t > o.t || (t == o.t && node > o.node); }
    };
    std::priority_queue<Pending, std::vector<Pending>, std::greater<>> open;
    const HitBefore before{&set.gaussians};
    auto after = [&before](const Hit& a, const Hit& b) { return before(b, a); };
    std::priority_queue<Hit, std::vector<Hit>, decltype(after)> hits(after);

    if (auto root = ray_aabb(ray, nodes[0].bounds)) open.push({root->t0, 0});

    while (!finished(state, segments, resolved)) {
        // A hit may be integrated once no unopened node can still produce an earlier one.
        const double frontier = open.empty() ? std::numeric_limits<double>::infinity()
                                             : open.top().t - 1e-9 * (1.0 + std::abs(open.top().t));
        if (!hits.empty() && hits.top().t0 < frontier) {
            const Hit h = hits.top();
            hits.pop();
            integrate_segment(ray, set.gaussians[h.index], {h.t0, h.t1}, resolved, set.grid_class,
                              state);
            ++segments;
            if (observer) (*observer)(state);
            continue;
        }
        if (open.empty()) break;
        const std::uint32_t ni = open.top().node;
        open.pop();
        const Bvh::Node& node = nodes[ni];
        if (node.leaf()) {
            for (std::uint32_t i = node.index; i < node.index + node.count; ++i) {
                if (!ray_aabb(ray, bvh.boxes()[i])) continue;
                const std::uint32_t gi = bvh.order()[i];
                if (auto chord = ray_gaussian(ray, set.gaussians[gi]); chord && chord->t1 > chord->t0) {
                    hits.push({chord->t0, chord->t1, gi});
                }
            }
        } else {
            for (std::uint32_t child : {ni + 1, node.index}) {
                if (auto iv = ray_aabb(ray, nodes[child].bounds)) open.push({iv->t0, child});
            }
        }
    }
    return finish(state, segments, resolved);
}

RayResult trace_ray_brute_force(const Ray& ray, const GaussianSet& set, const RenderConfig& cfg) {
    const RenderConfig resolved = cfg.tf_range ? cfg : resolve_config(cfg, set);
    std::vector<Hit> hits;
    for (std::uint32_t i = 0; i < set.gaussians.size(); ++i) {
        const Gaussian& g = set.gaussians[i];
        if (!ray_aabb(ray, Aabb::of(g))) continue;
        if (auto chord = ray_gaussian(ray, g); chord && chord->t1 > chord->t0) {
            hits.push_back({chord->t0, chord->t1, i});
        }
    }
    std::sort(hits.begin(), hits.end(), HitBefore{&set.gaussians});
    RayState state;
    int segments = 0;
    for (const Hit& h : hits) {
        if (finished(state, segments, resolved)) break;
        integrate_segment(ray, set.gaussians[h.index], {h.t0, h.t1}, resolved, set.grid_class, state);
        ++segments;
    }
    return finish(state, segments, resolved);
}

std::uint8_t quantize_unit(double v) {
    return std::uint8_t(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

namespace {

template <typename Trace>
Framebuffer render_with(const Camera& camera, unsigned workers, Trace&& trace) {
    camera.validate();
    const Basis basis(camera);
    Framebuffer fb;
    fb.width = camera.width;
    fb.height = camera.height;
    fb.rgba.assign(std::size_t(fb.width) * std::size_t(fb.height) * 4, 0);
    parallel_for(
        std::size_t(fb.height), workers,
        [&](std::size_t row) {
            const int y = int(row);
            for (int x = 0; x < fb.width; ++x) {
                const RayResult r = trace(basis.ray(x, y));
                std::uint8_t* px = fb.rgba.data() + 4 * (row * std::size_t(fb.width) + std::size_t(x));
                px[0] = quantize_unit(r.color.x);
                px[1] = quantize_unit(r.color.y);
                px[2] = quantize_unit(r.color.z);
                px[3] = quantize_unit(r.alpha);
            }
        },
        1);
    return fb;
}

}  // namespace

Framebuffer render(const GaussianSet& set, const Bvh& bvh, const Camera& camera,
                   const RenderConfig& cfg, unsigned workers) {
    const RenderConfig resolved = resolve_config(cfg, set);
    return render_with(camera, workers,
                       [&](const Ray& ray) { return trace_ray(ray, bvh, set, resolved); });
}

Framebuffer render(const GaussianSet& set, const Camera& camera, const RenderConfig& cfg,
                   unsigned workers) {
    const Bvh bvh(set);
    return render(set, bvh, camera, cfg, workers);
}

Framebuffer render_brute_force(const GaussianSet& set, const Camera& camera,
                               const RenderConfig& cfg, unsigned workers) {
    const RenderConfig resolved = resolve_config(cfg, set);
    return render_with(camera, workers,
                       [&](const Ray& ray) { return trace_ray_brute_force(ray, set, resolved); });
}

}  // namespace gaussvdb
