// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "gaussvdb/bvh.hpp"
#include "gaussvdb/colormap.hpp"
#include "gaussvdb/error.hpp"
#include "gaussvdb/png.hpp"
#include "gaussvdb/render.hpp"
#include "support/oracles.hpp"

namespace gaussvdb {
namespace {

struct Rng {
    std::mt19937_64 engine;
    explicit Rng(std::uint64_t seed) : engine(seed) {}
    double uniform(double lo, double hi) { return lo + (hi - lo) * double(engine() >> 11) * 0x1.0p-53; }
    Vec3d vec(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }
};

GaussianSet random_scene(std::uint64_t seed, int n, bool anisotropic = true) {
    Rng rng(seed);
    GaussianSet set;
    for (int i = 0; i < n; ++i) {
        Gaussian g;
        g.position = Vec3f(rng.vec(-4.0, 4.0));
        const double r = rng.uniform(0.2, 1.0);
        g.radii = anisotropic ? Vec3f(rng.vec(0.2, 1.0)) : Vec3f(float(r));
        g.opacity = float(rng.uniform(0.05, 1.0));
        g.shape = shape_for(g.radii);
        set.gaussians.push_back(g);
    }
    return set;
}

Camera test_camera(int w = 48, int h = 40) {
    Camera cam;
    cam.eye = {1.0, 2.0, 14.0};
    cam.target = {0.0, 0.0, 0.0};
    cam.width = w;
    cam.height = h;
    return cam;
}

RenderConfig bright_config() {
    RenderConfig cfg;
    cfg.density_scale = 2.0;
    return cfg;
}

TEST(RayGaussian, SphereMatchesGeometricSolution) {
    Rng rng(1);
    int hits = 0;
    for (int i = 0; i < 20000; ++i) {
        Gaussian g;
        g.position = Vec3f(rng.vec(-2, 2));
        g.radii = Vec3f(float(rng.uniform(0.1, 2.0)));
        const Vec3d origin = rng.vec(-5, 5);
        // Half the rays aim near the sphere so both outcomes are well represented.
        const Vec3d dir = i % 2 ? rng.vec(-1, 1) : Vec3d(g.position) + rng.vec(-1.5, 1.5) - origin;
        const Ray ray{origin, normalize(dir)};
        const double o[3] = {ray.origin.x, ray.origin.y, ray.origin.z};
        const double d[3] = {ray.direction.x, ray.direction.y, ray.direction.z};
        const double c[3] = {g.position.x, g.position.y, g.position.z};
        const auto expect = testing::sphere_hit(o, d, c, g.radii.x);
        const auto got = ray_gaussian(ray, g);
        ASSERT_EQ(bool(expect), bool(got)) << i;
        if (!got) continue;
        ++hits;
        EXPECT_NEAR(got->t0, expect->first, 1e-6);
        EXPECT_NEAR(got->t1, expect->second, 1e-6);
    }
    EXPECT_GT(hits, 5000);
}

TEST(RayGaussian, EllipsoidRootsSitOnUnitSurface) {
    Rng rng(2);
    for (int i = 0; i < 20000; ++i) {
        Gaussian g;
        g.position = Vec3f(rng.vec(-2, 2));
        g.radii = Vec3f(rng.vec(0.05, 3.0));
        const Ray ray{rng.vec(-6, 6), normalize(rng.vec(-1, 1))};
        const auto roots = solve_ray_gaussian(ray, g);
        if (!roots) continue;
        EXPECT_NEAR(mahalanobis_sq(ray.at(roots->t0), g), 1.0, 1e-6);
        EXPECT_NEAR(mahalanobis_sq(ray.at(roots->t1), g), 1.0, 1e-6);
        EXPECT_LE(roots->t0, roots->t1);
    }
}

TEST(RayGaussian, InsideBehindAndMiss) {
    Gaussian g{{0.f, 0.f, 0.f}, {1.f, 1.f, 1.f}, 1.f, Shape::sphere};
    const auto inside = ray_gaussian({{0, 0, 0}, {1, 0, 0}}, g);
    ASSERT_TRUE(inside);
    EXPECT_EQ(inside->t0, 0.0);
    EXPECT_DOUBLE_EQ(inside->t1, 1.0);
    EXPECT_FALSE(ray_gaussian({{3, 0, 0}, {1, 0, 0}}, g));
    EXPECT_FALSE(ray_gaussian({{-3, 2, 0}, {1, 0, 0}}, g));
    const auto ahead = ray_gaussian({{-3, 0, 0}, {1, 0, 0}}, g);
    ASSERT_TRUE(ahead);
    EXPECT_DOUBLE_EQ(ahead->t0, 2.0);
    EXPECT_DOUBLE_EQ(ahead->t1, 4.0);
}

TEST(RayGaussian, ScalingSceneKeepsClassification) {
    Rng rng(3);
    for (int i = 0; i < 5000; ++i) {
        Gaussian g;
        g.position = Vec3f(rng.vec(-2, 2));
        g.radii = Vec3f(rng.vec(0.1, 1.5));
        const Ray ray{rng.vec(-5, 5), normalize(rng.vec(-1, 1))};
        const auto base = ray_gaussian(ray, g);
        for (double s : {0.5, 4.0}) {
            Gaussian gs = g;
            gs.position = Vec3f(Vec3d(g.position) * s);
            gs.radii = Vec3f(Vec3d(g.radii) * s);
            const auto scaled = ray_gaussian({ray.origin * s, ray.direction}, gs);
                    ASSERT_EQ(bool(scaled), bool(base)) << i;
            if (base) EXPECT_NEAR(scaled->t1, base->t1 * s, 1e-5 * s * (1 + base->t1));
        }
    }
}

TEST(RayAabb, SlabsAndAxisParallelRays) {
    const Aabb box{{-1, -1, -1}, {1, 1, 1}};
    const auto a = ray_aabb({{-3, 0, 0}, {1, 0, 0}}, box);
    ASSERT_TRUE(a);
    EXPECT_DOUBLE_EQ(a->t0, 2.0);
    EXPECT_DOUBLE_EQ(a->t1, 4.0);
    EXPECT_FALSE(ray_aabb({{-3, 2, 0}, {1, 0, 0}}, box));
    EXPECT_FALSE(ray_aabb({{3, 0, 0}, {1, 0, 0}}, box));
    const auto inside = ray_aabb({{0, 0, 0}, {0, 0, -1}}, box);
    ASSERT_TRUE(inside);
    EXPECT_EQ(inside->t0, 0.0);
}

TEST(Density, FormulaAndVolumeFactor) {
    const Gaussian g{{1.f, 2.f, 3.f}, {2.f, 1.f, 0.5f}, 0.8f, Shape::ellipsoid};
    const Vec3d x{2.0, 2.5, 3.25};
    const double d2 = 0.25 + 0.25 + 0.25;
    EXPECT_DOUBLE_EQ(mahalanobis_sq(x, g), d2);
    EXPECT_NEAR(gaussian_density(x, g), 0.8 * std::exp(-0.5 * d2), 1e-7);
    EXPECT_DOUBLE_EQ(volume_factor(g, 1e4), 1.0);
    const Gaussian tiny{{0.f, 0.f, 0.f}, Vec3f(0.1f), 1.f, Shape::sphere};
    EXPECT_EQ(volume_factor(tiny, 1e4), 1e4);
    const Gaussian wide{{0.f, 0.f, 0.f}, Vec3f(2.f), 1.f, Shape::sphere};
    EXPECT_DOUBLE_EQ(volume_factor(wide, 1e4), 1.0 / 64.0);  // det = (2 * 2 * 2)^2
}

TEST(Integrate, SingleSampleUsesEntryPoint) {
    const Gaussian g{{0.f, 0.f, 0.f}, Vec3f(1.f), 1.f, Shape::sphere};
    const Ray ray{{-3, 0, 0}, {1, 0, 0}};
    RenderConfig cfg;
    cfg.single_sample = true;
    cfg.tf_range = std::pair{0.0, 1.0};
    RayState state;
    integrate_segment(ray, g, {2.0, 4.0}, cfg, GridClass::volume, state);
    const double a = std::exp(-0.5) * 2.0;
    EXPECT_NEAR(state.transmittance, std::exp(-a), 1e-12);
    const Vec3d c = tf_lookup(TransferFunction::jet, 1.0, 0.0, 1.0);
    EXPECT_NEAR(state.color.x, c.x * a, 1e-12);
    EXPECT_NEAR(state.color.z, c.z * a, 1e-12);
}

TEST(Integrate, MidpointSumMatchesHandComputation) {
    const Gaussian g{{0.f, 0.f, 0.f}, Vec3f(1.f), 0.5f, Shape::sphere};
    const Ray ray{{0, 0, -5}, {0, 0, 1}};
    RenderConfig cfg;
    cfg.samples_per_segment = 4;
    cfg.density_scale = 3.0;
    cfg.tf_range = std::pair{0.0, 1.0};
    RayState state;
    integrate_segment(ray, g, {4.0, 6.0}, cfg, GridClass::volume, state);
    double tau = 0.0;
    for (double z : {-0.75, -0.25, 0.25, 0.75}) tau += 3.0 * 0.5 * std::exp(-0.5 * z * z) * 0.5;
    EXPECT_NEAR(state.transmittance, std::exp(-tau), 1e-12);
}

TEST(Integrate, LevelSetShadesWithLutMidpoint) {
    const Gaussian g{{0.f, 0.f, 0.f}, Vec3f(1.f), 0.1f, Shape::sphere};
    RenderConfig cfg;
    cfg.tf = TransferFunction::viridis;
    cfg.tf_range = std::pair{0.0, 1.0};
    RayState vol, ls;
    const Ray ray{{0, 0, -5}, {0, 0, 1}};
    integrate_segment(ray, g, {4.0, 6.0}, cfg, GridClass::levelset, ls);
    Gaussian opaque = g;
    opaque.opacity = 1.f;
    integrate_segment(ray, opaque, {4.0, 6.0}, cfg, GridClass::volume, vol);
    EXPECT_DOUBLE_EQ(ls.transmittance, vol.transmittance);
    const Vec3d mid = color_lut(TransferFunction::viridis).entries[128];
    const double weight = ls.color.x / mid.x;
    EXPECT_NEAR(ls.color.y, mid.y * weight, 1e-12);
    EXPECT_NEAR(ls.color.z, mid.z * weight, 1e-12);
}

TEST(Camera, CentreRayLooksAtTarget) {
    Camera cam = test_camera(5, 3);
    const Ray r = cam.primary_ray(2, 1);
    const Vec3d f = normalize(cam.target - cam.eye);
    EXPECT_NEAR(dot(r.direction, f), 1.0, 1e-12);
    // Top-left pixel: ray points up and to the left.
    const Ray tl = cam.primary_ray(0, 0);
    const Vec3d right = normalize(cross(f, cam.up));
    EXPECT_LT(dot(tl.direction, right), 0.0);
    EXPECT_GT(dot(tl.direction, cross(right, f)), 0.0);
}

TEST(Camera, RejectsDegeneratePoses) {
    Camera cam = test_camera();
    cam.width = 0;
    EXPECT_THROW(cam.validate(), ValueError);
    cam = test_camera();
    cam.target = cam.eye;
    EXPECT_THROW(cam.validate(), ValueError);
    cam = test_camera();
    cam.up = cam.target - cam.eye;
    EXPECT_THROW(cam.validate(), ValueError);
    cam = test_camera();
    cam.vertical_fov = 180.0;
    EXPECT_THROW(cam.validate(), ValueError);
}

TEST(RenderConfig, RangeDefaultsAndValidation) {
    GaussianSet set = random_scene(4, 10);
    const RenderConfig r = resolve_config({}, set);
    float lo = 1.f, hi = 0.f;
    for (const auto& g : set.gaussians) lo = std::min(lo, g.opacity), hi = std::max(hi, g.opacity);
    EXPECT_EQ(r.tf_range->first, double(lo));
    EXPECT_EQ(r.tf_range->second, double(hi));
    EXPECT_EQ(resolve_config({}, GaussianSet{}).tf_range, (std::pair{0.0, 1.0}));
    RenderConfig bad;
    bad.transmittance_floor = 0.0;
    EXPECT_THROW(bad.validate(), ValueError);
    bad = {};
    bad.samples_per_segment = 0;
    EXPECT_THROW(bad.validate(), ValueError);
    bad = {};
    bad.tf_range = std::pair{1.0, 1.0};
    EXPECT_THROW(bad.validate(), ValueError);
}

TEST(Bvh, NodesBoundTheirContents) {
    const GaussianSet set = random_scene(5, 500);
    const Bvh bvh(set);
    auto order = bvh.order();
    std::sort(order.begin(), order.end());
    for (std::uint32_t i = 0; i < order.size(); ++i) ASSERT_EQ(order[i], i);
    const auto& nodes = bvh.nodes();
    for (std::uint32_t ni = 0; ni < nodes.size(); ++ni) {
        const auto& n = nodes[ni];
        if (n.leaf()) {
            EXPECT_LE(n.count, Bvh::kLeafSize);
            for (std::uint32_t i = n.index; i < n.index + n.count; ++i) EXPECT_TRUE(n.bounds.contains(bvh.boxes()[i]));
        } else {
            EXPECT_TRUE(n.bounds.contains(nodes[ni + 1].bounds));
            EXPECT_TRUE(n.bounds.contains(nodes[n.index].bounds));
        }
    }
}

TEST(Bvh, OverlapQueryMatchesScan) {
    const GaussianSet set = random_scene(6, 300);
    const Bvh bvh(set);
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const Ray ray{rng.vec(-8, 8), normalize(rng.vec(-1, 1))};
        std::vector<std::uint32_t> expect;
        for (std::uint32_t k = 0; k < set.size(); ++k)
            if (ray_aabb(ray, Aabb::of(set.gaussians[k]))) expect.push_back(k);
        EXPECT_EQ(bvh.overlaps(ray), expect);
    }
    EXPECT_TRUE(Bvh(GaussianSet{}).empty());
}

TEST(Trace, MatchesBruteForceExactly) {
    for (std::uint64_t seed = 10; seed < 14; ++seed) {
        const GaussianSet set = random_scene(seed, 400);
        const Bvh bvh(set);
        const RenderConfig cfg = resolve_config(bright_config(), set);
        Rng rng(seed);
        for (int i = 0; i < 300; ++i) {
            const Ray ray{rng.vec(-9, 9), normalize(rng.vec(-1, 1))};
            const RayResult a = trace_ray(ray, bvh, set, cfg);
            const RayResult b = trace_ray_brute_force(ray, set, cfg);
            ASSERT_EQ(a.transmittance, b.transmittance);
            ASSERT_EQ(a.color, b.color);
            ASSERT_EQ(a.segments, b.segments);
        }
    }
}

TEST(Trace, TransmittanceNeverIncreases) {
    const GaussianSet set = random_scene(20, 300);
    const Bvh bvh(set);
    const RenderConfig cfg = resolve_config(bright_config(), set);
    Rng rng(21);
    for (int i = 0; i < 500; ++i) {
        const Ray ray{rng.vec(-9, 9), normalize(rng.vec(-1, 1))};
        double last = 1.0;
        const SegmentObserver watch = [&](const RayState& s) {
            EXPECT_LE(s.transmittance, last);
            EXPECT_GT(s.transmittance, 0.0);
            last = s.transmittance;
        };
        const RayResult r = trace_ray(ray, bvh, set, cfg, &watch);
        EXPECT_EQ(r.alpha, 1.0 - r.transmittance);
        EXPECT_EQ(r.transmittance, last);
    }
}

TEST(Trace, EarlyExitAndSegmentCap) {
    GaussianSet set;
    for (int i = 0; i < 50; ++i) set.gaussians.push_back({{0.f, 0.f, float(-2 * i)}, Vec3f(0.9f), 1.f, Shape::sphere});
    const Bvh bvh(set);
    RenderConfig cfg;
    cfg.density_scale = 50.0;
    const Ray ray{{0, 0, 5}, {0, 0, -1}};
    const RayResult r = trace_ray(ray, bvh, set, cfg);
    EXPECT_LT(r.transmittance, cfg.transmittance_floor);
    EXPECT_LT(r.segments, 50);
    cfg.density_scale = 1e-3;
    cfg.max_segments = 7;
    EXPECT_EQ(trace_ray(ray, bvh, set, cfg).segments, 7);
}

TEST(Render, EmptySceneShowsBackground) {
    RenderConfig cfg;
    cfg.background = {0.2, 0.4, 1.0};
    const Framebuffer fb = render(GaussianSet{}, test_camera(4, 4), cfg, 1);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) {
            const auto* p = fb.pixel(x, y);
            EXPECT_EQ(p[0], 51);
            EXPECT_EQ(p[1], 102);
            EXPECT_EQ(p[2], 255);
            EXPECT_EQ(p[3], 0);
        }
}

TEST(Render, BvhAndBruteForceImagesAgree) {
    const GaussianSet set = random_scene(30, 600);
    const Camera cam = test_camera();
    EXPECT_EQ(render(set, cam, bright_config(), 2).rgba, render_brute_force(set, cam, bright_config(), 2).rgba);
}

TEST(Render, InvariantToWorkersAndInputOrder) {
    GaussianSet set = random_scene(31, 800);
    const Camera cam = test_camera();
    const auto one = render(set, cam, bright_config(), 1).rgba;
    EXPECT_EQ(render(set, cam, bright_config(), 2).rgba, one);
    EXPECT_EQ(render(set, cam, bright_config(), 8).rgba, one);
    std::mt19937 rng(5);
    std::shuffle(set.gaussians.begin(), set.gaussians.end(), rng);
    EXPECT_EQ(render(set, cam, bright_config(), 3).rgba, one);
}

TEST(Png, RoundTripAndDeterminism) {
    const Framebuffer fb = render(random_scene(40, 100), test_camera(17, 9), bright_config(), 1);
    const auto bytes = encode_png(fb);
    EXPECT_EQ(encode_png(fb), bytes);
    const Framebuffer back = decode_png(bytes);
    EXPECT_EQ(back.width, 17);
    EXPECT_EQ(back.height, 9);
    EXPECT_EQ(back.rgba, fb.rgba);
    EXPECT_THROW(decode_png({1, 2, 3}), FormatError);
    EXPECT_THROW(encode_png(Framebuffer{}), ValueError);
}

TEST(Colormap, MatchesReferenceTables) {
    struct Row {
        int index;
        Vec3d jet, viridis;
    };
    // Sampled from matplotlib 3.x (cm.jet and cm.viridis, 256 entries).
    const std::vector<Row> rows{
        {0, {0.0, 0.0, 0.5}, {0.267004, 0.004874, 0.329415}},
        {32, {0.0, 0.00196078, 1.0}, {0.278826, 0.17549, 0.483397}},
        {64, {0.0, 0.503922, 1.0}, {0.229739, 0.322361, 0.545706}},
        {96, {0.085389, 1.0, 0.882353}, {0.172719, 0.448791, 0.557885}},
        {128, {0.490196, 1.0, 0.477546}, {0.127568, 0.566949, 0.550556}},
        {160, {0.895003, 1.0, 0.072739}, {0.157851, 0.683765, 0.501686}},
        {192, {1.0, 0.581699, 0.0}, {0.369214, 0.788888, 0.382914}},
        {224, {1.0, 0.116921, 0.0}, {0.678489, 0.863742, 0.189503}},
        {255, {0.5, 0.0, 0.0}, {0.993248, 0.906157, 0.143936}},
    };
    for (const auto& row : rows) {
        const Vec3d j = color_lut(TransferFunction::jet).entries[std::size_t(row.index)];
        const Vec3d v = color_lut(TransferFunction::viridis).entries[std::size_t(row.index)];
        for (int a = 0; a < 3; ++a) {
            EXPECT_NEAR(j[a], row.jet[a], 1e-5) << row.index;
            EXPECT_NEAR(v[a], row.viridis[a], 1e-5) << row.index;
        }
    }
}

TEST(Colormap, LookupClampsAndRounds) {
    const auto& lut = color_lut(TransferFunction::viridis).entries;
    EXPECT_EQ(tf_lookup(TransferFunction::viridis, -5.0, 0.0, 1.0), lut[0]);
    EXPECT_EQ(tf_lookup(TransferFunction::viridis, 5.0, 0.0, 1.0), lut[255]);
    EXPECT_EQ(tf_lookup(TransferFunction::viridis, 0.5, 0.0, 1.0), lut[128]);
    EXPECT_EQ(tf_lookup(TransferFunction::viridis, 3.0, 2.0, 4.0), lut[128]);
    EXPECT_EQ(parse_transfer_function("viridis"), TransferFunction::viridis);
    EXPECT_FALSE(parse_transfer_function("plasma"));
}

}  // namespace
}  // namespace gaussvdb
