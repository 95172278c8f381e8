// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cstring>
#include <string>

#include <gtest/gtest.h>

#include "gaussvdb/error.hpp"
#include "gaussvdb/extract.hpp"
#include "gaussvdb/io.hpp"
#include "gaussvdb/phantom.hpp"
#include "support/oracles.hpp"

namespace gaussvdb {
namespace {

using testing::TempDir;

SparseGrid mixed_grid() {
    SparseGrid g(0.125f, GridTransform::scale_translate({0.5, 0.25, 2.0}, {1.0, -2.0, 3.5}),
                 GridClass::volume, "mixed");
    for (const auto& [c, v] : testing::random_voxels(3, 24, 0.07)) g.set_voxel(c - Coord{12, 12, 12}, v);
    g.set_tile({64, 0, 0}, 0.5f, 4);
    g.set_tile({-128, 0, 0}, 0.75f, 5);
    g.set_voxel({5000, -5000, 3}, -1.f);
    return g;
}

void expect_same_voxels(const SparseGrid& a, const SparseGrid& b) {
    EXPECT_EQ(a.background(), b.background());
    EXPECT_EQ(a.transform(), b.transform());
    EXPECT_EQ(a.grid_class(), b.grid_class());
    EXPECT_EQ(a.name(), b.name());
    const auto la = a.leaves(), lb = b.leaves();
    ASSERT_EQ(la.size(), lb.size());
    for (std::size_t i = 0; i < la.size(); ++i) {
        EXPECT_EQ(la[i]->origin(), lb[i]->origin());
        EXPECT_EQ(la[i]->mask(), lb[i]->mask());
        EXPECT_EQ(0, std::memcmp(la[i]->values().data(), lb[i]->values().data(), 512 * sizeof(float)));
    }
    const auto ta = a.tiles(), tb = b.tiles();
    ASSERT_EQ(ta.size(), tb.size());
    for (std::size_t i = 0; i < ta.size(); ++i) {
        EXPECT_EQ(ta[i].bbox, tb[i].bbox);
        EXPECT_EQ(ta[i].value, tb[i].value);
        EXPECT_EQ(ta[i].level, tb[i].level);
    }
}

TEST(GridFormat, RoundTripIsExact) {
    const SparseGrid g = mixed_grid();
    const auto bytes = write_grid(g);
    const SparseGrid back = read_grid(bytes);
    expect_same_voxels(g, back);
    EXPECT_EQ(write_grid(back), bytes);
}

TEST(GridFormat, VoxelQueriesSurviveRoundTrip) {
    const SparseGrid g = mixed_grid();
    const SparseGrid back = read_grid(write_grid(g));
    // Everything near the dense part of the grid, plus a margin of background probes.
    for (int x = -16; x < 80; ++x)
        for (int y = -16; y < 16; ++y)
            for (int z = -16; z < 16; ++z) ASSERT_EQ(back.get_voxel({x, y, z}), g.get_voxel({x, y, z}));
    for (const Coord c : {Coord{5000, -5000, 3}, Coord{5001, -5000, 3}, Coord{-100, 5, 5}, Coord{-129, 0, 0}})
        EXPECT_EQ(back.get_voxel(c), g.get_voxel(c));
}

TEST(GridFormat, EmptyGridRoundTrips) {
    SparseGrid g(3.f, {}, GridClass::levelset, "");
    const SparseGrid back = read_grid(write_grid(g));
    EXPECT_EQ(back.grid_class(), GridClass::levelset);
    EXPECT_EQ(back.background(), 3.f);
    EXPECT_EQ(back.active_voxel_count(), 0u);
}

TEST(GridFormat, RejectsBadMagicAndTrailingBytes) {
    auto bytes = write_grid(mixed_grid());
    auto bad = bytes;
    bad[0] = 'X';
    EXPECT_THROW(read_grid(bad), FormatError);
    bad = bytes;
    bad.push_back(0);
    EXPECT_THROW(read_grid(bad), FormatError);
}

TEST(GridFormat, RejectsEveryTruncation) {
    SparseGrid g;
    g.set_voxel({1, 2, 3}, 1.f);
    g.set_tile({8, 0, 0}, 2.f, 4);
    const auto bytes = write_grid(g);
    for (std::size_t len = 0; len < bytes.size(); len += 7) {
        std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + long(len));
        EXPECT_THROW(read_grid(cut), FormatError) << "length " << len;
    }
}

TEST(GridFormat, RejectsOverlappingMasks) {
    SparseGrid g;
    g.set_voxel({0, 0, 0}, 1.f);
    auto bytes = write_grid(g);
    // magic, matrix, background, class, name length, top count, leaf count, tile count, origin
    const std::size_t top_child_mask = 6 + 128 + 4 + 1 + 4 + 4 + 8 + 8 + 12;
    const std::size_t top_value_mask = top_child_mask + 4096;
    ASSERT_EQ(bytes[top_child_mask] & 1, 1);
    bytes[top_value_mask] |= 1;
    EXPECT_THROW(read_grid(bytes), FormatError);
}

TEST(GaussianFormat, MatchesHandAssembledBytes) {
    GaussianSet set;
    set.lod = Lod::medium;
    set.gaussians.push_back({{1.f, 2.f, 3.f}, {0.5f, 0.5f, 0.5f}, 0.25f, Shape::sphere});
    std::vector<std::uint8_t> expect;
    auto put = [&](const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        expect.insert(expect.end(), b, b + n);
    };
    put("GPTS1\0", 6);
    const std::uint64_t count = 1;
    put(&count, 8);
    expect.push_back(0);  // volume
    expect.push_back(1);  // medium
    for (int i = 0; i < 16; ++i) {
        const double v = (i % 5 == 0) ? 1.0 : 0.0;
        put(&v, 8);
    }
    expect.push_back(0);  // sphere
    for (float f : {1.f, 2.f, 3.f, 0.5f, 0.25f}) put(&f, 4);
    static_assert(std::endian::native == std::endian::little);
    EXPECT_EQ(write_gaussians(set), expect);
}

TEST(GaussianFormat, RoundTripIsExactAndSized) {
    const SparseGrid grid = read_grid(write_grid(mixed_grid()));
    for (Lod lod : {Lod::low, Lod::medium, Lod::high}) {
        ExtractConfig cfg;
        cfg.lod = lod;
        const GaussianSet set = extract(grid, cfg, 1);
        const auto bytes = write_gaussians(set);
        const GaussianSet back = read_gaussians(bytes);
        EXPECT_EQ(back.gaussians, set.gaussians);
        EXPECT_EQ(back.lod, lod);
        EXPECT_EQ(back.source_transform, set.source_transform);
        std::size_t spheres = 0;
        for (const auto& g : set.gaussians) spheres += g.shape == Shape::sphere;
        const std::size_t records = set.size() * (1 + 12 + 4 + 4) + (set.size() - spheres) * 8;
        EXPECT_EQ(bytes.size(), kGaussianHeaderBytes + records);
    }
}

TEST(GaussianFormat, LevelSetRecordsOmitOpacity) {
    GaussianSet set;
    set.grid_class = GridClass::levelset;
    set.gaussians.push_back({{0.f, 0.f, 0.f}, {1.f, 2.f, 3.f}, 1.f, Shape::ellipsoid});
    const auto bytes = write_gaussians(set);
    EXPECT_EQ(bytes.size(), kGaussianHeaderBytes + 1 + 12 + 12);
    const GaussianSet back = read_gaussians(bytes);
    EXPECT_EQ(back.gaussians, set.gaussians);
}

TEST(GaussianFormat, RejectsMalformedRecords) {
    GaussianSet set;
    set.gaussians.push_back({{0.f, 0.f, 0.f}, {1.f, 1.f, 1.f}, 0.5f, Shape::sphere});
    const auto good = write_gaussians(set);

    auto bad = good;
    bad[kGaussianHeaderBytes] = 7;
    EXPECT_THROW(read_gaussians(bad), FormatError);

    bad = good;
    const float negative = -1.f;
    std::memcpy(&bad[kGaussianHeaderBytes + 13], &negative, 4);
    EXPECT_THROW(read_gaussians(bad), FormatError);

    bad = good;
    bad.push_back(0);
    EXPECT_THROW(read_gaussians(bad), FormatError);

    bad.assign(good.begin(), good.end() - 1);
    EXPECT_THROW(read_gaussians(bad), FormatError);

    bad = good;
    bad[15] = 3;  // lod tag
    EXPECT_THROW(read_gaussians(bad), FormatError);

    set.gaussians[0].radii = {1.f, 2.f, 1.f};
    EXPECT_THROW(write_gaussians(set), ValueError);
}

TEST(RawHeader, ParsesAndRejectsUnknownFields) {
    const auto h = parse_raw_header(R"({"dims": [4, 5, 6], "value_type": "u16", "voxel_size": 0.5,
                                        "background": 0.1, "threshold": 0.01, "grid_class": "levelset"})");
    EXPECT_EQ(h.dims, (std::array<int, 3>{4, 5, 6}));
    EXPECT_EQ(h.value_type, ValueType::u16);
    EXPECT_EQ(h.voxel_size, Vec3d(0.5));
    EXPECT_EQ(h.grid_class, GridClass::levelset);
    EXPECT_EQ(parse_raw_header(format_raw_header(h)).dims, h.dims);
    EXPECT_THROW(parse_raw_header(R"({"dims": [1, 1, 1], "value_type": "f32", "colour": 1})"), FormatError);
    EXPECT_THROW(parse_raw_header(R"({"dims": [0, 1, 1], "value_type": "f32"})"), FormatError);
    EXPECT_THROW(parse_raw_header(R"({"dims": [1, 1, 1], "value_type": "f64"})"), FormatError);
    EXPECT_THROW(parse_raw_header("not json"), FormatError);
}

TEST(RawHeader, IntegerValuesNormalize) {
    RawVolumeHeader h;
    h.dims = {2, 1, 1};
    h.value_type = ValueType::u8;
    const std::vector<std::uint8_t> u8{0, 255};
    EXPECT_EQ(decode_raw_values(u8, h), (std::vector<float>{0.f, 1.f}));
    h.value_type = ValueType::u16;
    const std::vector<std::uint8_t> u16{0xff, 0xff, 0x00, 0x00};
    EXPECT_EQ(decode_raw_values(u16, h), (std::vector<float>{1.f, 0.f}));
    EXPECT_THROW(decode_raw_values(u8, h), FormatError);
}

TEST(RawIngest, FilesToGrid) {
    TempDir dir("raw");
    const Phantom p = dense_phantom(16);
    const std::string header = format_raw_header(p.header);
    write_file(dir / "cube.json", std::span(reinterpret_cast<const std::uint8_t*>(header.data()), header.size()));
    write_file(dir / "cube.raw", p.raw_bytes());
    const SparseGrid g = read_raw(dir / "cube.json", dir / "cube.raw");
    EXPECT_EQ(g.name(), "cube");
    EXPECT_EQ(g.active_voxel_count(), 16u * 16u * 16u);
    EXPECT_EQ(g.get_voxel({3, 1, 2}).value, p.values[3 + 16 * (1 + 16 * 2)]);
    EXPECT_THROW(read_raw(dir / "missing.json", dir / "cube.raw"), IoError);
}

}  // namespace
}  // namespace gaussvdb
