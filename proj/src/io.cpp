// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "gaussvdb/io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "gaussvdb/error.hpp"

namespace gaussvdb {
namespace {

class ByteWriter {
public:
    explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}

    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        out_.insert(out_.end(), b, b + n);
    }
    template <typename T>
    void le(T v) {
        static_assert(std::is_integral_v<T>);
        using U = std::make_unsigned_t<T>;
        const U u = U(v);
        for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(std::uint8_t(u >> (8 * i)));
    }
    void u8(std::uint8_t v) { out_.push_back(v); }
    void f32(float v) { le(std::bit_cast<std::uint32_t>(v)); }
    void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }

private:
    std::vector<std::uint8_t>& out_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

    std::span<const std::uint8_t> take(std::size_t n) {
        if (in_.size() - pos_ < n) throw FormatError("truncated stream");
        auto s = in_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    template <typename T>
    T le() {
        using U = std::make_unsigned_t<T>;
        const auto s = take(sizeof(T));
        U u = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) u |= U(U(s[i]) << (8 * i));
        return T(u);
    }
    std::uint8_t u8() { return take(1)[0]; }
    float f32() { return std::bit_cast<float>(le<std::uint32_t>()); }
    double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
    bool done() const { return pos_ == in_.size(); }

private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

void write_magic(ByteWriter& w, const std::array<char, 6>& magic) { w.bytes(magic.data(), magic.size()); }

void expect_magic(ByteReader& r, const std::array<char, 6>& magic) {
    const auto s = r.take(magic.size());
    if (std::memcmp(s.data(), magic.data(), magic.size()) != 0) throw FormatError("bad magic");
}

void write_matrix(ByteWriter& w, const Mat4& m) {
    for (double v : m) w.f64(v);
}

GridTransform read_transform(ByteReader& r) {
    Mat4 m{};
    for (double& v : m) v = r.f64();
    try {
        return GridTransform(m);
    } catch (const ValueError& e) {
        throw FormatError(std::string("invalid transform: ") + e.what());
    }
}

GridClass read_grid_class(ByteReader& r) {
    const auto c = r.u8();
    if (c > 1) throw FormatError("unknown grid class " + std::to_string(c));
    return GridClass(c);
}

template <std::size_t N>
void write_mask(ByteWriter& w, const BitMask<N>& m) {
    for (auto word : m.words()) w.le(word);
}

template <std::size_t N>
BitMask<N> read_mask(ByteReader& r) {
    BitMask<N> m;
    for (auto& word : m.words()) word = r.le<std::uint64_t>();
    return m;
}

template <typename Node>
void write_tiles(ByteWriter& w, const Node& node) {
    node.value_mask().for_each_on([&](std::size_t s) { w.f32(node.tile_value(int(s))); });
}

}  // namespace

std::size_t RawVolumeHeader::value_bytes() const {
    switch (value_type) {
    case ValueType::f32: return 4;
    case ValueType::u8: return 1;
    case ValueType::u16: return 2;
    }
    return 0;
}

RawVolumeHeader parse_raw_header(std::string_view json_text) {
    using nlohmann::json;
    RawVolumeHeader h;
    try {
        const json j = json::parse(json_text);
        if (!j.is_object()) throw FormatError("raw header must be a JSON object");
        static const std::array<std::string_view, 6> kFields{"dims", "value_type", "voxel_size",
                                                            "background", "threshold", "grid_class"};
        for (const auto& [key, _] : j.items()) {
            if (std::find(kFields.begin(), kFields.end(), key) == kFields.end()) {
                throw FormatError("unknown raw header field '" + key + "'");
            }
        }
        const auto dims = j.at("dims").get<std::vector<int>>();
        if (dims.size() != 3) throw FormatError("dims must have 3 entries");
        h.dims = {dims[0], dims[1], dims[2]};
        const auto vt = j.at("value_type").get<std::string>();
        if (vt == "f32") h.value_type = ValueType::f32;
        else if (vt == "u8") h.value_type = ValueType::u8;
        else if (vt == "u16") h.value_type = ValueType::u16;
        else throw FormatError("unknown value_type '" + vt + "'");
        if (j.contains("voxel_size")) {
            const auto& vs = j.at("voxel_size");
            if (vs.is_number()) {
                h.voxel_size = Vec3d(vs.get<double>());
            } else {
                const auto v = vs.get<std::vector<double>>();
                if (v.size() != 3) throw FormatError("voxel_size must have 3 entries");
                h.voxel_size = {v[0], v[1], v[2]};
            }
        }
        h.background = j.value("background", 0.f);
        h.threshold = j.value("threshold", 0.f);
        const auto gc = j.value("grid_class", std::string("volume"));
        if (gc == "volume") h.grid_class = GridClass::volume;
        else if (gc == "levelset") h.grid_class = GridClass::levelset;
        else throw FormatError("unknown grid_class '" + gc + "'");
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed raw header: ") + e.what());
    }
    if (h.dims[0] <= 0 || h.dims[1] <= 0 || h.dims[2] <= 0) throw FormatError("dims must be positive");
    if (!(h.threshold >= 0.f)) throw FormatError("threshold must be non-negative");
    if (!(h.voxel_size.x > 0 && h.voxel_size.y > 0 && h.voxel_size.z > 0)) {
        throw FormatError("voxel_size must be positive");
    }
    return h;
}

std::string format_raw_header(const RawVolumeHeader& h) {
    nlohmann::ordered_json j;
    j["dims"] = h.dims;
    j["value_type"] = h.value_type == ValueType::f32 ? "f32" : (h.value_type == ValueType::u8 ? "u8" : "u16");
    j["voxel_size"] = {h.voxel_size.x, h.voxel_size.y, h.voxel_size.z};
    j["background"] = h.background;
    j["threshold"] = h.threshold;
    j["grid_class"] = std::string(to_string(h.grid_class));
    return j.dump(2);
}

std::vector<float> decode_raw_values(std::span<const std::uint8_t> bytes, const RawVolumeHeader& h) {
    const std::size_t n = h.voxel_count();
    if (bytes.size() != n * h.value_bytes()) {
        throw FormatError("raw data is " + std::to_string(bytes.size()) + " bytes, expected " +
                          std::to_string(n * h.value_bytes()));
    }
    std::vector<float> out(n);
    ByteReader r(bytes);
    for (std::size_t i = 0; i < n; ++i) {
        switch (h.value_type) {
        case ValueType::f32: out[i] = r.f32(); break;
        case ValueType::u8: out[i] = float(r.u8()) / 255.f; break;
        case ValueType::u16: out[i] = float(r.le<std::uint16_t>()) / 65535.f; break;
        }
    }
    return out;
}

SparseGrid grid_from_raw(const RawVolumeHeader& header, std::span<const std::uint8_t> data,
                         bool collapse_tiles) {
    const auto values = decode_raw_values(data, header);
    SparseGrid grid = sparsify_from_dense(values, header.dims, header.background, header.threshold,
                                          GridTransform::scale_translate(header.voxel_size),
                                          collapse_tiles);
    grid.set_grid_class(header.grid_class);
    return grid;
}

SparseGrid read_raw(const std::filesystem::path& header_path, const std::filesystem::path& data_path,
                    bool collapse_tiles) {
    const auto header_bytes = read_file(header_path);
    const RawVolumeHeader header =
        parse_raw_header({reinterpret_cast<const char*>(header_bytes.data()), header_bytes.size()});
    const auto data = read_file(data_path);
    SparseGrid grid = grid_from_raw(header, data, collapse_tiles);
    grid.set_name(data_path.stem().string());
    return grid;
}

std::vector<std::uint8_t> write_grid(const SparseGrid& grid) {
    std::vector<std::uint8_t> out;
    ByteWriter w(out);
    write_magic(w, kGridMagic);
    write_matrix(w, grid.transform().matrix());
    w.f32(grid.background());
    w.u8(std::uint8_t(grid.grid_class()));
    w.le(std::uint32_t(grid.name().size()));
    w.bytes(grid.name().data(), grid.name().size());
    const auto counts = grid.counts();
    w.le(std::uint32_t(grid.top_nodes().size()));
    w.le(counts.leaf_count);
    w.le(counts.tile_count);

    for (const auto& [origin, top] : grid.top_nodes()) {
        w.le(origin.x);
        w.le(origin.y);
        w.le(origin.z);
        write_mask(w, top->child_mask());
        write_mask(w, top->value_mask());
        write_tiles(w, *top);
        top->child_mask().for_each_on([&](std::size_t s5) {
            const Internal4Node& mid = *top->child(int(s5));
            write_mask(w, mid.child_mask());
            write_mask(w, mid.value_mask());
            write_tiles(w, mid);
            mid.child_mask().for_each_on([&](std::size_t s4) {
                const LeafNode& leaf = *mid.child(int(s4));
                write_mask(w, leaf.mask());
                for (float v : leaf.values()) w.f32(v);
            });
        });
    }
    return out;
}

SparseGrid read_grid(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    expect_magic(r, kGridMagic);
    GridTransform transform = read_transform(r);
    const float background = r.f32();
    const GridClass grid_class = read_grid_class(r);
    const auto name_len = r.le<std::uint32_t>();
    const auto name_bytes = r.take(name_len);
    std::string name(reinterpret_cast<const char*>(name_bytes.data()), name_bytes.size());
    SparseGrid grid(background, transform, grid_class, std::move(name));

    const auto top_count = r.le<std::uint32_t>();
    const auto leaf_count = r.le<std::uint64_t>();
    const auto tile_count = r.le<std::uint64_t>();
    std::uint64_t leaves_seen = 0, tiles_seen = 0;

    std::optional<Coord> previous;
    for (std::uint32_t t = 0; t < top_count; ++t) {
        Coord origin;
        origin.x = r.le<std::int32_t>();
        origin.y = r.le<std::int32_t>();
        origin.z = r.le<std::int32_t>();
        if (origin.aligned(TopNode::kLog2Total) != origin) throw FormatError("top node origin not aligned");
        if (previous && !(*previous < origin)) throw FormatError("top nodes not in ascending order");
        previous = origin;
        TopNode& top = grid.ensure_top(origin);

        const auto child5 = read_mask<TopNode::kSlots>(r);
        const auto value5 = read_mask<TopNode::kSlots>(r);
        if (!child5.disjoint(value5)) throw FormatError("child and value masks overlap");
        value5.for_each_on([&](std::size_t s) { top.set_tile(int(s), r.f32()); });
        tiles_seen += value5.count();

        child5.for_each_on([&](std::size_t s5) {
            auto mid = std::make_unique<Internal4Node>(top.slot_origin(int(s5)));
            const auto child4 = read_mask<Internal4Node::kSlots>(r);
            const auto value4 = read_mask<Internal4Node::kSlots>(r);
            if (!child4.disjoint(value4)) throw FormatError("child and value masks overlap");
            value4.for_each_on([&](std::size_t s) { mid->set_tile(int(s), r.f32()); });
            tiles_seen += value4.count();
            child4.for_each_on([&](std::size_t s4) {
                auto leaf = std::make_unique<LeafNode>(mid->slot_origin(int(s4)), background);
                leaf->mask() = read_mask<LeafNode::kSize>(r);
                for (float& v : leaf->values()) v = r.f32();
                if (leaf->mask().none()) throw FormatError("stored leaf has no active voxels");
                mid->adopt_child(int(s4), std::move(leaf));
                ++leaves_seen;
            });
            if (mid->empty()) throw FormatError("stored internal node is empty");
            top.adopt_child(int(s5), std::move(mid));
        });
    }
    if (leaves_seen != leaf_count || tiles_seen != tile_count) {
        throw FormatError("mask/payload count mismatch: header says " + std::to_string(leaf_count) +
                          " leaves, " + std::to_string(tile_count) + " tiles; found " +
                          std::to_string(leaves_seen) + ", " + std::to_string(tiles_seen));
    }
    if (!r.done()) throw FormatError("mask/payload count mismatch: trailing bytes");
    return grid;
}

std::vector<std::uint8_t> write_gaussians(const GaussianSet& set) {
    std::vector<std::uint8_t> out;
    out.reserve(kGaussianHeaderBytes + set.size() * 29);
    ByteWriter w(out);
    write_magic(w, kGaussianMagic);
    w.le(std::uint64_t(set.size()));
    w.u8(std::uint8_t(set.grid_class));
    w.u8(std::uint8_t(set.lod));
    write_matrix(w, set.source_transform.matrix());
    const bool with_opacity = set.grid_class == GridClass::volume;
    for (const Gaussian& g : set.gaussians) {
        w.u8(std::uint8_t(g.shape));
        w.f32(g.position.x);
        w.f32(g.position.y);
        w.f32(g.position.z);
        if (g.shape == Shape::sphere) {
            if (!(g.radii.x == g.radii.y && g.radii.y == g.radii.z)) {
                throw ValueError("sphere Gaussian with unequal radii");
            }
            w.f32(g.radii.x);
        } else {
            w.f32(g.radii.x);
            w.f32(g.radii.y);
            w.f32(g.radii.z);
        }
        if (with_opacity) w.f32(g.opacity);
    }
    return out;
}

GaussianSet read_gaussians(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    expect_magic(r, kGaussianMagic);
    const auto count = r.le<std::uint64_t>();
    GaussianSet set;
    set.grid_class = read_grid_class(r);
    const auto lod = r.u8();
    if (lod > 2) throw FormatError("unknown lod tag " + std::to_string(lod));
    set.lod = Lod(lod);
    set.source_transform = read_transform(r);
    // Smallest record: tag + position + one radius.
    if (count > bytes.size() / 17) throw FormatError("truncated stream");
    set.gaussians.reserve(std::size_t(count));
    const bool with_opacity = set.grid_class == GridClass::volume;
    for (std::uint64_t i = 0; i < count; ++i) {
        Gaussian g;
        const auto tag = r.u8();
        if (tag > 1) throw FormatError("unknown shape tag " + std::to_string(tag));
        g.shape = Shape(tag);
        g.position = {r.f32(), r.f32(), r.f32()};
        if (g.shape == Shape::sphere) {
            g.radii = Vec3f(r.f32());
        } else {
            const float rx = r.f32(), ry = r.f32(), rz = r.f32();
            g.radii = {rx, ry, rz};
        }
        if (!(g.radii.x > 0.f && g.radii.y > 0.f && g.radii.z > 0.f)) {
            throw FormatError("non-positive Gaussian radius");
        }
        g.opacity = with_opacity ? r.f32() : 1.f;
        set.gaussians.push_back(g);
    }
    if (!r.done()) throw FormatError("trailing bytes after last record");
    return set;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (is.bad()) throw IoError("failed reading " + path.string());
    return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace gaussvdb
