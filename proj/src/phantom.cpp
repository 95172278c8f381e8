// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "gaussvdb/phantom.hpp"

#include <bit>
#include <cmath>
#include <random>

#include "gaussvdb/error.hpp"

namespace gaussvdb {
namespace {

Phantom blank(int n) {
    if (n <= 0) throw ValueError("phantom size must be positive");
    Phantom p;
    p.header.dims = {n, n, n};
    p.values.assign(std::size_t(n) * std::size_t(n) * std::size_t(n), 0.f);
    return p;
}

template <typename Fn>
void fill(Phantom& p, Fn&& fn) {
    const int n = p.header.dims[0];
    std::size_t i = 0;
    for (int z = 0; z < n; ++z)
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x) p.values[i++] = fn(x, y, z);
}

}  // namespace

std::vector<std::uint8_t> Phantom::raw_bytes() const {
    std::vector<std::uint8_t> out;
    out.reserve(values.size() * 4);
    for (float v : values) {
        const auto bits = std::bit_cast<std::uint32_t>(v);
        for (int b = 0; b < 4; ++b) out.push_back(std::uint8_t(bits >> (8 * b)));
    }
    return out;
}

Phantom dense_phantom(int n) {
    Phantom p = blank(n);
    fill(p, [](int x, int y, int z) { return float(1 + ((x ^ y ^ z) & 7)) / 16.f; });
    return p;
}

Phantom ball_phantom(int n, double radius) {
    Phantom p = blank(n);
    const double c = 0.5 * n;
    fill(p, [&](int x, int y, int z) {
        const double d = std::sqrt((x + 0.5 - c) * (x + 0.5 - c) + (y + 0.5 - c) * (y + 0.5 - c) +
                                   (z + 0.5 - c) * (z + 0.5 - c));
        return d < radius ? float(1.0 - d / radius) : 0.f;
    });
    return p;
}

Phantom noise_phantom(int n, double fill_fraction, std::uint64_t seed) {
    Phantom p = blank(n);
    std::mt19937_64 rng(seed);
    // Raw bits rather than std distributions, whose output is implementation-defined.
    auto unit = [&] { return double(rng() >> 11) * 0x1.0p-53; };
    fill(p, [&](int, int, int) {
        const double keep = unit();
        const double value = 1.0 - unit();
        return keep < fill_fraction ? float(value) : 0.f;
    });
    return p;
}

Phantom sphere_levelset_phantom(int n, double radius, double band) {
    Phantom p = blank(n);
    p.header.grid_class = GridClass::levelset;
    p.header.background = float(band);
    const double c = 0.5 * n;
    fill(p, [&](int x, int y, int z) {
        const double d = std::sqrt((x + 0.5 - c) * (x + 0.5 - c) + (y + 0.5 - c) * (y + 0.5 - c) +
                                   (z + 0.5 - c) * (z + 0.5 - c)) - radius;
        return std::abs(d) < band ? float(d) : float(band);
    });
    return p;
}

}  // namespace gaussvdb
