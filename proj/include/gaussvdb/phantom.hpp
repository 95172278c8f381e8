// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "gaussvdb/io.hpp"

namespace gaussvdb {

/// A synthetic dense volume plus the header that describes it.
struct Phantom {
    RawVolumeHeader header;
    std::vector<float> values;  // x fastest

    std::vector<std::uint8_t> raw_bytes() const;
};

/// Every voxel active; values are multiples of 1/16 in [1/16, 1/2].
Phantom dense_phantom(int n);
/// Ball of radius `radius` voxels centred in the cube, density falling linearly to 0 at the rim.
Phantom ball_phantom(int n, double radius);
/// Each voxel active with probability `fill`, value uniform in (0, 1]. Same seed, same bytes.
Phantom noise_phantom(int n, double fill, std::uint64_t seed);
/// Narrow-band signed distance to a sphere, `band` voxels either side, background = band.
Phantom sphere_levelset_phantom(int n, double radius, double band);

}  // namespace gaussvdb
