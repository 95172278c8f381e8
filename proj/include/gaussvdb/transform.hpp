// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gaussvdb/math.hpp"

namespace gaussvdb {

/// Affine index-to-world mapping. The full transform, translation included, is held in one
/// matrix; voxel_size is derived from the column norms of the linear part.
class GridTransform {
public:
    GridTransform();

    /// Throws ValueError when the matrix is not affine or not invertible.
    explicit GridTransform(const Mat4& matrix);

    static GridTransform uniform(double voxel_size);
    static GridTransform scale_translate(const Vec3d& scale, const Vec3d& translation = {});

    const Mat4& matrix() const { return matrix_; }
    const Vec3d& voxel_size() const { return voxel_size_; }

    Vec3d index_to_world(const Vec3d& p) const;
    Vec3d world_to_index(const Vec3d& p) const;

    bool operator==(const GridTransform& o) const { return matrix_ == o.matrix_; }

private:
    Mat4 matrix_;
    Mat4 inverse_;
    Vec3d voxel_size_;
};

}  // namespace gaussvdb
