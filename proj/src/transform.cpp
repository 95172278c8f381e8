// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "gaussvdb/transform.hpp"

#include <cmath>

#include "gaussvdb/error.hpp"

namespace gaussvdb {
namespace {

Mat4 invert_affine(const Mat4& m) {
    const double a = m[0], b = m[1], c = m[2];
    const double d = m[4], e = m[5], f = m[6];
    const double g = m[8], h = m[9], i = m[10];
    const double det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
    if (!std::isfinite(det) || std::abs(det) < 1e-300) {
        throw ValueError("grid transform is not invertible");
    }
    const double inv_det = 1.0 / det;
    Mat4 r{};
    r[0] = (e * i - f * h) * inv_det;
    r[1] = (c * h - b * i) * inv_det;
    r[2] = (b * f - c * e) * inv_det;
    r[4] = (f * g - d * i) * inv_det;
    r[5] = (a * i - c * g) * inv_det;
    r[6] = (c * d - a * f) * inv_det;
    r[8] = (d * h - e * g) * inv_det;
    r[9] = (b * g - a * h) * inv_det;
    r[10] = (a * e - b * d) * inv_det;
    const double tx = m[3], ty = m[7], tz = m[11];
    r[3] = -(r[0] * tx + r[1] * ty + r[2] * tz);
    r[7] = -(r[4] * tx + r[5] * ty + r[6] * tz);
    r[11] = -(r[8] * tx + r[9] * ty + r[10] * tz);
    r[15] = 1.0;
    return r;
}

Vec3d apply(const Mat4& m, const Vec3d& p) {
    return {m[0] * p.x + m[1] * p.y + m[2] * p.z + m[3],
            m[4] * p.x + m[5] * p.y + m[6] * p.z + m[7],
            m[8] * p.x + m[9] * p.y + m[10] * p.z + m[11]};
}

}  // namespace

GridTransform::GridTransform() : GridTransform(identity_matrix()) {}

GridTransform::GridTransform(const Mat4& matrix) : matrix_(matrix) {
    for (double v : matrix_) {
        if (!std::isfinite(v)) throw ValueError("grid transform has non-finite entries");
    }
    if (matrix_[12] != 0.0 || matrix_[13] != 0.0 || matrix_[14] != 0.0 || matrix_[15] != 1.0) {
        throw ValueError("grid transform is not affine");
    }
    inverse_ = invert_affine(matrix_);
    for (int col = 0; col < 3; ++col) {
        voxel_size_[std::size_t(col)] =
            std::sqrt(matrix_[std::size_t(col)] * matrix_[std::size_t(col)] +
                      matrix_[std::size_t(4 + col)] * matrix_[std::size_t(4 + col)] +
                      matrix_[std::size_t(8 + col)] * matrix_[std::size_t(8 + col)]);
    }
}

GridTransform GridTransform::uniform(double voxel_size) {
    return scale_translate(Vec3d(voxel_size));
}

GridTransform GridTransform::scale_translate(const Vec3d& scale, const Vec3d& translation) {
    Mat4 m = identity_matrix();
    m[0] = scale.x;
    m[5] = scale.y;
    m[10] = scale.z;
    m[3] = translation.x;
    m[7] = translation.y;
    m[11] = translation.z;
    return GridTransform(m);
}

Vec3d GridTransform::index_to_world(const Vec3d& p) const { return apply(matrix_, p); }

Vec3d GridTransform::world_to_index(const Vec3d& p) const { return apply(inverse_, p); }

}  // namespace gaussvdb
