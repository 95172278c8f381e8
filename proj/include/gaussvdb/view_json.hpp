// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include <json.hpp>

#include "gaussvdb/gaussian.hpp"
#include "gaussvdb/render.hpp"

namespace gaussvdb {

/// Camera, integration settings and requested LOD as carried by camera/config documents.
struct ViewSpec {
    Camera camera;
    RenderConfig config;
    std::optional<Lod> lod;
};

/// Overlays the fields present in `doc` onto `spec`. Accepted keys: eye, target, up, fov_deg,
/// width, height, lod, tf, tf_range, density_scale, samples_per_segment, t_min, max_segments,
/// background. Anything else, or a value of the wrong type, throws ValueError.
void apply_view_json(const nlohmann::json& doc, ViewSpec& spec);

/// Parses a complete spec from camera and config documents and validates it.
ViewSpec parse_view(const nlohmann::json& camera, const nlohmann::json& config);

nlohmann::ordered_json to_json(const ViewSpec& spec);

}  // namespace gaussvdb
