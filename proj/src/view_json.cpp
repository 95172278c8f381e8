// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "gaussvdb/view_json.hpp"

#include <cmath>
#include <string>

#include "gaussvdb/error.hpp"

namespace gaussvdb {
namespace {

using nlohmann::json;

double number(const json& v, const std::string& key) {
    if (!v.is_number()) throw ValueError("field '" + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ValueError("field '" + key + "' must be finite");
    return d;
}

int integer(const json& v, const std::string& key) {
    if (!v.is_number_integer()) throw ValueError("field '" + key + "' must be an integer");
    const auto i = v.get<long long>();
    if (i < 0 || i > 1'000'000) throw ValueError("field '" + key + "' out of range");
    return int(i);
}

Vec3d vec3(const json& v, const std::string& key) {
    if (!v.is_array() || v.size() != 3) throw ValueError("field '" + key + "' must be [x, y, z]");
    return {number(v[0], key), number(v[1], key), number(v[2], key)};
}

std::string text(const json& v, const std::string& key) {
    if (!v.is_string()) throw ValueError("field '" + key + "' must be a string");
    return v.get<std::string>();
}

}  // namespace

void apply_view_json(const json& doc, ViewSpec& spec) {
    if (!doc.is_object()) throw ValueError("view document must be a JSON object");
    for (const auto& [key, v] : doc.items()) {
        if (key == "eye") spec.camera.eye = vec3(v, key);
        else if (key == "target") spec.camera.target = vec3(v, key);
        else if (key == "up") spec.camera.up = vec3(v, key);
        else if (key == "fov_deg") spec.camera.vertical_fov = number(v, key);
        else if (key == "width") spec.camera.width = integer(v, key);
        else if (key == "height") spec.camera.height = integer(v, key);
        else if (key == "lod") {
            const auto lod = parse_lod(text(v, key));
            if (!lod) throw ValueError("unknown lod '" + v.get<std::string>() + "'");
            spec.lod = lod;
        } else if (key == "tf") {
            const auto tf = parse_transfer_function(text(v, key));
            if (!tf) throw ValueError("unknown tf '" + v.get<std::string>() + "'");
            spec.config.tf = *tf;
        } else if (key == "tf_range") {
            if (v.is_null()) {
                spec.config.tf_range.reset();
            } else {
                if (!v.is_array() || v.size() != 2) throw ValueError("field 'tf_range' must be [lo, hi]");
                spec.config.tf_range = std::pair{number(v[0], key), number(v[1], key)};
            }
        } else if (key == "density_scale") spec.config.density_scale = number(v, key);
        else if (key == "samples_per_segment") spec.config.samples_per_segment = integer(v, key);
        else if (key == "t_min") spec.config.transmittance_floor = number(v, key);
        else if (key == "max_segments") spec.config.max_segments = integer(v, key);
        else if (key == "background") spec.config.background = vec3(v, key);
        else throw ValueError("unknown field '" + key + "'");
    }
}

ViewSpec parse_view(const json& camera, const json& config) {
    ViewSpec spec;
    apply_view_json(camera, spec);
    apply_view_json(config, spec);
    spec.camera.validate();
    spec.config.validate();
    return spec;
}

nlohmann::ordered_json to_json(const ViewSpec& s) {
    auto v3 = [](const Vec3d& v) { return nlohmann::ordered_json::array({v.x, v.y, v.z}); };
    nlohmann::ordered_json j;
    j["eye"] = v3(s.camera.eye);
    j["target"] = v3(s.camera.target);
    j["up"] = v3(s.camera.up);
    j["fov_deg"] = s.camera.vertical_fov;
    j["width"] = s.camera.width;
    j["height"] = s.camera.height;
    if (s.lod) j["lod"] = std::string(to_string(*s.lod));
    j["tf"] = std::string(to_string(s.config.tf));
    if (s.config.tf_range) j["tf_range"] = {s.config.tf_range->first, s.config.tf_range->second};
    j["density_scale"] = s.config.density_scale;
    j["samples_per_segment"] = s.config.samples_per_segment;
    j["t_min"] = s.config.transmittance_floor;
    j["max_segments"] = s.config.max_segments;
    j["background"] = v3(s.config.background);
    return j;
}

}  // namespace gaussvdb
