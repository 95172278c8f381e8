// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "gaussvdb/service.hpp"

#include <algorithm>
#include <mutex>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "gaussvdb/bvh.hpp"
#include "gaussvdb/error.hpp"
#include "gaussvdb/extract.hpp"
#include "gaussvdb/io.hpp"
#include "gaussvdb/png.hpp"
#include "gaussvdb/render.hpp"
#include "gaussvdb/report.hpp"
#include "gaussvdb/view_json.hpp"

namespace gaussvdb {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct Dataset {
    std::string id;
    std::shared_ptr<const SparseGrid> grid;  // null when the file failed to load
    std::string error;
};

struct CachedSet {
    GaussianSet set;
    Bvh bvh;
    FootprintReport report;
};

/// Request failure carrying the HTTP status to send.
struct HttpError : std::runtime_error {
    int status;
    HttpError(int s, const std::string& what) : std::runtime_error(what), status(s) {}
};

HttpResponse json_response(int status, const ordered_json& body) {
    HttpResponse r;
    r.status = status;
    r.body = body.dump();
    return r;
}

HttpResponse error_response(int status, const std::string& message) {
    ordered_json j;
    j["error"] = message;
    return json_response(status, j);
}

json parse_body(const std::string& body) {
    try {
        json j = json::parse(body);
        if (!j.is_object()) throw HttpError(400, "request body must be a JSON object");
        return j;
    } catch (const json::exception& e) {
        throw HttpError(400, std::string("invalid JSON: ") + e.what());
    }
}

Lod lod_field(const json& v) {
    if (!v.is_string()) throw HttpError(400, "lod must be a string");
    const auto lod = parse_lod(v.get<std::string>());
    if (!lod) throw HttpError(400, "unknown lod '" + v.get<std::string>() + "'");
    return *lod;
}

/// Normalized extraction options plus their canonical text for the cache key.
std::pair<ExtractConfig, std::string> parse_options(const json* options, Lod lod) {
    ExtractConfig cfg;
    cfg.lod = lod;
    ordered_json canon;
    canon["variance_split"] = nullptr;
    canon["merge"] = nullptr;
    canon["opacity_extent_scaling"] = false;
    if (options && !options->is_null()) {
        if (!options->is_object()) throw HttpError(400, "options must be an object");
        for (const auto& [key, v] : options->items()) {
            if (key == "variance_split" || key == "merge") {
                if (v.is_null()) continue;
                if (!v.is_number() || !(v.get<double>() >= 0.0))
                    throw HttpError(400, key + " must be a non-negative number");
                canon[key] = v.get<double>();
                if (key == "merge") {
                    cfg.enable_merge_pass = true;
                    cfg.merge_threshold = v.get<double>();
                } else {
                    cfg.enable_variance_split = true;
                    cfg.variance_threshold = v.get<double>();
                }
            } else if (key == "opacity_extent_scaling") {
                if (!v.is_boolean()) throw HttpError(400, key + " must be a boolean");
                cfg.opacity_extent_scaling = v.get<bool>();
                canon[key] = cfg.opacity_extent_scaling;
            } else {
                throw HttpError(400, "unknown option '" + key + "'");
            }
        }
    }
    return {cfg, canon.dump()};
}

}  // namespace

struct RenderService::State {
    ServiceOptions options;
    std::vector<Dataset> datasets;

    mutable std::mutex mutex;
    mutable std::map<std::string, std::shared_ptr<const CachedSet>> cache;

    httplib::Server server;
    std::jthread thread;

    const Dataset& dataset(const json& body) const {
        const auto it = body.find("dataset");
        if (it == body.end() || !it->is_string()) throw HttpError(400, "missing dataset");
        const std::string id = it->get<std::string>();
        for (const auto& d : datasets) {
            if (d.id != id) continue;
            if (!d.grid) throw HttpError(422, "dataset '" + id + "' is unreadable: " + d.error);
            return d;
        }
        throw HttpError(404, "unknown dataset '" + id + "'");
    }

    /// Returns the cached set and whether it was a hit. Extraction runs outside the lock; when
    /// two requests race, the first insertion is kept and the other result is dropped.
    std::pair<std::shared_ptr<const CachedSet>, bool> lookup(const Dataset& d, Lod lod,
                                                            const json* options) const {
        const auto [cfg, canon] = parse_options(options, lod);
        const std::string key = d.id + '\n' + std::string(to_string(lod)) + '\n' + canon;
        {
            std::lock_guard lock(mutex);
            if (auto it = cache.find(key); it != cache.end()) return {it->second, true};
        }
        auto fresh = std::make_shared<CachedSet>();
        fresh->set = extract(*d.grid, cfg, options_workers());
        fresh->bvh = Bvh(fresh->set);
        fresh->report = footprint(fresh->set);
        fresh->report.grid_stats = grid_stats(*d.grid);
        std::lock_guard lock(mutex);
        const auto [it, inserted] = cache.emplace(key, std::move(fresh));
        return {it->second, false};
    }

    unsigned options_workers() const { return options.workers; }

    HttpResponse list() const {
        ordered_json arr = ordered_json::array();
        for (const auto& d : datasets) {
            ordered_json e;
            e["id"] = d.id;
            if (d.grid) {
                const auto c = d.grid->counts();
                e["voxels"] = c.active_voxels;
                e["leaf_count"] = c.leaf_count;
                e["grid_class"] = std::string(to_string(d.grid->grid_class()));
                e["error"] = nullptr;
            } else {
                e["voxels"] = nullptr;
                e["leaf_count"] = nullptr;
                e["grid_class"] = nullptr;
                e["error"] = d.error;
            }
            arr.push_back(std::move(e));
        }
        return json_response(200, arr);
    }

    HttpResponse do_extract(const std::string& text) const {
        const json body = parse_body(text);
        const Dataset& d = dataset(body);
        const auto lod_it = body.find("lod");
        if (lod_it == body.end()) throw HttpError(400, "missing lod");
        const Lod lod = lod_field(*lod_it);
        const auto opt_it = body.find("options");
        const auto [entry, hit] = lookup(d, lod, opt_it == body.end() ? nullptr : &*opt_it);
        auto r = json_response(200, to_json(entry->report));
        r.headers["X-Cache"] = hit ? "hit" : "miss";
        return r;
    }

    HttpResponse do_render(const std::string& text) const {
        const json body = parse_body(text);
        const Dataset& d = dataset(body);
        ViewSpec view;
        try {
            const auto cam = body.find("camera");
            if (cam == body.end()) throw ValueError("missing camera");
            apply_view_json(*cam, view);
            if (const auto cfg = body.find("config"); cfg != body.end()) apply_view_json(*cfg, view);
            view.camera.validate();
            view.config.validate();
        } catch (const ValueError& e) {
            throw HttpError(400, e.what());
        }
        if (double(view.camera.width) * double(view.camera.height) > double(options.max_pixels))
            throw HttpError(400, "image too large");
        Lod lod = view.lod.value_or(Lod::low);
        if (const auto it = body.find("lod"); it != body.end()) lod = lod_field(*it);
        const auto opt_it = body.find("options");
        const auto [entry, hit] = lookup(d, lod, opt_it == body.end() ? nullptr : &*opt_it);

        const RenderConfig cfg = resolve_config(view.config, entry->set);
        const Framebuffer fb = render(entry->set, entry->bvh, view.camera, cfg, options.workers);
        const auto png = encode_png(fb);
        HttpResponse r;
        r.content_type = "image/png";
        r.body.assign(png.begin(), png.end());
        r.headers["X-Cache"] = hit ? "hit" : "miss";
        return r;
    }
};

RenderService::RenderService(ServiceOptions options) : state_(std::make_unique<State>()) {
    state_->options = std::move(options);
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::directory_iterator it(state_->options.data_dir, ec);
    if (ec) throw IoError("cannot read data dir " + state_->options.data_dir.string() + ": " + ec.message());
    std::vector<fs::path> files;
    for (; it != fs::directory_iterator(); it.increment(ec)) {
        if (ec) throw IoError("cannot read data dir: " + ec.message());
        if (it->path().extension() == ".svdb" && it->is_regular_file()) files.push_back(it->path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        Dataset d;
        d.id = path.stem().string();
        try {
            const auto bytes = read_file(path);
            d.grid = std::make_shared<const SparseGrid>(read_grid(bytes));
        } catch (const std::exception& e) {
            d.error = e.what();
        }
        state_->datasets.push_back(std::move(d));
    }
}

RenderService::~RenderService() { stop(); }

HttpResponse RenderService::handle(const std::string& method, const std::string& path,
                                   const std::string& body) const {
    HttpResponse r;
    try {
        if (method == "OPTIONS") {
            r.status = 204;
            r.content_type.clear();
        } else if (path == "/api/datasets") {
            r = method == "GET" ? state_->list() : error_response(405, "method not allowed");
        } else if (path == "/api/extract") {
            r = method == "POST" ? state_->do_extract(body) : error_response(405, "method not allowed");
        } else if (path == "/api/render") {
            r = method == "POST" ? state_->do_render(body) : error_response(405, "method not allowed");
        } else {
            r = error_response(404, "no route for " + path);
        }
    } catch (const HttpError& e) {
        r = error_response(e.status, e.what());
    } catch (const ValueError& e) {
        r = error_response(400, e.what());
    } catch (const std::exception& e) {
        r = error_response(500, e.what());
    }
    const std::string& origin = state_->options.cors_origin;
    if (!origin.empty()) {
        r.headers["Access-Control-Allow-Origin"] = origin;
        r.headers["Access-Control-Allow-Methods"] = "GET, POST, OPTIONS";
        r.headers["Access-Control-Allow-Headers"] = "Content-Type";
        r.headers["Access-Control-Expose-Headers"] = "X-Cache";
    }
    return r;
}

int RenderService::start(const std::string& host, int port) {
    auto& server = state_->server;
    auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
        const HttpResponse r = handle(req.method, req.path, req.body);
        res.status = r.status;
        for (const auto& [k, v] : r.headers) res.set_header(k, v);
        if (!r.content_type.empty()) res.set_content(r.body, r.content_type);
    };
    server.Get(".*", dispatch);
    server.Post(".*", dispatch);
    server.Options(".*", dispatch);
    int bound = port;
    if (port == 0) {
        bound = server.bind_to_any_port(host);
    } else if (!server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
    state_->thread = std::jthread([&server] { server.listen_after_bind(); });
    server.wait_until_ready();
    return bound;
}

void RenderService::wait() {
    if (state_->thread.joinable()) state_->thread.join();
}

void RenderService::stop() {
    if (!state_) return;
    state_->server.stop();
    if (state_->thread.joinable()) state_->thread.join();
}

}  // namespace gaussvdb
