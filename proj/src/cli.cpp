// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#include "gaussvdb/cli.hpp"

#include <algorithm>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gaussvdb/error.hpp"
#include "gaussvdb/extract.hpp"
#include "gaussvdb/io.hpp"
#include "gaussvdb/png.hpp"
#include "gaussvdb/render.hpp"
#include "gaussvdb/report.hpp"
#include "gaussvdb/service.hpp"
#include "gaussvdb/view_json.hpp"

namespace gaussvdb::cli {
namespace {

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

nlohmann::json read_json_file(const std::string& path) {
    const auto bytes = read_file(path);
    try {
        return nlohmann::json::parse(bytes.begin(), bytes.end());
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
}

struct Options {
    unsigned threads = 0;

    std::string header, data, out;
    bool collapse_tiles = false;

    std::string grid, lod = "low";
    double variance_split = -1.0;
    double merge = -1.0;
    bool extent_scaling = false;

    std::string gaussians, camera, config;

    bool json = false;

    int port = 8080;
    std::string host = "127.0.0.1";
    std::string data_dir;
};

void cmd_ingest(const Options& o, std::ostream& out) {
    const SparseGrid grid = read_raw(o.header, o.data, o.collapse_tiles);
    write_file(o.out, write_grid(grid));
    const auto c = grid.counts();
    out << "wrote " << o.out << ": active_voxels=" << c.active_voxels << " leaves=" << c.leaf_count
        << " tiles=" << c.tile_count << '\n';
}

void cmd_extract(const Options& o, std::ostream& out) {
    ExtractConfig cfg;
    cfg.lod = *parse_lod(o.lod);
    cfg.opacity_extent_scaling = o.extent_scaling;
    if (o.variance_split >= 0.0) {
        cfg.enable_variance_split = true;
        cfg.variance_threshold = o.variance_split;
    }
    if (o.merge >= 0.0) {
        cfg.enable_merge_pass = true;
        cfg.merge_threshold = o.merge;
    }
    const SparseGrid grid = read_grid(read_file(o.grid));
    const GaussianSet set = extract(grid, cfg, o.threads);
    write_file(o.out, write_gaussians(set));
    const auto f = footprint(set);
    out << "wrote " << o.out << ": gaussians=" << f.gaussian_count << " spheres=" << f.sphere_count
        << " ellipsoids=" << f.ellipsoid_count << " payload_bytes=" << f.payload_bytes << '\n';
}

void cmd_render(const Options& o, std::ostream& out) {
    const GaussianSet set = read_gaussians(read_file(o.gaussians));
    ViewSpec view;
    try {
        view = parse_view(read_json_file(o.camera), read_json_file(o.config));
    } catch (const ValueError& e) {
        throw FormatError(std::string("view documents: ") + e.what());
    }
    const RenderConfig cfg = resolve_config(view.config, set);
    const Framebuffer fb = render(set, Bvh(set), view.camera, cfg, o.threads);
    write_png(o.out, fb);
    out << "wrote " << o.out << ": " << fb.width << "x" << fb.height << '\n';
}

void cmd_stats(const Options& o, std::ostream& out) {
    const SparseGrid grid = read_grid(read_file(o.grid));
    const GridStats stats = grid_stats(grid);
    std::optional<FootprintReport> fp;
    if (!o.gaussians.empty()) {
        fp = footprint(read_gaussians(read_file(o.gaussians)));
        fp->grid_stats = stats;
    }
    if (o.json) {
        nlohmann::ordered_json j;
        j["grid"] = grid.name();
        j["grid_class"] = std::string(to_string(grid.grid_class()));
        const auto stats_json = to_json(stats);
        for (const auto& [k, v] : stats_json.items()) j[k] = v;
        if (fp) j["footprint"] = to_json(*fp);
        out << j.dump(2) << '\n';
        return;
    }
    out << "grid            " << (grid.name().empty() ? "-" : grid.name()) << '\n'
        << "grid_class      " << to_string(grid.grid_class()) << '\n'
        << "active_voxels   " << stats.active_voxels << '\n'
        << "leaf_count      " << stats.leaf_count << '\n'
        << "tile_count      " << stats.tile_count << '\n'
        << "dense_leaves    " << stats.dense_leaf_count << '\n'
        << "dense_ratio     " << stats.dense_ratio() << '\n';
    if (fp) {
        out << "gaussians       " << fp->gaussian_count << " (" << fp->sphere_count << " spheres, "
            << fp->ellipsoid_count << " ellipsoids)\n"
            << "payload_bytes   " << fp->payload_bytes << '\n'
            << "summary         " << format_lod_cell(fp->lod, fp->payload_bytes, fp->gaussian_count)
            << '\n';
    }
}

void cmd_serve(const Options& o, std::ostream& out) {
    ServiceOptions so;
    so.data_dir = o.data_dir;
    so.workers = o.threads;
    RenderService service(so);
    const int port = service.start(o.host, o.port);
    out << "listening on http://" << o.host << ":" << port << '\n' << std::flush;
    service.wait();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sparse voxel grids to Gaussian sets, and a renderer for them", "gaussvdb"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--threads", o.threads, "Worker threads (default: GAUSSVDB_THREADS or all cores)")
        ->check(CLI::PositiveNumber);

    auto* ingest = app.add_subcommand("ingest", "Raw volume + JSON header to .svdb");
    ingest->add_option("--header", o.header)->required();
    ingest->add_option("--data", o.data)->required();
    ingest->add_option("--out", o.out)->required();
    ingest->add_flag("--collapse-tiles", o.collapse_tiles);

    auto* extract_cmd = app.add_subcommand("extract", ".svdb to .gpts");
    extract_cmd->add_option("--grid", o.grid)->required();
    extract_cmd->add_option("--lod", o.lod)->required()->check(CLI::IsMember({"low", "med", "medium", "high"}));
    extract_cmd->add_option("--variance-split", o.variance_split)->check(CLI::NonNegativeNumber);
    extract_cmd->add_option("--merge", o.merge)->check(CLI::NonNegativeNumber);
    extract_cmd->add_flag("--opacity-extent-scaling", o.extent_scaling);
    extract_cmd->add_option("--out", o.out)->required();

    auto* render_cmd = app.add_subcommand("render", ".gpts to PNG");
    render_cmd->add_option("--gaussians", o.gaussians)->required();
    render_cmd->add_option("--camera", o.camera)->required();
    render_cmd->add_option("--config", o.config)->required();
    render_cmd->add_option("--out", o.out)->required();

    auto* stats = app.add_subcommand("stats", "Grid and Gaussian set statistics");
    stats->add_option("--grid", o.grid)->required();
    stats->add_option("--gaussians", o.gaussians);
    stats->add_flag("--json", o.json);

    auto* serve = app.add_subcommand("serve", "HTTP render service");
    serve->add_option("--port", o.port)->check(CLI::Range(0, 65535));
    serve->add_option("--host", o.host);
    serve->add_option("--data-dir", o.data_dir)->required();

    for (auto* sub : {ingest, extract_cmd, render_cmd, stats, serve}) {
        sub->add_option("--threads", o.threads)->check(CLI::PositiveNumber);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << one_line(e.what()) << '\n';
        return kExitUsage;
    }

    try {
        if (ingest->parsed()) cmd_ingest(o, out);
        else if (extract_cmd->parsed()) cmd_extract(o, out);
        else if (render_cmd->parsed()) cmd_render(o, out);
        else if (stats->parsed()) cmd_stats(o, out);
        else if (serve->parsed()) cmd_serve(o, out);
    } catch (const IoError& e) {
        err << "error: io: " << one_line(e.what()) << '\n';
        return kExitIo;
    } catch (const FormatError& e) {
        err << "error: format: " << one_line(e.what()) << '\n';
        return kExitIo;
    } catch (const ValueError& e) {
        err << "error: value: " << one_line(e.what()) << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: internal: " << one_line(e.what()) << '\n';
        return kExitIo;
    }
    return kExitOk;
}

}  // namespace gaussvdb::cli
