// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>

namespace gaussvdb {

struct ServiceOptions {
    std::filesystem::path data_dir;
    unsigned workers = 0;
    std::string cors_origin = "*";
    /// Largest accepted width * height for /api/render.
    long long max_pixels = 4096LL * 4096LL;
};

struct HttpResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
    std::map<std::string, std::string> headers;
};

/// Dataset listing, extraction and rendering over a directory of .svdb grids. Grids are
/// loaded once when the service is constructed; extracted sets and their BVHs are cached.
class RenderService {
public:
    /// Throws IoError when the data directory cannot be read.
    explicit RenderService(ServiceOptions options);
    ~RenderService();

    RenderService(const RenderService&) = delete;
    RenderService& operator=(const RenderService&) = delete;

    /// Transport-free dispatch, shared by the HTTP server and tests.
    HttpResponse handle(const std::string& method, const std::string& path,
                        const std::string& body) const;

    /// Binds host:port (0 picks a free port) and serves on a background thread.
    /// Returns the bound port; throws IoError when binding fails.
    int start(const std::string& host, int port);
    /// Blocks until stop() is called from elsewhere.
    void wait();
    void stop();

private:
    struct State;
    std::unique_ptr<State> state_;
};

}  // namespace gaussvdb
