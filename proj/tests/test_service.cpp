// SPDX-FileCopyrightText: 2026 The gaussvdb Authors
// SPDX-License-Identifier: Apache-2.0

#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include "gaussvdb/error.hpp"
#include "gaussvdb/io.hpp"
#include "gaussvdb/phantom.hpp"
#include "gaussvdb/png.hpp"
#include "gaussvdb/service.hpp"
#include "support/oracles.hpp"

namespace gaussvdb {
namespace {

using nlohmann::json;
using testing::TempDir;

void write_text(const std::filesystem::path& p, const std::string& s) {
    write_file(p, std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

json camera(int width = 32) {
    return {{"eye", {32, 40, 200}}, {"target", {32, 32, 32}}, {"up", {0, 1, 0}},
            {"fov_deg", 40}, {"width", width}, {"height", 24}};
}

json render_body(int width = 32, const std::string& lod = "low") {
    return {{"dataset", "dense"}, {"lod", lod}, {"camera", camera(width)},
            {"config", {{"tf", "jet"}, {"density_scale", 3000.0}}}};
}

class ServiceTest : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir = new TempDir("service");
        const Phantom dense = dense_phantom(64);
        write_file(*dir / "dense.svdb",
                   write_grid(sparsify_from_dense(dense.values, dense.header.dims, 0.f, 0.f, {}, false)));
        const Phantom ball = ball_phantom(32, 12.0);
        write_file(*dir / "ball.svdb",
                   write_grid(sparsify_from_dense(ball.values, ball.header.dims, 0.f, 0.f, {}, false)));
        write_text(*dir / "broken.svdb", "SVDB1");
        write_text(*dir / "notes.txt", "ignored");
        ServiceOptions opt;
        opt.data_dir = dir->path();
        opt.workers = 2;
        service = new RenderService(opt);
        port = service->start("127.0.0.1", 0);
    }
    static void TearDownTestSuite() {
        delete service;
        delete dir;
    }

    httplib::Result post(const std::string& path, const json& body) {
        httplib::Client c("127.0.0.1", port);
        return c.Post(path, body.dump(), "application/json");
    }

    static TempDir* dir;
    static RenderService* service;
    static int port;
};

TempDir* ServiceTest::dir = nullptr;
RenderService* ServiceTest::service = nullptr;
int ServiceTest::port = 0;

TEST_F(ServiceTest, ListsDatasetsWithErrorFlag) {
    httplib::Client c("127.0.0.1", port);
    const auto res = c.Get("/api/datasets");
    ASSERT_TRUE(res);
    ASSERT_EQ(res->status, 200);
    EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
    const json list = json::parse(res->body);
    ASSERT_EQ(list.size(), 3u);
    EXPECT_EQ(list[0]["id"], "ball");
    EXPECT_EQ(list[1]["id"], "broken");
    EXPECT_TRUE(list[1]["error"].is_string());
    EXPECT_EQ(list[2]["id"], "dense");
    EXPECT_EQ(list[2]["voxels"], 262144);
    EXPECT_EQ(list[2]["leaf_count"], 512);
    EXPECT_EQ(list[2]["grid_class"], "volume");
    EXPECT_TRUE(list[2]["error"].is_null());
}

TEST_F(ServiceTest, ExtractCachesReports) {
    const json body{{"dataset", "dense"}, {"lod", "medium"}, {"options", {{"merge", nullptr}}}};
    const auto first = post("/api/extract", body);
    ASSERT_TRUE(first);
    ASSERT_EQ(first->status, 200);
    EXPECT_EQ(first->get_header_value("X-Cache"), "miss");
    EXPECT_EQ(json::parse(first->body)["gaussian_count"], 4096);
    const auto again = post("/api/extract", {{"dataset", "dense"}, {"lod", "med"}});
    EXPECT_EQ(again->get_header_value("X-Cache"), "hit");
    EXPECT_EQ(again->body, first->body);
    const auto low = post("/api/extract", {{"dataset", "dense"}, {"lod", "low"}});
    const json report = json::parse(low->body);
    EXPECT_EQ(report["gaussian_count"], 512);
    EXPECT_EQ(report["payload_bytes"], 512 * 20);
    EXPECT_EQ(report["grid_stats"]["dense_leaf_count"], 512);
}

TEST_F(ServiceTest, ExtractErrors) {
    EXPECT_EQ(post("/api/extract", {{"dataset", "nope"}, {"lod", "low"}})->status, 404);
    EXPECT_EQ(post("/api/extract", {{"dataset", "dense"}, {"lod", "ultra"}})->status, 400);
    EXPECT_EQ(post("/api/extract", {{"dataset", "dense"}})->status, 400);
    EXPECT_EQ(post("/api/extract", {{"dataset", "dense"}, {"lod", "low"}, {"options", {{"zoom", 1}}}})->status, 400);
    EXPECT_EQ(post("/api/extract", {{"dataset", "broken"}, {"lod", "low"}})->status, 422);
    httplib::Client c("127.0.0.1", port);
    EXPECT_EQ(c.Post("/api/extract", "{not json", "application/json")->status, 400);
    EXPECT_EQ(c.Get("/api/extract")->status, 405);
    EXPECT_EQ(c.Get("/api/nothing")->status, 404);
}

TEST_F(ServiceTest, RenderReturnsStablePng) {
    const auto a = post("/api/render", render_body());
    ASSERT_TRUE(a);
    ASSERT_EQ(a->status, 200) << a->body;
    EXPECT_EQ(a->get_header_value("Content-Type"), "image/png");
    const Framebuffer fb = decode_png({a->body.begin(), a->body.end()});
    EXPECT_EQ(fb.width, 32);
    EXPECT_EQ(fb.height, 24);
    const auto b = post("/api/render", render_body());
    EXPECT_EQ(a->body, b->body);
    EXPECT_NE(post("/api/render", render_body(32, "high"))->body, a->body);
}

TEST_F(ServiceTest, RenderErrors) {
    EXPECT_EQ(post("/api/render", render_body(0))->status, 400);
    json bad = render_body();
    bad["camera"]["eye"] = {1, 2};
    EXPECT_EQ(post("/api/render", bad)->status, 400);
    bad = render_body();
    bad["camera"]["roll"] = 3;
    EXPECT_EQ(post("/api/render", bad)->status, 400);
    bad = render_body();
    bad.erase("camera");
    EXPECT_EQ(post("/api/render", bad)->status, 400);
    bad = render_body();
    bad["dataset"] = "nope";
    EXPECT_EQ(post("/api/render", bad)->status, 404);
    bad = render_body();
    bad["lod"] = "ultra";
    EXPECT_EQ(post("/api/render", bad)->status, 400);
}

TEST_F(ServiceTest, ConcurrentRendersMatchSerial) {
    std::vector<json> bodies;
    for (int w : {16, 24, 32, 40}) {
        bodies.push_back(render_body(w));
        bodies.push_back(render_body(w, "high"));
    }
    std::vector<std::string> serial;
    for (const auto& b : bodies) serial.push_back(post("/api/render", b)->body);
    std::vector<std::string> parallel(bodies.size());
    {
        std::vector<std::jthread> threads;
        for (std::size_t i = 0; i < bodies.size(); ++i) {
            threads.emplace_back([&, i] {
                httplib::Client c("127.0.0.1", port);
                c.set_read_timeout(120);
                auto res = c.Post("/api/render", bodies[i].dump(), "application/json");
                if (res && res->status == 200) parallel[i] = res->body;
            });
        }
    }
    EXPECT_EQ(parallel, serial);
}

TEST_F(ServiceTest, CorsPreflight) {
    httplib::Client c("127.0.0.1", port);
    const auto res = c.Options("/api/render");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 204);
    EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
    EXPECT_NE(res->get_header_value("Access-Control-Allow-Methods").find("POST"), std::string::npos);
}

TEST(Service, EmptyAndMissingDirectories) {
    TempDir empty("service_empty");
    RenderService svc({empty.path()});
    const HttpResponse r = svc.handle("GET", "/api/datasets", "");
    EXPECT_EQ(r.status, 200);
    EXPECT_EQ(r.body, "[]");
    EXPECT_THROW(RenderService({empty / "missing"}), IoError);
}

TEST(Service, FirstCachedResultIsShared) {
    TempDir d("service_race");
    SparseGrid g;
    for (int i = 0; i < 64; ++i) g.set_voxel({i, i % 7, i % 5}, 0.5f);
    write_file(d / "g.svdb", write_grid(g));
    RenderService svc({d.path()});
    const std::string body = R"({"dataset": "g", "lod": "high"})";
    std::vector<HttpResponse> out(8);
    {
        std::vector<std::jthread> threads;
        for (auto& slot : out) threads.emplace_back([&] { slot = svc.handle("POST", "/api/extract", body); });
    }
    for (const auto& r : out) {
        EXPECT_EQ(r.status, 200);
        EXPECT_EQ(r.body, out[0].body);
    }
    EXPECT_EQ(svc.handle("POST", "/api/extract", body).headers.at("X-Cache"), "hit");
}

}  // namespace
}  // namespace gaussvdb
