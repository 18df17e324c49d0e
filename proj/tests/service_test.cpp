// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "coig/caption.hpp"
#include "coig/executor.hpp"
#include "service_harness.hpp"
#include "support.hpp"

namespace coig {
namespace {

using testing::TempDir;

const std::string kCaption = "a red apple and a blue bowl on a table";

ServiceOptions options_for(const TempDir& dir) {
    ServiceOptions o;
    o.config = default_config();
    o.config.store_root = dir.path();
    return o;
}

TEST(ServiceCodes, Mapping) {
    EXPECT_EQ(http_status(ApiCode::not_found), 404);
    EXPECT_EQ(http_status(ApiCode::invalid_input), 422);
    EXPECT_EQ(http_status(ApiCode::conflict), 409);
    EXPECT_EQ(http_status(ApiCode::backend_failure), 502);
    EXPECT_EQ(http_status(ApiCode::internal), 500);
    EXPECT_EQ(api_code_of(Errc::not_found), ApiCode::not_found);
    EXPECT_EQ(api_code_of(Errc::plan_invalid), ApiCode::invalid_input);
    EXPECT_EQ(api_code_of(Errc::index_out_of_range), ApiCode::invalid_input);
    EXPECT_EQ(api_code_of(Errc::run_not_paused), ApiCode::conflict);
    EXPECT_EQ(api_code_of(Errc::transport_error), ApiCode::backend_failure);
    EXPECT_EQ(api_code_of(Errc::io_error), ApiCode::internal);
}

TEST(Service, EndToEndScript) {
    TempDir dir;
    testing::LiveService svc(options_for(dir));
    auto c = svc.client();
    EXPECT_EQ(testing::e2e_script(c), "");
}

TEST(Service, HealthAndUnknownRoutes) {
    TempDir dir;
    testing::LiveService svc(options_for(dir));
    auto c = svc.client();
    EXPECT_EQ(testing::json_of(c.Get("/healthz")).at("status"), "ok");
    auto r = c.Get("/nope");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 404);
    EXPECT_EQ(json::parse(r->body).at("code"), "not_found");
    r = c.Get("/runs/deadbeef");
    EXPECT_EQ(r->status, 404);
    r = c.Get("/artifacts/" + std::string(64, 'a'));
    EXPECT_EQ(r->status, 404);
}

TEST(Service, CreateFromPlanAndList) {
    TempDir dir;
    testing::LiveService svc(options_for(dir));
    auto c = svc.client();
    const auto plan = caption::template_plan(kCaption, *caption::parse(kCaption));
    auto r = c.Post("/runs", json{{"plan", to_json(plan)}, {"step_wise", true}}.dump(), "application/json");
    ASSERT_EQ(r->status, 201);
    const auto id = json::parse(r->body).at("run_id").get<std::string>();
    const auto run = testing::wait_for_status(c, id, "paused");
    EXPECT_EQ(run.at("cursor"), 1);
    const auto list = testing::json_of(c.Get("/runs?status=paused"));
    ASSERT_EQ(list.at("runs").size(), 1u);
    EXPECT_EQ(list.at("runs")[0].at("run_id"), id);
    EXPECT_TRUE(testing::json_of(c.Get("/runs?status=completed")).at("runs").empty());
}

TEST(Service, InputErrors) {
    TempDir dir;
    testing::LiveService svc(options_for(dir));
    auto c = svc.client();
    auto r = c.Post("/runs", "{not json", "application/json");
    EXPECT_EQ(r->status, 422);
    r = c.Post("/runs", json{{"nothing", 1}}.dump(), "application/json");
    EXPECT_EQ(r->status, 422);
    auto plan = caption::template_plan(kCaption, *caption::parse(kCaption));
    plan.steps[1].final_goal = "other";
    r = c.Post("/runs", json{{"plan", to_json(plan)}}.dump(), "application/json");
    ASSERT_EQ(r->status, 422);
    const auto body = json::parse(r->body);
    EXPECT_EQ(body.at("code"), "invalid_input");
    EXPECT_EQ(body.at("detail").at("violations")[0].at("rule"), "missing_final_goal");
    r = c.Post("/runs", json{{"prompt", kCaption}, {"profile", "nope"}}.dump(), "application/json");
    EXPECT_EQ(r->status, 422);
    // The planner cannot decompose it: a backend failure, not a bad request.
    r = c.Post("/runs", json{{"prompt", "the meaning of tuesday"}}.dump(), "application/json");
    EXPECT_EQ(r->status, 502);
    EXPECT_EQ(json::parse(r->body).at("detail").at("error"), "planner_output_error");
}

TEST(Service, ConflictsAndBounds) {
    TempDir dir;
    testing::LiveService svc(options_for(dir));
    auto c = svc.client();
    auto r = c.Post("/runs", json{{"prompt", kCaption}}.dump(), "application/json");
    const auto id = json::parse(r->body).at("run_id").get<std::string>();
    testing::wait_for_status(c, id, "completed");
    r = c.Post("/runs/" + id + "/interventions", json{{"kind", "rerun_from"}, {"at_index", 2}}.dump(),
               "application/json");
    EXPECT_EQ(r->status, 409);
    c.Post("/runs/" + id + "/pause", "", "application/json");
    r = c.Post("/runs/" + id + "/interventions", json{{"kind", "rerun_from"}, {"at_index", 9}}.dump(),
               "application/json");
    EXPECT_EQ(r->status, 422);
    r = c.Post("/runs/" + id + "/interventions", json{{"kind", "teleport"}, {"at_index", 1}}.dump(),
               "application/json");
    EXPECT_EQ(r->status, 422);
    r = c.Post("/runs/" + id + "/resume", "", "application/json");
    EXPECT_EQ(r->status, 200);
    EXPECT_EQ(json::parse(r->body).at("status"), "completed");
}

TEST(Service, EventReplayFromOffset) {
    TempDir dir;
    testing::LiveService svc(options_for(dir));
    auto c = svc.client();
    auto r = c.Post("/runs", json{{"prompt", kCaption}}.dump(), "application/json");
    const auto id = json::parse(r->body).at("run_id").get<std::string>();
    testing::wait_for_status(c, id, "completed");
    const auto events = testing::read_events(c, "/runs/" + id + "/events?since=2");
    ASSERT_EQ(events.size(), 3u);
    EXPECT_EQ(events[0].id, "2");
    EXPECT_EQ(events[1].id, "3");
    EXPECT_EQ(events[2].event, "end");
}

TEST(Service, ArtifactHeaders) {
    TempDir dir;
    testing::LiveService svc(options_for(dir));
    auto c = svc.client();
    auto r = c.Post("/runs", json{{"prompt", kCaption}}.dump(), "application/json");
    const auto id = json::parse(r->body).at("run_id").get<std::string>();
    const auto run = testing::wait_for_status(c, id, "completed");
    const auto art = run.at("steps")[3].at("image").at("id").get<std::string>();
    auto a = c.Get("/artifacts/" + art);
    ASSERT_EQ(a->status, 200);
    EXPECT_NE(a->get_header_value("Cache-Control").find("immutable"), std::string::npos);
    EXPECT_EQ(a->get_header_value("ETag"), "\"" + art + "\"");
    EXPECT_EQ(a->get_header_value("Content-Type"), "application/json");
}

TEST(Service, EvalEndpointsAndReports) {
    TempDir dir;
    testing::LiveService svc(options_for(dir));
    auto c = svc.client();
    auto r = c.Post("/runs", json{{"prompt", kCaption}}.dump(), "application/json");
    const auto id = json::parse(r->body).at("run_id").get<std::string>();
    testing::wait_for_status(c, id, "completed");

    r = c.Post("/runs/" + id + "/eval/readability", "", "application/json");
    ASSERT_EQ(r->status, 200);
    const auto rb = json::parse(r->body);
    EXPECT_EQ(rb, testing::json_of(c.Get("/reports/" + id + "/readability")));

    r = c.Post("/runs/" + id + "/eval/causal", json{{"step_index", 2}, {"field", "color"}, {"perturbed_value", "blue"}}.dump(),
               "application/json");
    ASSERT_EQ(r->status, 200) << r->body;
    const auto cb = json::parse(r->body);
    EXPECT_EQ(cb.at("cases").size(), 1u);
    r = c.Post("/runs/" + id + "/eval/causal", json{{"step_index", 2}, {"field", "color"}, {"perturbed_value", "gray"}}.dump(),
               "application/json");
    EXPECT_EQ(r->status, 422);
    r = c.Get("/reports/" + id + "/nothing");
    EXPECT_EQ(r->status, 404);
}

TEST(Service, BearerToken) {
    TempDir dir;
    auto o = options_for(dir);
    o.bearer_token = "hunter2";
    testing::LiveService svc(o);
    auto c = svc.client();
    EXPECT_EQ(c.Get("/healthz")->status, 200);
    auto r = c.Get("/runs");
    EXPECT_EQ(r->status, 401);
    EXPECT_EQ(json::parse(r->body).at("code"), "unauthorized");
    c.set_bearer_token_auth("hunter2");
    EXPECT_EQ(c.Get("/runs")->status, 200);
}

TEST(Service, RestartResumesRunningRuns) {
    TempDir dir;
    std::string id;
    {
        RunStore store(dir.path());
        Executor ex(store, testing::mock(), "mock");
        auto run = ex.start_run(caption::template_plan(kCaption, *caption::parse(kCaption)), true);
        run.status = RunStatus::running;
        run.step_wise = false;
        store.save_run(run);
        id = run.run_id;
    }
    testing::LiveService svc(options_for(dir));
    auto c = svc.client();
    const auto run = testing::wait_for_status(c, id, "completed");
    EXPECT_EQ(run.at("status"), "completed");
    EXPECT_EQ(run.at("cursor"), 4);
}

TEST(Service, BindConflict) {
    TempDir dir;
    testing::LiveService svc(options_for(dir));
    Service other(options_for(dir));
    try {
        other.bind("127.0.0.1", svc.port());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::bind_error);
    }
}

}  // namespace
}  // namespace coig
