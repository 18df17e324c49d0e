// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

// Drives the built binary as a subprocess.

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sys/wait.h>

#include "coig/util.hpp"
#include "support.hpp"

#ifndef COIG_CLI_PATH
#error "COIG_CLI_PATH must name the coig binary"
#endif

namespace coig {
namespace {

using testing::TempDir;

struct Result {
    int code = -1;
    std::string out;
};

std::string quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

struct CliFixture : ::testing::Test {
    TempDir dir;

    Result cli(const std::string& args, bool merge_stderr = false) {
        const std::string cmd = "cd " + quote(dir.path().string()) + " && env -u COIG_CONFIG COIG_STORE=" +
                                quote((dir.path() / "store").string()) + " " + COIG_CLI_PATH + " " + args +
                                (merge_stderr ? " 2>&1" : " 2>/dev/null");
        Result r;
        FILE* p = ::popen(cmd.c_str(), "r");
        std::array<char, 4096> buf{};
        std::size_t n;
        while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
        const int status = ::pclose(p);
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        return r;
    }
};

TEST_F(CliFixture, PlanRunEvalFlow) {
    auto plan = cli("--json plan 'a red apple and a blue bowl on a table' --out plan.json");
    ASSERT_EQ(plan.code, 0);
    EXPECT_EQ(json::parse(plan.out).at("steps").size(), 4u);
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "plan.json"));

    auto run = cli("--json run plan.json");
    ASSERT_EQ(run.code, 0);
    const auto doc = json::parse(run.out);
    EXPECT_EQ(doc.at("status"), "completed");
    const auto id = doc.at("run_id").get<std::string>();
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "store" / "runs" / id / "manifest.json"));

    auto read = cli("--json eval readability " + id);
    ASSERT_EQ(read.code, 0);
    EXPECT_EQ(json::parse(read.out).at("overall").at("after"), 1.0);

    auto causal = cli("--json eval causal " + id + " --step 2 --to green");
    ASSERT_EQ(causal.code, 0);
    EXPECT_EQ(json::parse(causal.out).at("score_at_step"), 1.0);

    auto gray = cli("eval causal " + id + " --step 2 --to gray", true);
    EXPECT_EQ(gray.code, 1);
    EXPECT_NE(gray.out.find("gray_forbidden"), std::string::npos);
}

TEST_F(CliFixture, StepWiseAndInterventions) {
    auto run = cli("--json run 'a red apple and a blue bowl on a table' --step");
    ASSERT_EQ(run.code, 0);
    const auto id = json::parse(run.out).at("run_id").get<std::string>();
    EXPECT_EQ(json::parse(run.out).at("status"), "paused");
    auto edit = cli("--json intervene " + id +
                    " --kind edit_step --at 2 --action 'Detail e1 (apple): color=green' --target e1");
    ASSERT_EQ(edit.code, 0) << edit.out;
    auto resume = cli("--json resume " + id);
    ASSERT_EQ(resume.code, 0);
    EXPECT_EQ(json::parse(resume.out).at("cursor"), 2);
    auto rerun = cli("--json intervene " + id + " --kind rerun_from --at 9");
    EXPECT_EQ(rerun.code, 1);
}

TEST_F(CliFixture, EcGenIsDeterministic) {
    auto a = cli("bench ec-gen --count 25 --seed 3");
    auto b = cli("bench ec-gen --count 25 --seed 3");
    auto c = cli("bench ec-gen --count 25 --seed 4");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out, c.out);
    EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 25);
}

TEST_F(CliFixture, BenchRun) {
    ASSERT_EQ(cli("bench ec-gen --count 4 --seed 1 --out ec.jsonl").code, 0);
    auto r = cli("--json bench run --suite ec --pipeline coig --prompts ec.jsonl --out card");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(json::parse(r.out).at("means").at("total"), 7.0);
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "card.json"));
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "card.csv"));
    auto sp = cli("--json bench run --suite ec --pipeline single_pass --fault merge --prompts ec.jsonl");
    ASSERT_EQ(sp.code, 0);
    EXPECT_EQ(json::parse(sp.out).at("means").at("entity_count"), 0.0);
}

TEST_F(CliFixture, UsageAndOperationErrors) {
    EXPECT_EQ(cli("frobnicate").code, 2);
    EXPECT_EQ(cli("bench run --suite nope --prompts x").code, 2);
    auto missing = cli("--json resume deadbeef");
    EXPECT_EQ(missing.code, 1);
    EXPECT_EQ(json::parse(missing.out).at("error").at("code"), "not_found");
    EXPECT_EQ(cli("--config nowhere.json plan 'a red apple'").code, 1);
}

}  // namespace
}  // namespace coig
