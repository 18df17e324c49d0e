// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "coig/executor.hpp"
#include "coig/runstore.hpp"
#include "support.hpp"

namespace coig {
namespace {

using testing::TempDir;

struct StoreFixture : ::testing::Test {
    TempDir dir;
    RunStore store{dir.path()};
    ExecutorOptions opts() {
        ExecutorOptions o;
        o.clock = testing::counting_clock();
        return o;
    }
    Executor ex{store, testing::mock(), "mock", opts()};
};

TEST_F(StoreFixture, ArtifactsAreContentAddressed) {
    const auto a = testing::mock()->generate("Add placeholder e1: cup at left");
    const auto ref = store.put_artifact(a);
    EXPECT_EQ(ref.id, a.id);
    EXPECT_EQ(store.put_artifact(a), ref);
    EXPECT_TRUE(std::filesystem::exists(store.blob_path(a.id)));
    EXPECT_EQ(store.blob_path(a.id).parent_path().filename(), a.id.substr(0, 2));
    EXPECT_EQ(store.load_artifact(ref).bytes, a.bytes);
}

TEST_F(StoreFixture, RejectsMismatchedArtifactId) {
    auto a = testing::mock()->generate("Add placeholder e1: cup at left");
    a.bytes.push_back('x');
    try {
        store.put_artifact(a);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::integrity_error);
    }
}

TEST_F(StoreFixture, RoundTripRandomRuns) {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 40; ++i) {
        const auto run = testing::random_run(rng, ex);
        store.save_run(run);
        EXPECT_EQ(store.load_run(run.run_id), run);
        EXPECT_EQ(parse_run(serialize_run(run)), run);
    }
}

TEST_F(StoreFixture, ManifestIsCanonical) {
    std::mt19937_64 rng(2);
    const auto run = testing::random_run(rng, ex);
    store.save_run(run);
    const auto text = read_file(store.manifest_path(run.run_id));
    EXPECT_EQ(text, canonical_dump(json::parse(text)) + "\n");
}

TEST_F(StoreFixture, TamperedBlobIsCorrupt) {
    std::mt19937_64 rng(4);
    const auto run = testing::random_run(rng, ex);
    store.save_run(run);
    const auto victim = run.steps.back().image->id;
    {
        std::ofstream out(store.blob_path(victim), std::ios::binary | std::ios::app);
        out << ' ';
    }
    try {
        store.load_run(run.run_id);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::corrupt_manifest);
    }
}

TEST_F(StoreFixture, MissingBlobIsCorrupt) {
    std::mt19937_64 rng(5);
    const auto run = testing::random_run(rng, ex);
    store.save_run(run);
    std::filesystem::remove(store.blob_path(run.steps.front().image->id));
    try {
        store.load_run(run.run_id);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::corrupt_manifest);
    }
}

TEST_F(StoreFixture, GarbageManifestIsCorrupt) {
    std::mt19937_64 rng(6);
    const auto run = testing::random_run(rng, ex);
    store.save_run(run);
    write_file_atomic(store.manifest_path(run.run_id), "{\"run_id\":");
    try {
        store.load_run(run.run_id);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::corrupt_manifest);
    }
}

TEST_F(StoreFixture, SaveRefusesDanglingReferences) {
    std::mt19937_64 rng(7);
    auto run = testing::random_run(rng, ex);
    run.steps.front().image->id = std::string(64, 'a');
    try {
        store.save_run(run);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::integrity_error);
    }
}

TEST_F(StoreFixture, UnknownAndUnsafeIds) {
    for (const std::string id : {"nope", "../etc", ""}) {
        try {
            store.load_run(id);
            ADD_FAILURE() << id;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::not_found);
        }
    }
}

TEST_F(StoreFixture, ListRunsNewestFirstWithFilter) {
    std::mt19937_64 rng(8);
    std::vector<ChainRun> runs;
    for (int i = 0; i < 5; ++i) runs.push_back(ex.start_run(testing::random_plan(rng), i % 2 == 0));
    for (auto& r : runs) {
        if (r.status == RunStatus::running) ex.run_to_completion(r);
    }
    const auto all = store.list_runs();
    ASSERT_EQ(all.size(), 5u);
    for (std::size_t i = 1; i < all.size(); ++i) EXPECT_GE(all[i - 1].created_at, all[i].created_at);
    const auto completed = store.list_runs(RunStatus::completed);
    EXPECT_EQ(completed.size(), 2u);
    for (const auto& s : completed) EXPECT_EQ(s.status, RunStatus::completed);
}

TEST_F(StoreFixture, Reports) {
    store.save_report("r1", "readability", json{{"x", 1}}, std::string("a,b\n1,2\n"));
    EXPECT_EQ(store.load_report("r1", "readability"), (json{{"x", 1}}));
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "reports" / "r1" / "readability.csv"));
    EXPECT_THROW(store.load_report("r1", "causal"), Error);
}

TEST_F(StoreFixture, KillDuringSaveNeverTears) {
    std::mt19937_64 rng(9);
    const auto run = testing::random_run(rng, ex);
    const auto r = testing::kill_during_save(store, run, 20, rng);
    EXPECT_EQ(r.rounds, 20);
    EXPECT_EQ(r.torn, 0);
    EXPECT_EQ(r.foreign, 0);
}

}  // namespace
}  // namespace coig
