// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "coig/backends.hpp"
#include "coig/error.hpp"
#include "coig/plan.hpp"
#include "coig/run.hpp"
#include "coig/runstore.hpp"

namespace coig {

/// plan_invalid carrying the validator's findings.
class PlanInvalid : public Error {
public:
    explicit PlanInvalid(std::vector<PlanViolation> violations);
    const std::vector<PlanViolation>& violations() const noexcept { return violations_; }

private:
    std::vector<PlanViolation> violations_;
};

using EventSink = std::function<void(const StepEvent&)>;

struct ExecutorOptions {
    Clock clock = system_clock();
    EventSink on_event;
    std::size_t max_steps = kDefaultMaxSteps;
};

/// Runs plans against one image model, checkpointing every step in the
/// store. A ChainRun must only be advanced by one thread at a time.
class Executor {
public:
    Executor(RunStore& store, std::shared_ptr<ImageModel> image, std::string profile, ExecutorOptions options = {});

    /// Validates and persists a new run without executing anything.
    ChainRun create_run(ChainPlan plan, bool step_wise = false);

    /// create_run, then I_1 = generate(P_1). A backend failure leaves the run
    /// paused (transient) or failed with step 1 failed; it does not throw.
    ChainRun start_run(ChainPlan plan, bool step_wise = false);

    /// Executes the step after the cursor: I_t = edit(I_{t-1}, P_t). Backend
    /// failures are recorded on the returned record and pause the run.
    /// Throws no_more_steps, prior_step_failed, or run_not_paused when the
    /// run is neither running nor paused.
    StepRecord advance(ChainRun& run);

    /// Advances until completed, failed, or `stop` is set. Step-wise runs stop
    /// after one step.
    void run_to_completion(ChainRun& run, const std::atomic<bool>* stop = nullptr);

    /// Any non-paused run becomes paused (so completed runs can be edited).
    void pause(ChainRun& run);

    /// Clears a failed step so it is retried, and marks the run running.
    void resume(ChainRun& run);

    /// Requires a paused or failed run (run_not_paused otherwise). Bounds:
    /// edit/delete/rerun 1..n, insert 1..n+1 (index_out_of_range). The
    /// resulting plan must validate (PlanInvalid). Insert/delete at or before
    /// the cursor and rerun_from supersede the affected records so the next
    /// advance resumes from the checkpoint at at_index-1.
    void apply_intervention(ChainRun& run, Intervention iv);

    RunStore& store() { return store_; }
    const std::string& profile() const { return profile_; }
    Timestamp now() const { return options_.clock(); }

private:
    StepRecord execute(ChainRun& run, int index);
    void emit(const ChainRun& run, std::size_t seq);

    RunStore& store_;
    std::shared_ptr<ImageModel> image_;
    std::string profile_;
    ExecutorOptions options_;
};

/// Pure plan edit for one intervention (no rewinding, no validation).
ChainPlan apply_to_plan(const ChainPlan& plan, const Intervention& iv);

/// Replays a run's intervention log over its original plan.
ChainPlan replay_interventions(const ChainPlan& original, const std::vector<Intervention>& log);

/// Artifacts I_1..I_k of the current chain (k = cursor), loaded from the store.
std::vector<ImageArtifact> chain_artifacts(const ChainRun& run, const RunStore& store);

struct LockViolation {
    int step_index = 0;
    std::string entity_id;
    std::string message;
};

/// Compositional-lock audit over the current chain: once the last
/// non-correction step naming an entity has run, that entity must stay
/// field-identical in every later state unless a correction step names it.
/// Only meaningful for scene-document runs.
std::vector<LockViolation> audit_locks(const ChainRun& run, const RunStore& store);

/// Every state after the first was produced from the one before it.
bool state_chain_intact(const ChainRun& run);

}  // namespace coig
