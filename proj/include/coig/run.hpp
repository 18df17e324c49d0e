// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coig/plan.hpp"
#include "coig/scene.hpp"

namespace coig {

enum class StepStatus { pending, succeeded, failed, superseded };
enum class RunStatus { running, paused, completed, failed };

std::string_view step_status_name(StepStatus s);
StepStatus parse_step_status(std::string_view s);
std::string_view run_status_name(RunStatus s);
RunStatus parse_run_status(std::string_view s);

/// One execution of a plan step, producing I_t from I_{t-1}.
struct StepRecord {
    int index = 0;
    PlanStep prompt_used;
    std::optional<ArtifactRef> image;
    std::optional<std::string> parent;  // artifact id of I_{t-1}
    Timestamp started_at = 0;
    Timestamp finished_at = 0;
    StepStatus status = StepStatus::pending;
    std::optional<std::string> error;

    bool operator==(const StepRecord&) const = default;
};

enum class InterventionKind { edit_step, insert_step, delete_step, rerun_from };
enum class Author { human, auto_monitor };

std::string_view intervention_kind_name(InterventionKind k);
InterventionKind parse_intervention_kind(std::string_view s);
std::string_view author_name(Author a);
Author parse_author(std::string_view s);

struct Intervention {
    InterventionKind kind = InterventionKind::rerun_from;
    int at_index = 1;
    std::optional<PlanStep> payload;
    Author author = Author::human;
    Timestamp applied_at = 0;

    bool operator==(const Intervention&) const = default;
};

/// Execution state of a chain. `steps` is append-only: reruns mark older
/// records superseded instead of replacing them.
struct ChainRun {
    std::string run_id;
    ChainPlan plan;           // current, after interventions
    ChainPlan original_plan;  // as submitted
    std::vector<StepRecord> steps;
    std::vector<Intervention> interventions;
    RunStatus status = RunStatus::paused;
    std::string backend_profile;
    Timestamp created_at = 0;
    bool step_wise = false;

    /// Latest non-superseded record for a plan index, if any.
    const StepRecord* current(int index) const;
    StepRecord* current(int index);

    /// Number of leading plan steps whose current record succeeded.
    int cursor() const;

    /// The record right after the cursor failed and has not been cleared.
    bool has_failed_tail() const;

    bool operator==(const ChainRun&) const = default;
};

json to_json(const StepRecord& r);
json to_json(const Intervention& iv);
json to_json(const ChainRun& run);
StepRecord step_record_from_json(const json& j);
Intervention intervention_from_json(const json& j);
ChainRun run_from_json(const json& j);  // throws schema_error

std::string serialize_run(const ChainRun& run);
ChainRun parse_run(std::string_view text);

/// Emitted whenever a step record settles.
struct StepEvent {
    std::string run_id;
    std::size_t seq = 0;  // position of the record in ChainRun::steps
    int step_index = 0;
    StepStatus status = StepStatus::pending;
    std::optional<std::string> artifact_id;
    Timestamp timestamp = 0;

    bool operator==(const StepEvent&) const = default;
};

json to_json(const StepEvent& e);
StepEvent step_event_from_json(const json& j);

/// Events reconstructed from a run's records, in record order.
std::vector<StepEvent> events_of(const ChainRun& run);

struct RunSummary {
    std::string run_id;
    RunStatus status = RunStatus::paused;
    Timestamp created_at = 0;
    std::string original_prompt;
    std::string backend_profile;
    std::size_t step_count = 0;
};

json to_json(const RunSummary& s);

}  // namespace coig
