// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#include "coig/run.hpp"

#include <utility>

#include "coig/error.hpp"

namespace coig {

std::string_view step_status_name(StepStatus s) {
    switch (s) {
        case StepStatus::pending: return "pending";
        case StepStatus::succeeded: return "succeeded";
        case StepStatus::failed: return "failed";
        case StepStatus::superseded: return "superseded";
    }
    return "pending";
}

StepStatus parse_step_status(std::string_view s) {
    for (auto v : {StepStatus::pending, StepStatus::succeeded, StepStatus::failed, StepStatus::superseded}) {
        if (s == step_status_name(v)) return v;
    }
    throw Error(Errc::schema_error, "unknown step status '" + std::string(s) + "'");
}

std::string_view run_status_name(RunStatus s) {
    switch (s) {
        case RunStatus::running: return "running";
        case RunStatus::paused: return "paused";
        case RunStatus::completed: return "completed";
        case RunStatus::failed: return "failed";
    }
    return "paused";
}

RunStatus parse_run_status(std::string_view s) {
    for (auto v : {RunStatus::running, RunStatus::paused, RunStatus::completed, RunStatus::failed}) {
        if (s == run_status_name(v)) return v;
    }
    throw Error(Errc::schema_error, "unknown run status '" + std::string(s) + "'");
}

std::string_view intervention_kind_name(InterventionKind k) {
    switch (k) {
        case InterventionKind::edit_step: return "edit_step";
        case InterventionKind::insert_step: return "insert_step";
        case InterventionKind::delete_step: return "delete_step";
        case InterventionKind::rerun_from: return "rerun_from";
    }
    return "rerun_from";
}

InterventionKind parse_intervention_kind(std::string_view s) {
    for (auto v : {InterventionKind::edit_step, InterventionKind::insert_step, InterventionKind::delete_step,
                   InterventionKind::rerun_from}) {
        if (s == intervention_kind_name(v)) return v;
    }
    throw Error(Errc::schema_error, "unknown intervention kind '" + std::string(s) + "'");
}

std::string_view author_name(Author a) { return a == Author::human ? "human" : "auto_monitor"; }

Author parse_author(std::string_view s) {
    if (s == "human") return Author::human;
    if (s == "auto_monitor") return Author::auto_monitor;
    throw Error(Errc::schema_error, "unknown author '" + std::string(s) + "'");
}

const StepRecord* ChainRun::current(int index) const {
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        if (it->index == index && it->status != StepStatus::superseded) return &*it;
    }
    return nullptr;
}

StepRecord* ChainRun::current(int index) {
    return const_cast<StepRecord*>(std::as_const(*this).current(index));
}

int ChainRun::cursor() const {
    int k = 0;
    while (k < static_cast<int>(plan.steps.size())) {
        const auto* r = current(k + 1);
        if (!r || r->status != StepStatus::succeeded) break;
        ++k;
    }
    return k;
}

bool ChainRun::has_failed_tail() const {
    const auto* r = current(cursor() + 1);
    return r && r->status == StepStatus::failed;
}

json to_json(const StepRecord& r) {
    json j = {{"index", r.index},
              {"prompt_used", to_json(r.prompt_used)},
              {"started_at", r.started_at},
              {"finished_at", r.finished_at},
              {"status", std::string(step_status_name(r.status))}};
    if (r.image) j["image"] = to_json(*r.image);
    if (r.parent) j["parent"] = *r.parent;
    if (r.error) j["error"] = *r.error;
    return j;
}

json to_json(const Intervention& iv) {
    json j = {{"kind", std::string(intervention_kind_name(iv.kind))},
              {"at_index", iv.at_index},
              {"author", std::string(author_name(iv.author))},
              {"applied_at", iv.applied_at}};
    if (iv.payload) j["payload"] = to_json(*iv.payload);
    return j;
}

json to_json(const ChainRun& run) {
    json steps = json::array();
    for (const auto& r : run.steps) steps.push_back(to_json(r));
    json ivs = json::array();
    for (const auto& iv : run.interventions) ivs.push_back(to_json(iv));
    return {{"run_id", run.run_id},
            {"plan", to_json(run.plan)},
            {"original_plan", to_json(run.original_plan)},
            {"steps", std::move(steps)},
            {"interventions", std::move(ivs)},
            {"status", std::string(run_status_name(run.status))},
            {"backend_profile", run.backend_profile},
            {"created_at", run.created_at},
            {"step_wise", run.step_wise}};
}

StepRecord step_record_from_json(const json& j) {
    try {
        StepRecord r;
        r.index = j.at("index").get<int>();
        r.prompt_used = plan_step_from_json(j.at("prompt_used"));
        if (j.contains("image")) r.image = artifact_ref_from_json(j.at("image"));
        if (j.contains("parent")) r.parent = j.at("parent").get<std::string>();
        if (j.contains("error")) r.error = j.at("error").get<std::string>();
        r.started_at = j.at("started_at").get<Timestamp>();
        r.finished_at = j.at("finished_at").get<Timestamp>();
        r.status = parse_step_status(j.at("status").get<std::string>());
        return r;
    } catch (const json::exception& ex) {
        throw Error(Errc::schema_error, std::string("step record: ") + ex.what());
    }
}

Intervention intervention_from_json(const json& j) {
    try {
        Intervention iv;
        iv.kind = parse_intervention_kind(j.at("kind").get<std::string>());
        iv.at_index = j.at("at_index").get<int>();
        if (j.contains("payload") && !j.at("payload").is_null()) iv.payload = plan_step_from_json(j.at("payload"));
        iv.author = parse_author(j.value("author", std::string("human")));
        iv.applied_at = j.value("applied_at", Timestamp{0});
        return iv;
    } catch (const json::exception& ex) {
        throw Error(Errc::schema_error, std::string("intervention: ") + ex.what());
    }
}

ChainRun run_from_json(const json& j) {
    try {
        ChainRun run;
        run.run_id = j.at("run_id").get<std::string>();
        run.plan = plan_from_json(j.at("plan"));
        run.original_plan = plan_from_json(j.at("original_plan"));
        for (const auto& r : j.at("steps")) run.steps.push_back(step_record_from_json(r));
        for (const auto& iv : j.at("interventions")) run.interventions.push_back(intervention_from_json(iv));
        run.status = parse_run_status(j.at("status").get<std::string>());
        run.backend_profile = j.at("backend_profile").get<std::string>();
        run.created_at = j.at("created_at").get<Timestamp>();
        run.step_wise = j.at("step_wise").get<bool>();
        return run;
    } catch (const json::exception& ex) {
        throw Error(Errc::schema_error, std::string("run manifest: ") + ex.what());
    }
}

std::string serialize_run(const ChainRun& run) { return canonical_dump(to_json(run)); }

ChainRun parse_run(std::string_view text) {
    try {
        return run_from_json(json::parse(text));
    } catch (const json::exception& ex) {
        throw Error(Errc::schema_error, std::string("run manifest: ") + ex.what());
    }
}

json to_json(const StepEvent& e) {
    return {{"run_id", e.run_id},
            {"seq", e.seq},
            {"step_index", e.step_index},
            {"status", std::string(step_status_name(e.status))},
            {"artifact_id", e.artifact_id ? json(*e.artifact_id) : json(nullptr)},
            {"timestamp", e.timestamp}};
}

StepEvent step_event_from_json(const json& j) {
    StepEvent e;
    e.run_id = j.at("run_id").get<std::string>();
    e.seq = j.at("seq").get<std::size_t>();
    e.step_index = j.at("step_index").get<int>();
    e.status = parse_step_status(j.at("status").get<std::string>());
    if (!j.at("artifact_id").is_null()) e.artifact_id = j.at("artifact_id").get<std::string>();
    e.timestamp = j.at("timestamp").get<Timestamp>();
    return e;
}

std::vector<StepEvent> events_of(const ChainRun& run) {
    std::vector<StepEvent> out;
    for (std::size_t i = 0; i < run.steps.size(); ++i) {
        const auto& r = run.steps[i];
        if (r.status == StepStatus::pending) continue;
        StepEvent e;
        e.run_id = run.run_id;
        e.seq = i;
        e.step_index = r.index;
        e.status = r.status;
        if (r.image) e.artifact_id = r.image->id;
        e.timestamp = r.finished_at;
        out.push_back(std::move(e));
    }
    return out;
}

json to_json(const RunSummary& s) {
    return {{"run_id", s.run_id},
            {"status", std::string(run_status_name(s.status))},
            {"created_at", s.created_at},
            {"original_prompt", s.original_prompt},
            {"backend_profile", s.backend_profile},
            {"step_count", s.step_count}};
}

}  // namespace coig
