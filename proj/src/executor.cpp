// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#include "coig/executor.hpp"

#include <set>

#include "coig/grammar.hpp"

namespace coig {

namespace {

std::string describe(const std::vector<PlanViolation>& vs) {
    std::string s;
    for (const auto& v : vs) {
        if (!s.empty()) s += "; ";
        s += std::string(rule_name(v.rule)) + "@" + std::to_string(v.step_index) + ": " + v.message;
    }
    return s;
}

std::set<std::string> step_subjects(const PlanStep& step) {
    std::set<std::string> ids;
    try {
        for (const auto& a : grammar::parse(step.step_action)) {
            if (auto id = grammar::subject_of(a); !id.empty()) ids.insert(std::move(id));
        }
    } catch (const Error&) {
        // free-text actions name no ids we can audit
    }
    if (step.target_entity) ids.insert(*step.target_entity);
    return ids;
}

}  // namespace

PlanInvalid::PlanInvalid(std::vector<PlanViolation> violations)
    : Error(Errc::plan_invalid, describe(violations)), violations_(std::move(violations)) {}

Executor::Executor(RunStore& store, std::shared_ptr<ImageModel> image, std::string profile, ExecutorOptions options)
    : store_(store), image_(std::move(image)), profile_(std::move(profile)), options_(std::move(options)) {}

ChainRun Executor::create_run(ChainPlan plan, bool step_wise) {
    if (auto vs = validate_plan(plan, options_.max_steps); !vs.empty()) throw PlanInvalid(std::move(vs));
    ChainRun run;
    run.run_id = random_id();
    run.created_at = options_.clock();
    if (plan.created_at == 0) plan.created_at = run.created_at;
    run.plan = plan;
    run.original_plan = std::move(plan);
    run.status = RunStatus::paused;
    run.backend_profile = profile_;
    run.step_wise = step_wise;
    store_.save_run(run);
    return run;
}

ChainRun Executor::start_run(ChainPlan plan, bool step_wise) {
    auto run = create_run(std::move(plan), step_wise);
    run.status = RunStatus::running;
    advance(run);
    if (run.status == RunStatus::running && step_wise) {
        run.status = RunStatus::paused;
        store_.save_run(run);
    }
    return run;
}

StepRecord Executor::execute(ChainRun& run, int index) {
    StepRecord rec;
    rec.index = index;
    rec.prompt_used = run.plan.steps.at(static_cast<std::size_t>(index - 1));
    rec.started_at = options_.clock();
    try {
        const auto prompt = render_prompt(rec.prompt_used);
        ImageArtifact out;
        if (index == 1) {
            out = image_->generate(prompt);
        } else {
            const auto* prev = run.current(index - 1);
            const auto parent = store_.load_artifact(*prev->image);
            rec.parent = parent.id;
            out = image_->edit(parent, prompt);
        }
        rec.image = store_.put_artifact(out);
        rec.status = StepStatus::succeeded;
    } catch (const Error& e) {
        rec.status = StepStatus::failed;
        rec.error = e.what();
        run.status = e.transient() ? RunStatus::paused : RunStatus::failed;
    } catch (const std::exception& e) {
        rec.status = StepStatus::failed;
        rec.error = e.what();
        run.status = RunStatus::paused;
    }
    rec.finished_at = options_.clock();
    run.steps.push_back(rec);
    return rec;
}

void Executor::emit(const ChainRun& run, std::size_t seq) {
    if (!options_.on_event) return;
    const auto& r = run.steps.at(seq);
    StepEvent e;
    e.run_id = run.run_id;
    e.seq = seq;
    e.step_index = r.index;
    e.status = r.status;
    if (r.image) e.artifact_id = r.image->id;
    e.timestamp = r.finished_at;
    options_.on_event(e);
}

StepRecord Executor::advance(ChainRun& run) {
    if (run.has_failed_tail()) {
        throw Error(Errc::prior_step_failed, "step " + std::to_string(run.cursor() + 1) + " failed; resume or intervene");
    }
    const int n = static_cast<int>(run.plan.steps.size());
    const int t = run.cursor() + 1;
    if (t > n) throw Error(Errc::no_more_steps, "all " + std::to_string(n) + " steps are done");
    if (run.status != RunStatus::running && run.status != RunStatus::paused) {
        throw Error(Errc::run_not_paused, "run is " + std::string(run_status_name(run.status)));
    }
    auto rec = execute(run, t);
    if (rec.status == StepStatus::succeeded && t == n) run.status = RunStatus::completed;
    store_.save_run(run);
    emit(run, run.steps.size() - 1);
    return rec;
}

void Executor::run_to_completion(ChainRun& run, const std::atomic<bool>* stop) {
    if (run.has_failed_tail()) {
        throw Error(Errc::prior_step_failed, "step " + std::to_string(run.cursor() + 1) + " failed; resume or intervene");
    }
    const int n = static_cast<int>(run.plan.steps.size());
    if (run.cursor() >= n) {
        if (run.status != RunStatus::completed) {
            run.status = RunStatus::completed;
            store_.save_run(run);
        }
        return;
    }
    run.status = RunStatus::running;
    store_.save_run(run);
    while (run.cursor() < n) {
        if (stop && stop->load()) {
            run.status = RunStatus::paused;
            store_.save_run(run);
            return;
        }
        const auto rec = advance(run);
        if (rec.status != StepStatus::succeeded) return;
        if (run.step_wise && run.status != RunStatus::completed) {
            run.status = RunStatus::paused;
            store_.save_run(run);
            return;
        }
    }
}

void Executor::pause(ChainRun& run) {
    if (run.status == RunStatus::paused) return;
    run.status = RunStatus::paused;
    store_.save_run(run);
}

void Executor::resume(ChainRun& run) {
    if (run.has_failed_tail()) run.current(run.cursor() + 1)->status = StepStatus::superseded;
    run.status = run.cursor() >= static_cast<int>(run.plan.steps.size()) ? RunStatus::completed : RunStatus::running;
    store_.save_run(run);
}

ChainPlan apply_to_plan(const ChainPlan& plan, const Intervention& iv) {
    ChainPlan p = plan;
    auto fill = [&](PlanStep s) {
        if (s.final_goal.empty()) s.final_goal = p.original_prompt;
        return s;
    };
    const auto at = static_cast<std::size_t>(iv.at_index - 1);
    switch (iv.kind) {
        case InterventionKind::edit_step: p.steps.at(at) = fill(*iv.payload); break;
        case InterventionKind::insert_step:
            p.steps.insert(p.steps.begin() + static_cast<std::ptrdiff_t>(at), fill(*iv.payload));
            break;
        case InterventionKind::delete_step: p.steps.erase(p.steps.begin() + static_cast<std::ptrdiff_t>(at)); break;
        case InterventionKind::rerun_from: break;
    }
    for (std::size_t i = 0; i < p.steps.size(); ++i) p.steps[i].index = static_cast<int>(i + 1);
    return p;
}

ChainPlan replay_interventions(const ChainPlan& original, const std::vector<Intervention>& log) {
    ChainPlan p = original;
    for (const auto& iv : log) p = apply_to_plan(p, iv);
    return p;
}

void Executor::apply_intervention(ChainRun& run, Intervention iv) {
    if (run.status != RunStatus::paused && run.status != RunStatus::failed) {
        throw Error(Errc::run_not_paused, "run is " + std::string(run_status_name(run.status)) + "; pause it first");
    }
    const int n = static_cast<int>(run.plan.steps.size());
    const int hi = iv.kind == InterventionKind::insert_step ? n + 1 : n;
    if (iv.at_index < 1 || iv.at_index > hi) {
        throw Error(Errc::index_out_of_range,
                    "at_index " + std::to_string(iv.at_index) + " outside 1.." + std::to_string(hi));
    }
    const bool needs_payload = iv.kind == InterventionKind::edit_step || iv.kind == InterventionKind::insert_step;
    if (needs_payload && !iv.payload) {
        throw Error(Errc::precondition_violated, std::string(intervention_kind_name(iv.kind)) + " needs a payload");
    }
    if (iv.kind == InterventionKind::delete_step && n == 1) {
        throw Error(Errc::index_out_of_range, "cannot delete the only step");
    }
    iv.applied_at = options_.clock();
    auto next = apply_to_plan(run.plan, iv);
    if (auto vs = validate_plan(next, options_.max_steps); !vs.empty()) throw PlanInvalid(std::move(vs));

    switch (iv.kind) {
        case InterventionKind::edit_step:
            if (auto* r = run.current(iv.at_index); r && r->status == StepStatus::failed) {
                r->status = StepStatus::superseded;
            }
            break;
        case InterventionKind::insert_step:
        case InterventionKind::delete_step:
        case InterventionKind::rerun_from:
            for (auto& r : run.steps) {
                if (r.index >= iv.at_index && r.status != StepStatus::superseded) r.status = StepStatus::superseded;
            }
            break;
    }
    run.plan = std::move(next);
    run.interventions.push_back(std::move(iv));
    run.status = RunStatus::paused;
    store_.save_run(run);
}

std::vector<ImageArtifact> chain_artifacts(const ChainRun& run, const RunStore& store) {
    std::vector<ImageArtifact> out;
    for (int t = 1; t <= run.cursor(); ++t) out.push_back(store.load_artifact(*run.current(t)->image));
    return out;
}

std::vector<LockViolation> audit_locks(const ChainRun& run, const RunStore& store) {
    std::vector<SceneDocument> scenes;
    std::vector<const PlanStep*> steps;
    for (int t = 1; t <= run.cursor(); ++t) {
        const auto* r = run.current(t);
        scenes.push_back(store.load_artifact(*r->image).scene());
        steps.push_back(&r->prompt_used);
    }
    std::set<std::string> ids;
    for (const auto& s : scenes) {
        for (const auto& e : s.entities) ids.insert(e.id);
    }

    std::vector<LockViolation> out;
    const int k = static_cast<int>(scenes.size());
    for (const auto& id : ids) {
        int finalized = 0;
        for (int t = 1; t <= k; ++t) {
            const auto* step = steps[static_cast<std::size_t>(t - 1)];
            if (step->kind != StepKind::correction && step_subjects(*step).contains(id)) finalized = t;
        }
        if (finalized == 0) continue;
        std::optional<SceneEntity> ref;
        if (const auto* e = scenes[static_cast<std::size_t>(finalized - 1)].find(id)) ref = *e;
        for (int u = finalized + 1; u <= k; ++u) {
            const auto& scene = scenes[static_cast<std::size_t>(u - 1)];
            const auto* step = steps[static_cast<std::size_t>(u - 1)];
            std::optional<SceneEntity> cur;
            if (const auto* e = scene.find(id)) cur = *e;
            if (step->kind == StepKind::correction && step_subjects(*step).contains(id)) {
                ref = cur;
                continue;
            }
            if (cur != ref) {
                out.push_back({u, id, "entity " + id + " changed at step " + std::to_string(u) +
                                          " after being finalized at step " + std::to_string(finalized)});
                ref = cur;
            }
        }
    }
    return out;
}

bool state_chain_intact(const ChainRun& run) {
    for (int t = 2; t <= run.cursor(); ++t) {
        const auto* prev = run.current(t - 1);
        const auto* cur = run.current(t);
        if (!cur->parent || !prev->image || *cur->parent != prev->image->id) return false;
    }
    return true;
}

}  // namespace coig
