// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#include "coig/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <regex>

#include "coig/error.hpp"
#include "coig/grammar.hpp"
#include "coig/raster.hpp"

namespace coig::eval {

namespace {

std::vector<grammar::Action> actions_of(const PlanStep& step) {
    try {
        return grammar::parse(step.step_action);
    } catch (const Error&) {
        return {};
    }
}

std::map<std::string, std::string> entity_classes(const ChainPlan& plan) {
    std::map<std::string, std::string> classes;
    for (const auto& step : plan.steps) {
        for (const auto& a : actions_of(step)) {
            if (const auto* add = std::get_if<grammar::AddPlaceholder>(&a)) classes[add->id] = add->cls;
            if (const auto* d = std::get_if<grammar::Detail>(&a); d && d->cls) classes[d->id] = *d->cls;
        }
    }
    return classes;
}

std::optional<qa::AttributeKind> kind_of(grammar::DetailKey k) {
    switch (k) {
        case grammar::DetailKey::color: return qa::AttributeKind::color;
        case grammar::DetailKey::shape: return qa::AttributeKind::shape;
        case grammar::DetailKey::texture: return qa::AttributeKind::texture;
        case grammar::DetailKey::attribute: return std::nullopt;
    }
    return std::nullopt;
}

std::optional<grammar::Detail> color_detail(const PlanStep& step) {
    if (step.kind != StepKind::entity_detail) return std::nullopt;
    for (const auto& a : actions_of(step)) {
        if (const auto* d = std::get_if<grammar::Detail>(&a)) {
            for (const auto& [k, v] : d->fields) {
                if (k == grammar::DetailKey::color) return *d;
            }
        }
    }
    return std::nullopt;
}

std::string color_value(const grammar::Detail& d) {
    for (const auto& [k, v] : d.fields) {
        if (k == grammar::DetailKey::color) return v;
    }
    return {};
}

double score(VisionModel& vision, const ImageArtifact& image, const std::string& question) {
    return vision.answer(image, question) == Answer::yes ? 1.0 : 0.0;
}

ImageArtifact sentinel_for(const ImageArtifact& like) {
    if (like.kind == MediaKind::scene_document) return ImageArtifact::from_scene(SceneDocument{});
    return raster::blank(like.width > 0 ? like.width : raster::kDefaultSize,
                         like.height > 0 ? like.height : raster::kDefaultSize);
}

const StepRecord& succeeded_record(const ChainRun& run, int index) {
    const auto* r = run.current(index);
    if (!r || r->status != StepStatus::succeeded || !r->image) {
        throw Error(Errc::missing_artifact,
                    "run " + run.run_id + " has no succeeded state for step " + std::to_string(index));
    }
    return *r;
}

ImageArtifact state(const ChainRun& run, int index, const RunStore& store) {
    return store.load_artifact(*succeeded_record(run, index).image);
}

ImageArtifact final_state(const ChainRun& run, const RunStore& store) {
    const int n = static_cast<int>(run.plan.steps.size());
    if (run.status != RunStatus::completed || run.cursor() != n) {
        throw Error(Errc::missing_artifact, "run " + run.run_id + " is not completed");
    }
    return state(run, n, store);
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

void accumulate(KindAggregate& agg, double before, double after) {
    ++agg.count;
    agg.before += before;
    agg.after += after;
}

void finish(KindAggregate& agg) {
    if (agg.count == 0) return;
    agg.before /= static_cast<double>(agg.count);
    agg.after /= static_cast<double>(agg.count);
}

json to_json(const KindAggregate& a) { return {{"count", a.count}, {"before", a.before}, {"after", a.after}}; }

}  // namespace

std::vector<ReadabilityProbe> build_probes(const ChainPlan& plan) {
    const auto classes = entity_classes(plan);
    std::vector<ReadabilityProbe> out;
    for (const auto& step : plan.steps) {
        if (step.kind != StepKind::entity_detail) continue;
        for (const auto& a : actions_of(step)) {
            const auto* d = std::get_if<grammar::Detail>(&a);
            if (!d) continue;
            const auto cls = d->cls ? *d->cls : (classes.contains(d->id) ? classes.at(d->id) : std::string());
            if (cls.empty()) continue;
            for (const auto& [key, value] : d->fields) {
                const auto kind = kind_of(key);
                if (!kind) continue;
                ReadabilityProbe p;
                p.step_index = step.index;
                p.attribute_kind = *kind;
                p.value = value;
                p.object_class = cls;
                p.target_entity = d->id;
                p.question = qa::presence_with(cls, {{*kind, value}});
                out.push_back(std::move(p));
            }
        }
    }
    return out;
}

ReadabilityReport eval_readability(const ChainRun& run, const std::vector<ReadabilityProbe>& probes,
                                   VisionModel& vision, const RunStore& store) {
    ReadabilityReport report;
    report.run_id = run.run_id;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const auto& p = probes[i];
        const auto after_img = state(run, p.step_index, store);
        ProbeResult r;
        r.probe_id = "p" + std::to_string(i + 1);
        r.probe = p;
        r.flagged = p.step_index == 1;
        const auto before_img = r.flagged ? sentinel_for(after_img) : state(run, p.step_index - 1, store);
        r.before = score(vision, before_img, p.question);
        r.after = score(vision, after_img, p.question);
        const auto kind = std::string(qa::attribute_kind_name(p.attribute_kind));
        accumulate(report.by_kind[kind], r.before, r.after);
        accumulate(report.overall, r.before, r.after);
        report.probes.push_back(std::move(r));
    }
    for (auto& [_, agg] : report.by_kind) finish(agg);
    finish(report.overall);
    return report;
}

json to_json(const ReadabilityReport& r) {
    json probes = json::array();
    for (const auto& p : r.probes) {
        probes.push_back({{"probe_id", p.probe_id},
                          {"step_index", p.probe.step_index},
                          {"attribute_kind", std::string(qa::attribute_kind_name(p.probe.attribute_kind))},
                          {"value", p.probe.value},
                          {"object_class", p.probe.object_class},
                          {"target_entity", p.probe.target_entity},
                          {"question", p.probe.question},
                          {"before", p.before},
                          {"after", p.after},
                          {"flagged", p.flagged}});
    }
    json kinds = json::object();
    for (const auto& [k, agg] : r.by_kind) kinds[k] = to_json(agg);
    return {{"run_id", r.run_id}, {"probes", std::move(probes)}, {"by_kind", std::move(kinds)},
            {"overall", to_json(r.overall)}};
}

std::string to_csv(const ReadabilityReport& r) {
    std::string out = "probe_id,attribute_kind,before,after\n";
    for (const auto& p : r.probes) {
        out += p.probe_id + "," + std::string(qa::attribute_kind_name(p.probe.attribute_kind)) + "," + num(p.before) +
               "," + num(p.after) + "\n";
    }
    return out;
}

std::string_view perturb_field_name(PerturbField) { return "color"; }

json to_json(const PerturbationSpec& s) {
    return {{"step_index", s.step_index},
            {"field", std::string(perturb_field_name(s.field))},
            {"original_value", s.original_value},
            {"perturbed_value", s.perturbed_value}};
}

PerturbationSpec perturbation_from_json(const json& j) {
    try {
        PerturbationSpec s;
        s.step_index = j.at("step_index").get<int>();
        const auto field = j.value("field", std::string("color"));
        if (field != "color") throw Error(Errc::schema_error, "unsupported perturbation field '" + field + "'");
        s.original_value = j.value("original_value", std::string());
        s.perturbed_value = j.at("perturbed_value").get<std::string>();
        return s;
    } catch (const json::exception& ex) {
        throw Error(Errc::schema_error, std::string("perturbation: ") + ex.what());
    }
}

ChainPlan make_perturbation(const ChainPlan& plan, const PerturbationSpec& spec) {
    if (text::iequals(text::trim(spec.perturbed_value), kPlaceholderColor)) {
        throw Error(Errc::gray_forbidden, "gray is reserved for placeholders and cannot be a perturbation target");
    }
    if (text::iequals(text::trim(spec.perturbed_value), text::trim(spec.original_value))) {
        throw Error(Errc::spec_mismatch, "perturbed value equals the original value");
    }
    if (spec.step_index < 1 || spec.step_index > static_cast<int>(plan.steps.size())) {
        throw Error(Errc::field_absent, "plan has no step " + std::to_string(spec.step_index));
    }
    const auto& step = plan.steps[static_cast<std::size_t>(spec.step_index - 1)];
    if (step.kind != StepKind::entity_detail) {
        throw Error(Errc::field_absent, "step " + std::to_string(spec.step_index) + " is a " +
                                            std::string(step_kind_name(step.kind)) + " step, not entity_detail");
    }
    if (spec.original_value.empty() || spec.perturbed_value.empty() ||
        spec.original_value.find_first_of("\\^$.|?*+()[]{}") != std::string::npos) {
        throw Error(Errc::field_absent, "perturbation values must be plain words");
    }
    const std::regex keyed("(color\\s*=\\s*)" + spec.original_value + "\\b", std::regex::icase);
    const std::regex bare("\\b" + spec.original_value + "\\b", std::regex::icase);
    std::string action;
    if (std::regex_search(step.step_action, keyed)) {
        action = std::regex_replace(step.step_action, keyed, "$1" + spec.perturbed_value,
                                    std::regex_constants::format_first_only);
    } else if (std::regex_search(step.step_action, bare)) {
        action = std::regex_replace(step.step_action, bare, spec.perturbed_value,
                                    std::regex_constants::format_first_only);
    } else {
        throw Error(Errc::field_absent,
                    "step " + std::to_string(spec.step_index) + " does not carry color " + spec.original_value);
    }
    ChainPlan out = plan;
    out.steps[static_cast<std::size_t>(spec.step_index - 1)].step_action = std::move(action);
    return out;
}

PerturbationSpec perturbation_at(const ChainPlan& plan, int step_index, std::string perturbed_value) {
    if (step_index < 1 || step_index > static_cast<int>(plan.steps.size())) {
        throw Error(Errc::field_absent, "plan has no step " + std::to_string(step_index));
    }
    const auto d = color_detail(plan.steps[static_cast<std::size_t>(step_index - 1)]);
    if (!d) throw Error(Errc::field_absent, "step " + std::to_string(step_index) + " carries no color");
    return {step_index, PerturbField::color, color_value(*d), std::move(perturbed_value)};
}

PerturbationSpec random_perturbation(const ChainPlan& plan, const std::vector<std::string>& colors,
                                     std::mt19937_64& rng) {
    std::vector<int> candidates;
    for (const auto& step : plan.steps) {
        if (color_detail(step)) candidates.push_back(step.index);
    }
    if (candidates.empty()) throw Error(Errc::field_absent, "plan has no colored entity_detail step");
    const int index = candidates[uniform_index(rng, candidates.size())];
    auto spec = perturbation_at(plan, index, "");
    std::vector<std::string> pool;
    for (const auto& c : colors) {
        if (!text::iequals(c, spec.original_value) && !text::iequals(c, kPlaceholderColor)) pool.push_back(c);
    }
    if (pool.empty()) throw Error(Errc::precondition_violated, "no color left to perturb to");
    spec.perturbed_value = pool[uniform_index(rng, pool.size())];
    return spec;
}

ChainRun perturbed_run(Executor& executor, const ChainRun& orig, const PerturbationSpec& spec) {
    auto plan = make_perturbation(orig.plan, spec);
    const int t = spec.step_index;
    std::vector<StepRecord> prefix;
    for (int i = 1; i < t; ++i) prefix.push_back(succeeded_record(orig, i));

    auto run = executor.create_run(plan, false);
    run.original_plan = orig.plan;
    Intervention iv;
    iv.kind = InterventionKind::edit_step;
    iv.at_index = t;
    iv.payload = plan.steps[static_cast<std::size_t>(t - 1)];
    iv.author = Author::human;
    iv.applied_at = executor.now();
    run.interventions.push_back(std::move(iv));
    run.steps = std::move(prefix);
    executor.store().save_run(run);
    executor.run_to_completion(run);
    return run;
}

CausalCase eval_causal(const ChainRun& orig, const ChainRun& pert, const PerturbationSpec& spec, VisionModel& vision,
                       const RunStore& store) {
    const auto orig_final = final_state(orig, store);
    const auto pert_final = final_state(pert, store);
    const auto expected = make_perturbation(orig.plan, spec);
    const auto t = static_cast<std::size_t>(spec.step_index - 1);
    if (pert.plan.steps.size() != expected.steps.size() || pert.plan.steps[t] != expected.steps[t]) {
        throw Error(Errc::spec_mismatch, "run " + pert.run_id + " does not carry the perturbation at step " +
                                             std::to_string(spec.step_index));
    }
    const auto d = color_detail(expected.steps[t]);
    const auto classes = entity_classes(orig.plan);
    std::string cls;
    if (d && d->cls) cls = *d->cls;
    else if (d && classes.contains(d->id)) cls = classes.at(d->id);
    if (cls.empty()) throw Error(Errc::field_absent, "cannot tell which object step " + std::to_string(t + 1) + " colors");

    CausalCase c;
    c.case_id = pert.run_id;
    c.orig_run_id = orig.run_id;
    c.pert_run_id = pert.run_id;
    c.spec = spec;
    c.question = qa::presence_with(cls, {{qa::AttributeKind::color, spec.perturbed_value}});
    c.u_final = score(vision, orig_final, c.question);
    c.at_step = score(vision, state(pert, spec.step_index, store), c.question);
    c.p_final = score(vision, pert_final, c.question);
    return c;
}

CausalReport aggregate(std::vector<CausalCase> cases) {
    CausalReport r;
    r.cases = std::move(cases);
    for (const auto& c : r.cases) {
        r.score_unperturbed_final += c.u_final;
        r.score_at_step += c.at_step;
        r.score_perturbed_final += c.p_final;
    }
    if (!r.cases.empty()) {
        const auto n = static_cast<double>(r.cases.size());
        r.score_unperturbed_final /= n;
        r.score_at_step /= n;
        r.score_perturbed_final /= n;
    }
    return r;
}

json to_json(const CausalReport& r) {
    json cases = json::array();
    for (const auto& c : r.cases) {
        cases.push_back({{"case_id", c.case_id},
                         {"orig_run_id", c.orig_run_id},
                         {"pert_run_id", c.pert_run_id},
                         {"spec", to_json(c.spec)},
                         {"question", c.question},
                         {"u_final", c.u_final},
                         {"at_step", c.at_step},
                         {"p_final", c.p_final}});
    }
    return {{"cases", std::move(cases)},
            {"score_unperturbed_final", r.score_unperturbed_final},
            {"score_at_step", r.score_at_step},
            {"score_perturbed_final", r.score_perturbed_final}};
}

std::vector<CausalCase> causal_cases_from_json(const json& report) {
    std::vector<CausalCase> out;
    try {
        for (const auto& j : report.at("cases")) {
            CausalCase c;
            c.case_id = j.at("case_id").get<std::string>();
            c.orig_run_id = j.at("orig_run_id").get<std::string>();
            c.pert_run_id = j.at("pert_run_id").get<std::string>();
            c.spec = perturbation_from_json(j.at("spec"));
            c.question = j.at("question").get<std::string>();
            c.u_final = j.at("u_final").get<double>();
            c.at_step = j.at("at_step").get<double>();
            c.p_final = j.at("p_final").get<double>();
            out.push_back(std::move(c));
        }
    } catch (const json::exception& ex) {
        throw Error(Errc::schema_error, std::string("causal report: ") + ex.what());
    }
    return out;
}

std::string to_csv(const CausalReport& r) {
    std::string out = "case_id,u_final,at_step,p_final\n";
    for (const auto& c : r.cases) {
        out += c.case_id + "," + num(c.u_final) + "," + num(c.at_step) + "," + num(c.p_final) + "\n";
    }
    return out;
}

ReadabilityReport readability_workflow(const ChainRun& run, VisionModel& vision, RunStore& store) {
    auto report = eval_readability(run, build_probes(run.plan), vision, store);
    store.save_report(run.run_id, "readability", to_json(report), to_csv(report));
    return report;
}

CausalCase causal_workflow(Executor& executor, const ChainRun& orig, PerturbationSpec spec, VisionModel& vision) {
    if (spec.original_value.empty()) spec = perturbation_at(orig.plan, spec.step_index, spec.perturbed_value);
    make_perturbation(orig.plan, spec);
    const auto pert = perturbed_run(executor, orig, spec);
    return eval_causal(orig, pert, spec, vision, executor.store());
}

CausalReport record_causal_case(RunStore& store, const std::string& run_id, const CausalCase& c) {
    std::vector<CausalCase> cases;
    try {
        cases = causal_cases_from_json(store.load_report(run_id, "causal"));
    } catch (const Error& e) {
        if (e.code() != Errc::not_found) throw;
    }
    cases.push_back(c);
    auto report = aggregate(std::move(cases));
    store.save_report(run_id, "causal", to_json(report), to_csv(report));
    return report;
}

}  // namespace coig::eval
