// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#include "coig/plan.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "coig/assets.hpp"
#include "coig/error.hpp"
#include "coig/grammar.hpp"

namespace coig {

std::string_view step_kind_name(StepKind k) {
    switch (k) {
        case StepKind::foundational_layout: return "foundational_layout";
        case StepKind::background: return "background";
        case StepKind::entity_detail: return "entity_detail";
        case StepKind::interaction: return "interaction";
        case StepKind::correction: return "correction";
    }
    return "correction";
}

StepKind parse_step_kind(std::string_view s) {
    for (auto k : {StepKind::foundational_layout, StepKind::background, StepKind::entity_detail,
                   StepKind::interaction, StepKind::correction}) {
        if (s == step_kind_name(k)) return k;
    }
    throw Error(Errc::schema_error, "unknown step kind '" + std::string(s) + "'");
}

json to_json(const PlanStep& s) {
    json j = {{"index", s.index},
              {"kind", std::string(step_kind_name(s.kind))},
              {"final_goal", s.final_goal},
              {"step_action", s.step_action}};
    if (s.target_entity) j["target_entity"] = *s.target_entity;
    return j;
}

json to_json(const ChainPlan& p) {
    json steps = json::array();
    for (const auto& s : p.steps) steps.push_back(to_json(s));
    return {{"original_prompt", p.original_prompt},
            {"planner_model", p.planner_model},
            {"created_at", p.created_at},
            {"steps", std::move(steps)}};
}

PlanStep plan_step_from_json(const json& j) {
    try {
        PlanStep s;
        s.index = j.at("index").get<int>();
        s.kind = parse_step_kind(j.at("kind").get<std::string>());
        s.final_goal = j.at("final_goal").get<std::string>();
        s.step_action = j.at("step_action").get<std::string>();
        if (j.contains("target_entity") && !j.at("target_entity").is_null()) {
            s.target_entity = j.at("target_entity").get<std::string>();
        }
        return s;
    } catch (const json::exception& ex) {
        throw Error(Errc::schema_error, std::string("plan step: ") + ex.what());
    }
}

ChainPlan plan_from_json(const json& j) {
    try {
        ChainPlan p;
        p.original_prompt = j.at("original_prompt").get<std::string>();
        p.planner_model = j.value("planner_model", "");
        p.created_at = j.value("created_at", Timestamp{0});
        if (!j.at("steps").is_array()) throw Error(Errc::schema_error, "steps must be an array");
        for (const auto& s : j.at("steps")) p.steps.push_back(plan_step_from_json(s));
        return p;
    } catch (const json::exception& ex) {
        throw Error(Errc::schema_error, std::string("plan: ") + ex.what());
    }
}

std::string serialize_plan(const ChainPlan& p) { return canonical_dump(to_json(p)); }

ChainPlan parse_plan(std::string_view text) {
    try {
        return plan_from_json(json::parse(text));
    } catch (const json::exception& ex) {
        throw Error(Errc::schema_error, std::string("plan document: ") + ex.what());
    }
}

std::string plan_block(const ChainPlan& p) { return "```coig-plan\n" + serialize_plan(p) + "\n```"; }

namespace {

struct Fence {
    std::string tag;
    std::string body;
};

std::vector<Fence> fenced_blocks(std::string_view text) {
    std::vector<Fence> out;
    std::size_t pos = 0;
    while ((pos = text.find("```", pos)) != std::string_view::npos) {
        const auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) break;
        const auto close = text.find("```", nl);
        if (close == std::string_view::npos) break;
        out.push_back({text::lower(text::trim(text.substr(pos + 3, nl - pos - 3))),
                       std::string(text.substr(nl + 1, close - nl - 1))});
        pos = close + 3;
    }
    return out;
}

std::optional<ChainPlan> try_plan(std::string_view body) {
    try {
        auto p = parse_plan(body);
        if (p.steps.empty()) return std::nullopt;
        return p;
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::vector<std::string> action_sentences(std::string_view action) {
    std::vector<std::string> out;
    std::string cur;
    for (std::size_t i = 0; i < action.size(); ++i) {
        const char c = action[i];
        if (c == '\n' || (c == '.' && (i + 1 == action.size() || std::isspace(static_cast<unsigned char>(action[i + 1]))))) {
            if (auto t = text::trim(cur); !t.empty()) out.push_back(t);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (auto t = text::trim(cur); !t.empty()) out.push_back(t);
    return out;
}

std::vector<std::string> id_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
            cur.push_back(c);
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

// Lenient read of "<Verb> <id>..." sentences; live plans may hold free text.
std::optional<std::string> sentence_subject(const std::string& sentence, std::string_view verb) {
    if (!text::starts_with_ci(sentence, verb)) return std::nullopt;
    const auto rest = std::string_view(sentence).substr(verb.size());
    const auto toks = id_tokens(rest);
    if (toks.empty() || !grammar::is_entity_id(toks.front())) return std::nullopt;
    return toks.front();
}

}  // namespace

ChainPlan parse_planner_output(std::string_view text, std::vector<std::string>* warnings) {
    std::vector<ChainPlan> found;
    for (const auto& f : fenced_blocks(text)) {
        if (!f.tag.empty() && f.tag != "coig-plan" && f.tag != "json") continue;
        if (auto p = try_plan(f.body)) found.push_back(std::move(*p));
    }
    if (found.empty()) {
        const auto open = text.find('{');
        const auto close = text.rfind('}');
        if (open != std::string_view::npos && close != std::string_view::npos && close > open) {
            if (auto p = try_plan(text.substr(open, close - open + 1))) found.push_back(std::move(*p));
        }
    }
    if (found.empty()) throw Error(Errc::planner_output_error, "no valid plan block in planner reply");
    if (found.size() > 1 && warnings) {
        warnings->push_back("planner reply held " + std::to_string(found.size()) + " plan blocks; using the first");
    }
    return std::move(found.front());
}

std::string_view rule_name(Rule r) {
    switch (r) {
        case Rule::missing_foundation: return "missing_foundation";
        case Rule::multi_entity_step: return "multi_entity_step";
        case Rule::missing_final_goal: return "missing_final_goal";
        case Rule::destructive_edit: return "destructive_edit";
        case Rule::malformed: return "malformed";
    }
    return "malformed";
}

json to_json(const PlanViolation& v) {
    return {{"step_index", v.step_index}, {"rule", std::string(rule_name(v.rule))}, {"message", v.message}};
}

std::vector<std::string> plan_entity_ids(const ChainPlan& plan) {
    std::vector<std::string> ids;
    auto add = [&](const std::string& id) {
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
    };
    for (const auto& s : plan.steps) {
        if (s.target_entity) add(*s.target_entity);
        for (const auto& sentence : action_sentences(s.step_action)) {
            if (auto id = sentence_subject(sentence, "add placeholder ")) add(*id);
        }
    }
    return ids;
}

std::vector<PlanViolation> validate_plan(const ChainPlan& plan, std::size_t max_steps) {
    std::vector<PlanViolation> out;
    auto flag = [&](int index, Rule r, std::string msg) { out.push_back({index, r, std::move(msg)}); };

    if (plan.steps.empty()) {
        flag(0, Rule::malformed, "plan has no steps");
        return out;
    }
    if (plan.steps.size() > max_steps) {
        flag(0, Rule::malformed, "plan has " + std::to_string(plan.steps.size()) + " steps, cap is " +
                                     std::to_string(max_steps));
    }
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        if (plan.steps[i].index != static_cast<int>(i + 1)) {
            flag(plan.steps[i].index, Rule::malformed,
                 "index " + std::to_string(plan.steps[i].index) + " at position " + std::to_string(i + 1));
        }
    }

    const auto& first = plan.steps.front();
    if (first.kind != StepKind::foundational_layout && first.kind != StepKind::background) {
        flag(1, Rule::missing_foundation,
             "step 1 is " + std::string(step_kind_name(first.kind)) + ", expected a layout or background step");
    }

    const auto known = plan_entity_ids(plan);
    std::set<std::string> finalized;
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        const auto& s = plan.steps[i];
        const int t = static_cast<int>(i + 1);

        if (text::trim(s.step_action).empty()) flag(t, Rule::malformed, "empty step_action");
        if (s.final_goal.empty() || s.final_goal != plan.original_prompt) {
            flag(t, Rule::missing_final_goal, "final_goal does not repeat the original caption");
        }

        const auto sentences = action_sentences(s.step_action);
        if (s.kind == StepKind::entity_detail || s.kind == StepKind::interaction) {
            if (!s.target_entity) {
                flag(t, Rule::multi_entity_step, "step names no target_entity");
            } else {
                std::set<std::string> others;
                for (const auto& tok : id_tokens(s.step_action)) {
                    if (tok != *s.target_entity && std::find(known.begin(), known.end(), tok) != known.end()) {
                        others.insert(tok);
                    }
                }
                // An interaction names its subject and at most one object.
                const std::size_t allowed = s.kind == StepKind::interaction ? 1 : 0;
                if (others.size() > allowed) {
                    flag(t, Rule::multi_entity_step, "step addresses more than one entity");
                }
            }
        }

        std::set<std::string> touched;
        for (const auto& sentence : sentences) {
            for (auto verb : {"detail ", "delete ", "add placeholder "}) {
                if (auto id = sentence_subject(sentence, verb)) touched.insert(*id);
            }
        }
        if (s.kind == StepKind::entity_detail && s.target_entity) touched.insert(*s.target_entity);
        if (s.kind != StepKind::correction) {
            for (const auto& id : touched) {
                if (finalized.contains(id)) {
                    flag(t, Rule::destructive_edit, "step alters " + id + ", which an earlier step finalized");
                    break;
                }
            }
        }
        for (const auto& sentence : sentences) {
            if (auto id = sentence_subject(sentence, "detail ")) finalized.insert(*id);
        }
        if (s.kind == StepKind::entity_detail && s.target_entity) finalized.insert(*s.target_entity);
    }
    return out;
}

ChainPlan decompose(const std::string& prompt, TextModel& model, const DecomposeOptions& options) {
    if (text::trim(prompt).empty()) throw Error(Errc::precondition_violated, "decompose requires a prompt");
    const std::string system(assets::csp_system_prompt());
    ChainPlan plan;
    try {
        plan = parse_planner_output(model.complete(system, prompt));
    } catch (const Error& e) {
        if (e.code() != Errc::planner_output_error) throw;
        const std::string reminder = prompt +
                                     "\n\nYour previous reply could not be read. Reply with exactly one ```coig-plan "
                                     "fenced block containing the JSON plan and nothing else.";
        plan = parse_planner_output(model.complete(system, reminder));
    }
    if (plan.steps.size() > options.max_steps) {
        throw Error(Errc::planner_output_error, "planner produced " + std::to_string(plan.steps.size()) +
                                                    " steps, cap is " + std::to_string(options.max_steps));
    }
    plan.original_prompt = prompt;
    plan.planner_model = model.name();
    plan.created_at = options.clock();
    return plan;
}

std::string render_prompt(const PlanStep& step) {
    return "Final Goal: " + step.final_goal + "\nThis Step's Action: " + step.step_action;
}

}  // namespace coig
