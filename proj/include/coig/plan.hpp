// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coig/backends.hpp"
#include "coig/util.hpp"

namespace coig {

enum class StepKind { foundational_layout, background, entity_detail, interaction, correction };

std::string_view step_kind_name(StepKind k);
StepKind parse_step_kind(std::string_view s);  // throws schema_error

/// One sub-prompt P_t: the full caption as context plus this step's action.
struct PlanStep {
    int index = 1;
    StepKind kind = StepKind::foundational_layout;
    std::string final_goal;
    std::string step_action;
    std::optional<std::string> target_entity;

    bool operator==(const PlanStep&) const = default;
};

struct ChainPlan {
    std::string original_prompt;
    std::vector<PlanStep> steps;
    std::string planner_model;
    Timestamp created_at = 0;

    bool operator==(const ChainPlan&) const = default;
};

json to_json(const PlanStep& s);
json to_json(const ChainPlan& p);
PlanStep plan_step_from_json(const json& j);
ChainPlan plan_from_json(const json& j);  // throws schema_error

/// Canonical plan document, also the on-disk plan file.
std::string serialize_plan(const ChainPlan& p);
ChainPlan parse_plan(std::string_view text);

/// The plan wrapped in a ```coig-plan fenced block, as planners emit it.
std::string plan_block(const ChainPlan& p);

/// Extracts the first plan block from a planner reply, ignoring prose around
/// it. Fences tagged coig-plan, json, or untagged are tried in order; with no
/// fence at all the outermost {...} span is tried. When more than one block
/// parses, the first wins and a warning is appended to `warnings`.
/// Throws Errc::planner_output_error when nothing parses.
ChainPlan parse_planner_output(std::string_view text, std::vector<std::string>* warnings = nullptr);

enum class Rule { missing_foundation, multi_entity_step, missing_final_goal, destructive_edit, malformed };

std::string_view rule_name(Rule r);

struct PlanViolation {
    int step_index = 0;
    Rule rule = Rule::malformed;
    std::string message;

    bool operator==(const PlanViolation&) const = default;
};

json to_json(const PlanViolation& v);

inline constexpr std::size_t kDefaultMaxSteps = 16;

/// Checks the four decomposition rules plus structural sanity. Pure.
///   missing_foundation  step 1 is not a layout or background step
///   multi_entity_step   a detail/interaction step lacks a target or names
///                       more than one entity
///   destructive_edit    a non-correction step re-details, re-adds or
///                       deletes an entity that an earlier step detailed
///   missing_final_goal  a step's final_goal differs from the caption
///   malformed           empty plan, non-contiguous indices, empty action,
///                       too many steps
std::vector<PlanViolation> validate_plan(const ChainPlan& plan, std::size_t max_steps = kDefaultMaxSteps);

/// Ids a plan refers to: every target_entity plus ids introduced by
/// "Add placeholder <id>:" sentences.
std::vector<std::string> plan_entity_ids(const ChainPlan& plan);

struct DecomposeOptions {
    std::size_t max_steps = kDefaultMaxSteps;
    Clock clock = system_clock();
};

/// Asks the text model for a plan. One reformat retry is made when the first
/// reply does not parse. Throws planner_output_error; backend errors pass
/// through.
ChainPlan decompose(const std::string& prompt, TextModel& model, const DecomposeOptions& options = {});

/// Dual-context prompt sent to the image model for a step.
std::string render_prompt(const PlanStep& step);

}  // namespace coig
