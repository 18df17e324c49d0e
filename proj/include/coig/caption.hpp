// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

// Deterministic caption understanding for the mock planner. It covers
// simple noun-phrase captions ("a red apple and a blue bowl on a table",
// "a red apple left of a blue bowl") and the entity-collapse benchmark
// template. Live planners do not use it.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coig/grammar.hpp"
#include "coig/plan.hpp"

namespace coig::caption {

struct Entity {
    std::string cls;
    std::optional<std::string> color;
    std::optional<std::string> shape;
    std::optional<std::string> texture;
    std::vector<std::string> attributes;
    Position position = Position::center;
};

struct EntityInteraction {
    std::size_t subject = 0;
    std::string verb;
    std::size_t object = 0;
};

struct Caption {
    std::vector<Entity> entities;
    std::vector<EntityInteraction> interactions;
    std::optional<std::string> background;
};

std::string pluralize(std::string_view noun);
std::string singularize(std::string_view noun);

bool is_color_word(std::string_view w);
bool is_shape_word(std::string_view w);
bool is_texture_word(std::string_view w);

/// The colors the mock vocabulary knows, excluding gray.
const std::vector<std::string>& color_vocabulary();

/// nullopt when the caption is outside the supported forms.
std::optional<Caption> parse(std::string_view prompt);

/// Layout, one detail step per entity, one step per interaction, then the
/// background.
ChainPlan template_plan(std::string_view prompt, const Caption& c);

/// Every action of the template plan in one go (single-pass rendering).
std::vector<grammar::Action> actions(const Caption& c);

/// Mock planner reply: prose around a plan block, or a refusal sentence when
/// the caption is not understood.
std::string template_planner_reply(std::string_view prompt);

/// Interpreter hook for the mock image model.
std::optional<std::vector<grammar::Action>> interpret(std::string_view prompt);

}  // namespace coig::caption
