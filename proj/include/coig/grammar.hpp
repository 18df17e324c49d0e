// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

// The constrained action language understood by the mock image model:
//
//   Add placeholder <id>: <class> at <position>
//   Detail <id>[ (<class>)][: <key>=<value>{, <key>=<value>}]
//   Interact <id>: <verb> [<target_id>]
//   Delete <id>
//   Fill background: <text>
//
// Actions are separated by newlines or sentence periods. Entity ids are
// [A-Za-z0-9_-]+ and contain at least one digit ("e1", "truck2"), which is
// what lets an Interact target be told apart from the verb's last word.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "coig/scene.hpp"

namespace coig::grammar {

struct AddPlaceholder {
    std::string id;
    std::string cls;
    Position position = Position::center;
};

enum class DetailKey { color, shape, texture, attribute };

std::string_view detail_key_name(DetailKey k);

struct Detail {
    std::string id;
    std::optional<std::string> cls;  // informational "(apple)" annotation
    std::vector<std::pair<DetailKey, std::string>> fields;
};

struct Interact {
    std::string id;
    std::string verb;
    std::optional<std::string> target;
};

struct Delete {
    std::string id;
};

struct FillBackground {
    std::string text;
};

using Action = std::variant<AddPlaceholder, Detail, Interact, Delete, FillBackground>;

bool is_entity_id(std::string_view token);

/// Strips dual-context framing: when the prompt carries a
/// "This Step's Action:" line only that part is returned, and any
/// "Final Goal:" line is dropped.
std::string action_text(std::string_view prompt);

/// Parses every action in the prompt. Throws Errc::grammar_error on any
/// unparseable sentence or when the prompt holds no action at all.
std::vector<Action> parse(std::string_view prompt);

/// Id the action is about (empty for Fill background).
std::string subject_of(const Action& a);

std::string format(const Action& a);
std::string format(const std::vector<Action>& actions);

/// Applies actions in order. Targets must exist (unknown_entity); an
/// action that would change a locked entity it does not name fails with
/// locked_entity_mutation. The input scene is not modified on error.
SceneDocument apply(const SceneDocument& scene, const std::vector<Action>& actions);

}  // namespace coig::grammar
