// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

// Yes/no question templates used for evaluation, e.g.
//
//   Is the apple present? Is it red in color and round in shape?
//   Is the apple red in color?
//   Is the apple 2 in count?
//   Is the apple to the left of the bowl?

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coig/scene.hpp"

namespace coig::qa {

enum class AttributeKind { color, shape, texture, count };

std::string_view attribute_kind_name(AttributeKind k);
std::optional<AttributeKind> parse_attribute_kind(std::string_view s);

struct Condition {
    AttributeKind kind;
    std::string value;
};

/// "Is the <phrase> present?" or "Is the <phrase> <value> in <kind>?". In
/// the second form the class and value are fused in `phrase` and split at
/// answer time against the classes actually present.
struct Subject {
    std::string phrase;
    std::optional<AttributeKind> fused;
    std::vector<Condition> conditions;  // from "Is it ..." follow-ups
};

enum class Relation { left_of, right_of, above, below };

struct RelationClause {
    std::string subject;
    Relation relation;
    std::string object;
};

struct Query {
    std::vector<Subject> subjects;
    std::vector<RelationClause> relations;
};

/// Throws Errc::question_parse_error.
Query parse(std::string_view question);

/// Scene-backed answer: every clause must hold, each subject on a single
/// non-placeholder entity. Attribute values compare case-insensitively.
bool holds(const Query& q, const SceneDocument& scene);

// Template builders.
std::string presence(std::string_view object);
std::string presence_with(std::string_view object, const std::vector<Condition>& conditions);
std::string attribute(std::string_view object, const Condition& c);
std::string relation(std::string_view subject, Relation r, std::string_view object);

std::string_view relation_phrase(Relation r);

}  // namespace coig::qa
