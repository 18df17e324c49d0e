// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#include "coig/qa.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "coig/error.hpp"

namespace coig::qa {

namespace {

[[noreturn]] void fail(std::string_view q, const std::string& why) {
    throw Error(Errc::question_parse_error, why + " in \"" + std::string(q) + "\"");
}

constexpr std::array<std::pair<std::string_view, Relation>, 6> kRelations{{
    {" to the left of the ", Relation::left_of},
    {" to the right of the ", Relation::right_of},
    {" left of the ", Relation::left_of},
    {" right of the ", Relation::right_of},
    {" above the ", Relation::above},
    {" below the ", Relation::below},
}};

std::string normalize_number(std::string_view v) {
    static const std::map<std::string, std::string> kWords{
        {"one", "1"}, {"two", "2"}, {"three", "3"}, {"four", "4"}, {"five", "5"},
        {"six", "6"}, {"seven", "7"}, {"eight", "8"}, {"nine", "9"}, {"ten", "10"}};
    auto l = text::lower(text::trim(v));
    if (auto it = kWords.find(l); it != kWords.end()) return it->second;
    return l;
}

// "red in color and round in shape" -> conditions
std::vector<Condition> parse_conditions(std::string_view q, std::string_view body) {
    std::vector<Condition> out;
    std::string rest(body);
    for (;;) {
        const auto lower = text::lower(rest);
        const auto in = lower.find(" in ");
        if (in == std::string::npos) fail(q, "expected '<value> in <kind>'");
        Condition c;
        c.value = text::trim(std::string_view(rest).substr(0, in));
        auto tail = rest.substr(in + 4);
        const auto and_pos = text::lower(tail).find(" and ");
        const auto kind_text = tail.substr(0, and_pos);
        const auto kind = parse_attribute_kind(kind_text);
        if (!kind) fail(q, "unknown attribute kind '" + text::trim(kind_text) + "'");
        if (c.value.empty()) fail(q, "empty attribute value");
        c.kind = *kind;
        out.push_back(std::move(c));
        if (and_pos == std::string::npos) break;
        rest = tail.substr(and_pos + 5);
    }
    return out;
}

std::optional<std::string> value_of(const SceneEntity& e, AttributeKind k) {
    switch (k) {
        case AttributeKind::color: return e.color;
        case AttributeKind::shape: return e.shape;
        case AttributeKind::texture: return e.texture;
        case AttributeKind::count: return std::nullopt;
    }
    return std::nullopt;
}

std::size_t visible_count(const SceneDocument& s, std::string_view cls) {
    return static_cast<std::size_t>(std::count_if(s.entities.begin(), s.entities.end(), [&](const SceneEntity& e) {
        return !e.placeholder && text::iequals(e.cls, cls);
    }));
}

bool satisfies(const SceneEntity& e, const Condition& c, const SceneDocument& scene) {
    if (c.kind == AttributeKind::count) {
        return std::to_string(visible_count(scene, e.cls)) == normalize_number(c.value);
    }
    const auto v = value_of(e, c.kind);
    return v && text::iequals(*v, text::trim(c.value));
}

bool matches(const SceneEntity& e, const Subject& s, const SceneDocument& scene) {
    if (e.placeholder) return false;
    const auto phrase = text::lower(text::trim(s.phrase));
    if (s.fused) {
        const auto cls = text::lower(e.cls);
        if (phrase.size() <= cls.size() + 1 || phrase.compare(0, cls.size(), cls) != 0 || phrase[cls.size()] != ' ') {
            return false;
        }
        const Condition c{*s.fused, phrase.substr(cls.size() + 1)};
        if (!satisfies(e, c, scene)) return false;
    } else if (phrase != text::lower(e.cls)) {
        return false;
    }
    return std::all_of(s.conditions.begin(), s.conditions.end(),
                       [&](const Condition& c) { return satisfies(e, c, scene); });
}

int column(Position p) {
    switch (p) {
        case Position::left: return 0;
        case Position::right: return 2;
        default: return 1;
    }
}

int row(Position p) {
    switch (p) {
        case Position::top: return 0;
        case Position::bottom: return 2;
        default: return 1;
    }
}

bool related(const SceneEntity& a, Relation r, const SceneEntity& b) {
    switch (r) {
        case Relation::left_of: return column(a.position) < column(b.position);
        case Relation::right_of: return column(a.position) > column(b.position);
        case Relation::above: return row(a.position) < row(b.position);
        case Relation::below: return row(a.position) > row(b.position);
    }
    return false;
}

}  // namespace

std::string_view attribute_kind_name(AttributeKind k) {
    switch (k) {
        case AttributeKind::color: return "color";
        case AttributeKind::shape: return "shape";
        case AttributeKind::texture: return "texture";
        case AttributeKind::count: return "count";
    }
    return "color";
}

std::optional<AttributeKind> parse_attribute_kind(std::string_view s) {
    const auto v = text::lower(text::trim(s));
    if (v == "color" || v == "colour") return AttributeKind::color;
    if (v == "shape") return AttributeKind::shape;
    if (v == "texture") return AttributeKind::texture;
    if (v == "count") return AttributeKind::count;
    return std::nullopt;
}

std::string_view relation_phrase(Relation r) {
    switch (r) {
        case Relation::left_of: return "to the left of";
        case Relation::right_of: return "to the right of";
        case Relation::above: return "above";
        case Relation::below: return "below";
    }
    return "to the left of";
}

Query parse(std::string_view question) {
    Query q;
    std::vector<std::string> clauses;
    std::string cur;
    for (char c : question) {
        if (c == '?') {
            clauses.push_back(text::trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!text::trim(cur).empty()) fail(question, "trailing text without '?'");
    if (clauses.empty()) fail(question, "no question");

    for (const auto& clause : clauses) {
        if (text::starts_with_ci(clause, "is it ")) {
            if (q.subjects.empty()) fail(question, "'it' without a subject");
            auto conds = parse_conditions(question, std::string_view(clause).substr(6));
            auto& dst = q.subjects.back().conditions;
            dst.insert(dst.end(), conds.begin(), conds.end());
            continue;
        }
        if (!text::starts_with_ci(clause, "is the ")) fail(question, "expected 'Is the ...'");
        const std::string body = clause.substr(7);
        const auto lower = text::lower(body);

        if (lower.size() > 8 && lower.ends_with(" present")) {
            q.subjects.push_back({text::trim(std::string_view(body).substr(0, body.size() - 8)), std::nullopt, {}});
            continue;
        }
        bool done = false;
        for (const auto& [phrase, rel] : kRelations) {
            if (const auto at = lower.find(phrase); at != std::string::npos) {
                q.relations.push_back({text::trim(std::string_view(body).substr(0, at)), rel,
                                       text::trim(std::string_view(body).substr(at + phrase.size()))});
                done = true;
                break;
            }
        }
        if (done) continue;
        // "<class> <value> in <kind>[ and <value> in <kind>]"
        const auto in = lower.find(" in ");
        if (in == std::string::npos) fail(question, "unrecognized question form");
        const auto head = text::trim(std::string_view(body).substr(0, in));
        const auto space = head.find(' ');
        if (space == std::string::npos) fail(question, "missing class or value");
        auto conds = parse_conditions(question, body);
        Subject s;
        s.phrase = text::trim(std::string_view(body).substr(0, in));
        s.fused = conds.front().kind;
        s.conditions.assign(conds.begin() + 1, conds.end());
        q.subjects.push_back(std::move(s));
    }
    return q;
}

bool holds(const Query& q, const SceneDocument& scene) {
    for (const auto& s : q.subjects) {
        const bool any = std::any_of(scene.entities.begin(), scene.entities.end(),
                                     [&](const SceneEntity& e) { return matches(e, s, scene); });
        if (!any) return false;
    }
    for (const auto& r : q.relations) {
        bool found = false;
        for (const auto& a : scene.entities) {
            if (a.placeholder || !text::iequals(a.cls, r.subject)) continue;
            for (const auto& b : scene.entities) {
                if (&a == &b || b.placeholder || !text::iequals(b.cls, r.object)) continue;
                if (related(a, r.relation, b)) found = true;
            }
        }
        if (!found) return false;
    }
    return true;
}

std::string presence(std::string_view object) { return "Is the " + std::string(object) + " present?"; }

std::string presence_with(std::string_view object, const std::vector<Condition>& conditions) {
    std::string s = presence(object);
    if (conditions.empty()) return s;
    s += " Is it ";
    for (std::size_t i = 0; i < conditions.size(); ++i) {
        if (i) s += " and ";
        s += conditions[i].value + " in " + std::string(attribute_kind_name(conditions[i].kind));
    }
    return s + "?";
}

std::string attribute(std::string_view object, const Condition& c) {
    return "Is the " + std::string(object) + " " + c.value + " in " + std::string(attribute_kind_name(c.kind)) + "?";
}

std::string relation(std::string_view subject, Relation r, std::string_view object) {
    return "Is the " + std::string(subject) + " " + std::string(relation_phrase(r)) + " the " + std::string(object) +
           "?";
}

}  // namespace coig::qa
