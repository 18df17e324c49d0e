// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#include "coig/caption.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <regex>

namespace coig::caption {

namespace {

const std::vector<std::string> kColors{"red",   "blue",   "green", "yellow", "orange", "purple", "pink",
                                       "brown", "black",  "white", "cyan",   "magenta", "teal",  "gold",
                                       "silver", "beige", "maroon", "navy"};
const std::vector<std::string> kShapes{"round",      "square",   "triangular", "rectangular", "oval",
                                       "circular",   "cubic",    "spherical",  "cylindrical", "conical",
                                       "hexagonal",  "heart-shaped", "star-shaped", "flat", "tall"};
const std::vector<std::string> kTextures{"glossy", "metallic", "wooden",  "fluffy",  "furry",  "leather",
                                         "plastic", "glass",   "fabric",  "rubber",  "smooth", "rough",
                                         "velvet",  "woolen",  "ceramic", "marble",  "stone",  "matte"};

const std::map<std::string, int> kCounts{{"a", 1},     {"an", 1},    {"one", 1},  {"the", 1},  {"two", 2},
                                         {"three", 3}, {"four", 4},  {"five", 5}, {"six", 6},  {"2", 2},
                                         {"3", 3},     {"4", 4},     {"5", 5},    {"6", 6}};

// Words that never occur inside a plain noun phrase.
const std::vector<std::string> kFunctionWords{"of", "a", "an", "the", "to", "for", "with", "from", "by",
                                              "is", "are", "do", "does", "please", "something", "nothing",
                                              "what", "how", "why", "it", "this", "that"};

bool contains(const std::vector<std::string>& v, std::string_view w) {
    return std::find(v.begin(), v.end(), text::lower(w)) != v.end();
}

bool is_word(std::string_view w) {
    return !w.empty() && std::all_of(w.begin(), w.end(), [](char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '-';
    });
}

Position default_position(std::size_t i, std::size_t n) {
    static constexpr std::array<Position, 2> two{Position::left, Position::right};
    static constexpr std::array<Position, 3> three{Position::left, Position::center, Position::right};
    static constexpr std::array<Position, 5> many{Position::left, Position::right, Position::top, Position::bottom,
                                                  Position::center};
    if (n == 1) return Position::center;
    if (n == 2) return two[i];
    if (n == 3) return three[i];
    return many[i % many.size()];
}

// "a red apple", "two fluffy dogs" -> entities
std::optional<std::vector<Entity>> noun_phrase(std::string_view np) {
    auto words = text::split_ws(np);
    if (words.empty()) return std::nullopt;
    const auto it = kCounts.find(words.front());
    if (it == kCounts.end()) return std::nullopt;
    const int count = it->second;
    const bool plural = count > 1;
    words.erase(words.begin());
    if (words.empty()) return std::nullopt;
    for (const auto& w : words) {
        if (!is_word(w) || contains(kFunctionWords, w)) return std::nullopt;
    }
    Entity e;
    e.cls = plural ? singularize(words.back()) : words.back();
    words.pop_back();
    for (const auto& w : words) {
        if (is_color_word(w) && !e.color) e.color = w;
        else if (is_shape_word(w) && !e.shape) e.shape = w;
        else if (is_texture_word(w) && !e.texture) e.texture = w;
        else e.attributes.push_back(w);
    }
    return std::vector<Entity>(static_cast<std::size_t>(count), e);
}

std::optional<Caption> parse_ec(const std::string& prompt) {
    static const std::regex kEc(
        R"(^four (.+?) are in (?:a|an|the) (.+?)\. the first is (.+?) and (.+?) the second, who is (.+?)\. )"
        R"(the third is (.+?) and (.+?) the fourth, who is (.+?)\.$)",
        std::regex::icase);
    std::smatch m;
    if (!std::regex_match(prompt, m, kEc)) return std::nullopt;
    Caption c;
    const auto cls = singularize(m[1].str());
    const std::array<std::string, 4> attrs{m[3].str(), m[5].str(), m[6].str(), m[8].str()};
    static constexpr std::array<Position, 4> pos{Position::left, Position::right, Position::top, Position::bottom};
    for (std::size_t i = 0; i < 4; ++i) {
        Entity e;
        e.cls = cls;
        e.attributes.push_back(attrs[i]);
        e.position = pos[i];
        c.entities.push_back(std::move(e));
    }
    c.interactions.push_back({0, m[4].str(), 1});
    c.interactions.push_back({2, m[7].str(), 3});
    c.background = m[2].str();
    return c;
}

std::string id_of(std::size_t i) { return "e" + std::to_string(i + 1); }

}  // namespace

std::string pluralize(std::string_view noun) {
    std::string n(noun);
    if (n.ends_with("man")) return n.substr(0, n.size() - 3) + "men";
    if (n.ends_with("person")) return n.substr(0, n.size() - 6) + "people";
    if (n.ends_with("s") || n.ends_with("x") || n.ends_with("ch") || n.ends_with("sh")) return n + "es";
    if (n.size() > 1 && n.back() == 'y' && std::string_view("aeiou").find(n[n.size() - 2]) == std::string_view::npos) {
        return n.substr(0, n.size() - 1) + "ies";
    }
    return n + "s";
}

std::string singularize(std::string_view noun) {
    std::string n(noun);
    if (n.ends_with("men")) return n.substr(0, n.size() - 3) + "man";
    if (n.ends_with("people")) return n.substr(0, n.size() - 6) + "person";
    if (n.ends_with("ies") && n.size() > 3) return n.substr(0, n.size() - 3) + "y";
    for (auto suffix : {"sses", "xes", "ches", "shes"}) {
        if (n.ends_with(suffix)) return n.substr(0, n.size() - 2);
    }
    if (n.ends_with("s") && !n.ends_with("ss")) return n.substr(0, n.size() - 1);
    return n;
}

bool is_color_word(std::string_view w) { return contains(kColors, w) || text::iequals(w, "gray"); }
bool is_shape_word(std::string_view w) { return contains(kShapes, w); }
bool is_texture_word(std::string_view w) { return contains(kTextures, w); }

const std::vector<std::string>& color_vocabulary() { return kColors; }

std::optional<Caption> parse(std::string_view prompt) {
    auto p = text::trim(prompt);
    if (auto ec = parse_ec(p)) return ec;

    p = text::lower(p);
    while (!p.empty() && (p.back() == '.' || p.back() == '!')) p.pop_back();
    if (p.starts_with("a photo of ")) p = p.substr(11);
    if (p.empty()) return std::nullopt;

    Caption c;
    static const std::regex kBackground(R"(^(.+?) (?:on|in|at|under|inside|beside|near) (?:a|an|the) ([a-z][a-z ]*)$)");
    std::smatch m;
    if (std::regex_match(p, m, kBackground)) {
        c.background = m[2].str();
        p = m[1].str();
    }

    static const std::regex kRelation(R"(^(.+?) (to the left of|left of|to the right of|right of|above|below|next to) (.+)$)");
    if (std::regex_match(p, m, kRelation)) {
        auto a = noun_phrase(m[1].str());
        auto b = noun_phrase(m[3].str());
        if (!a || !b || a->size() != 1 || b->size() != 1) return std::nullopt;
        const auto rel = m[2].str();
        Position pa = Position::left, pb = Position::right;
        if (rel.find("right") != std::string::npos) std::swap(pa, pb);
        else if (rel == "above") pa = Position::top, pb = Position::bottom;
        else if (rel == "below") pa = Position::bottom, pb = Position::top;
        a->front().position = pa;
        b->front().position = pb;
        c.entities = {a->front(), b->front()};
        return c;
    }

    std::string normalized = std::regex_replace(p, std::regex(R"(,? and )"), ",");
    for (const auto& part : text::split(normalized, ',')) {
        auto t = text::trim(part);
        if (t.empty()) continue;
        auto ents = noun_phrase(t);
        if (!ents) return std::nullopt;
        c.entities.insert(c.entities.end(), ents->begin(), ents->end());
    }
    if (c.entities.empty() || c.entities.size() > 8) return std::nullopt;
    for (std::size_t i = 0; i < c.entities.size(); ++i) c.entities[i].position = default_position(i, c.entities.size());
    return c;
}

namespace {

grammar::Detail detail_action(const Entity& e, std::size_t i) {
    grammar::Detail d{id_of(i), e.cls, {}};
    if (e.color) d.fields.emplace_back(grammar::DetailKey::color, *e.color);
    if (e.shape) d.fields.emplace_back(grammar::DetailKey::shape, *e.shape);
    if (e.texture) d.fields.emplace_back(grammar::DetailKey::texture, *e.texture);
    for (const auto& a : e.attributes) d.fields.emplace_back(grammar::DetailKey::attribute, a);
    return d;
}

}  // namespace

ChainPlan template_plan(std::string_view prompt, const Caption& c) {
    ChainPlan plan;
    plan.original_prompt = std::string(prompt);
    plan.planner_model = "mock-template";
    auto push = [&](StepKind kind, std::string action, std::optional<std::string> target) {
        PlanStep s;
        s.index = static_cast<int>(plan.steps.size() + 1);
        s.kind = kind;
        s.final_goal = plan.original_prompt;
        s.step_action = std::move(action);
        s.target_entity = std::move(target);
        plan.steps.push_back(std::move(s));
    };

    if (!c.entities.empty()) {
        std::vector<grammar::Action> layout;
        for (std::size_t i = 0; i < c.entities.size(); ++i) {
            layout.push_back(grammar::AddPlaceholder{id_of(i), c.entities[i].cls, c.entities[i].position});
        }
        push(StepKind::foundational_layout, grammar::format(layout), std::nullopt);
    } else if (c.background) {
        push(StepKind::background, grammar::format(grammar::FillBackground{*c.background}), std::nullopt);
        return plan;
    }
    for (std::size_t i = 0; i < c.entities.size(); ++i) {
        push(StepKind::entity_detail, grammar::format(detail_action(c.entities[i], i)), id_of(i));
    }
    for (const auto& in : c.interactions) {
        push(StepKind::interaction, grammar::format(grammar::Interact{id_of(in.subject), in.verb, id_of(in.object)}),
             id_of(in.subject));
    }
    if (c.background) push(StepKind::background, grammar::format(grammar::FillBackground{*c.background}), std::nullopt);
    return plan;
}

std::vector<grammar::Action> actions(const Caption& c) {
    std::vector<grammar::Action> out;
    for (std::size_t i = 0; i < c.entities.size(); ++i) {
        out.push_back(grammar::AddPlaceholder{id_of(i), c.entities[i].cls, c.entities[i].position});
    }
    for (std::size_t i = 0; i < c.entities.size(); ++i) out.push_back(detail_action(c.entities[i], i));
    for (const auto& in : c.interactions) {
        out.push_back(grammar::Interact{id_of(in.subject), in.verb, id_of(in.object)});
    }
    if (c.background) out.push_back(grammar::FillBackground{*c.background});
    return out;
}

std::string template_planner_reply(std::string_view prompt) {
    const auto c = parse(prompt);
    if (!c) return "I could not break this caption into steps.";
    return "Here is the step plan.\n\n" + plan_block(template_plan(prompt, *c)) + "\n";
}

std::optional<std::vector<grammar::Action>> interpret(std::string_view prompt) {
    const auto c = parse(grammar::action_text(prompt));
    if (!c) return std::nullopt;
    return actions(*c);
}

}  // namespace coig::caption
