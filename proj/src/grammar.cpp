// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#include "coig/grammar.hpp"

#include <algorithm>
#include <cctype>

#include "coig/error.hpp"

namespace coig::grammar {

namespace {

constexpr std::string_view kActionLabel = "This Step's Action:";
constexpr std::string_view kGoalLabel = "Final Goal:";

[[noreturn]] void fail(const std::string& sentence, const std::string& why) {
    throw Error(Errc::grammar_error, why + " in \"" + sentence + "\"");
}

std::vector<std::string> sentences(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        auto t = text::trim(cur);
        if (!t.empty()) out.push_back(std::move(t));
        cur.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '\n' || c == '\r') {
            flush();
        } else if (c == '.' && (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1])))) {
            flush();
        } else {
            cur.push_back(c);
        }
    }
    flush();
    return out;
}

std::string require_id(const std::string& sentence, std::string_view raw) {
    auto id = text::trim(raw);
    if (!is_entity_id(id)) fail(sentence, "invalid entity id '" + id + "'");
    return id;
}

Action parse_sentence(const std::string& s) {
    if (text::starts_with_ci(s, "add placeholder ")) {
        const auto rest = std::string_view(s).substr(16);
        const auto colon = rest.find(':');
        if (colon == std::string_view::npos) fail(s, "missing ':'");
        AddPlaceholder a;
        a.id = require_id(s, rest.substr(0, colon));
        const auto body = text::trim(rest.substr(colon + 1));
        const auto at = text::lower(body).rfind(" at ");
        if (at == std::string::npos) fail(s, "missing 'at <position>'");
        a.cls = text::trim(std::string_view(body).substr(0, at));
        if (a.cls.empty()) fail(s, "missing class");
        const auto pos = parse_position(std::string_view(body).substr(at + 4));
        if (!pos) fail(s, "unknown position");
        a.position = *pos;
        return a;
    }
    if (text::starts_with_ci(s, "detail ")) {
        const auto rest = std::string_view(s).substr(7);
        const auto colon = rest.find(':');
        auto head = rest.substr(0, colon);
        Detail d;
        if (const auto open = head.find('('); open != std::string_view::npos) {
            const auto close = head.find(')', open);
            if (close == std::string_view::npos) fail(s, "unbalanced '('");
            d.cls = text::trim(head.substr(open + 1, close - open - 1));
            if (!text::trim(head.substr(close + 1)).empty()) fail(s, "unexpected text after class");
            head = head.substr(0, open);
        }
        d.id = require_id(s, head);
        if (colon != std::string_view::npos) {
            for (const auto& part : text::split(rest.substr(colon + 1), ',')) {
                const auto eq = part.find('=');
                if (eq == std::string::npos) fail(s, "expected key=value");
                const auto key = text::lower(text::trim(std::string_view(part).substr(0, eq)));
                auto value = text::trim(std::string_view(part).substr(eq + 1));
                if (value.empty()) fail(s, "empty value for " + key);
                DetailKey k;
                if (key == "color") k = DetailKey::color;
                else if (key == "shape") k = DetailKey::shape;
                else if (key == "texture") k = DetailKey::texture;
                else if (key == "attribute") k = DetailKey::attribute;
                else fail(s, "unknown key '" + key + "'");
                d.fields.emplace_back(k, std::move(value));
            }
        }
        return d;
    }
    if (text::starts_with_ci(s, "interact ")) {
        const auto rest = std::string_view(s).substr(9);
        const auto colon = rest.find(':');
        if (colon == std::string_view::npos) fail(s, "missing ':'");
        Interact in;
        in.id = require_id(s, rest.substr(0, colon));
        auto words = text::split_ws(rest.substr(colon + 1));
        if (words.empty()) fail(s, "missing verb");
        if (words.size() > 1 && is_entity_id(words.back())) {
            in.target = words.back();
            words.pop_back();
        }
        in.verb = text::join(words, " ");
        return in;
    }
    if (text::starts_with_ci(s, "delete ")) {
        return Delete{require_id(s, std::string_view(s).substr(7))};
    }
    if (text::starts_with_ci(s, "fill background:")) {
        auto t = text::trim(std::string_view(s).substr(16));
        if (t.empty()) fail(s, "empty background");
        return FillBackground{std::move(t)};
    }
    fail(s, "unrecognized action");
}

// Placeholder paint only exists while the entity is a placeholder.
void finalize(SceneEntity& e) {
    if (e.placeholder) {
        e.placeholder = false;
        e.color.reset();
    }
    e.locked = true;
}

}  // namespace

std::string_view detail_key_name(DetailKey k) {
    switch (k) {
        case DetailKey::color: return "color";
        case DetailKey::shape: return "shape";
        case DetailKey::texture: return "texture";
        case DetailKey::attribute: return "attribute";
    }
    return "attribute";
}

bool is_entity_id(std::string_view token) {
    if (token.empty()) return false;
    bool digit = false;
    for (char c : token) {
        const auto u = static_cast<unsigned char>(c);
        if (std::isdigit(u)) digit = true;
        else if (!std::isalpha(u) && c != '_' && c != '-') return false;
    }
    return digit;
}

std::string action_text(std::string_view prompt) {
    const auto at = prompt.find(kActionLabel);
    if (at != std::string_view::npos) {
        auto rest = prompt.substr(at + kActionLabel.size());
        return text::trim(rest);
    }
    std::vector<std::string> kept;
    for (const auto& line : text::split(prompt, '\n')) {
        if (!text::starts_with_ci(text::trim(line), kGoalLabel)) kept.push_back(line);
    }
    return text::trim(text::join(kept, "\n"));
}

std::vector<Action> parse(std::string_view prompt) {
    std::vector<Action> out;
    for (const auto& s : sentences(action_text(prompt))) out.push_back(parse_sentence(s));
    if (out.empty()) throw Error(Errc::grammar_error, "prompt contains no action");
    return out;
}

std::string subject_of(const Action& a) {
    return std::visit(
        [](const auto& x) -> std::string {
            if constexpr (requires { x.id; }) return x.id;
            else return {};
        },
        a);
}

std::string format(const Action& a) {
    struct V {
        std::string operator()(const AddPlaceholder& x) const {
            return "Add placeholder " + x.id + ": " + x.cls + " at " + std::string(position_name(x.position));
        }
        std::string operator()(const Detail& x) const {
            std::string s = "Detail " + x.id;
            if (x.cls) s += " (" + *x.cls + ")";
            if (!x.fields.empty()) {
                std::vector<std::string> kv;
                for (const auto& [k, v] : x.fields) kv.push_back(std::string(detail_key_name(k)) + "=" + v);
                s += ": " + text::join(kv, ", ");
            }
            return s;
        }
        std::string operator()(const Interact& x) const {
            return "Interact " + x.id + ": " + x.verb + (x.target ? " " + *x.target : "");
        }
        std::string operator()(const Delete& x) const { return "Delete " + x.id; }
        std::string operator()(const FillBackground& x) const { return "Fill background: " + x.text; }
    };
    return std::visit(V{}, a);
}

std::string format(const std::vector<Action>& actions) {
    std::vector<std::string> parts;
    for (const auto& a : actions) parts.push_back(format(a));
    return text::join(parts, ". ");
}

SceneDocument apply(const SceneDocument& scene, const std::vector<Action>& actions) {
    SceneDocument doc = scene;
    auto need = [&doc](const std::string& id) -> SceneEntity& {
        auto* e = doc.find(id);
        if (!e) throw Error(Errc::unknown_entity, "no entity with id " + id);
        return *e;
    };
    for (const auto& action : actions) {
        if (const auto* add = std::get_if<AddPlaceholder>(&action)) {
            if (const auto* existing = doc.find(add->id)) {
                if (existing->locked) {
                    throw Error(Errc::locked_entity_mutation, "re-adding locked entity " + add->id);
                }
                throw Error(Errc::grammar_error, "entity " + add->id + " already exists");
            }
            SceneEntity e;
            e.id = add->id;
            e.cls = add->cls;
            e.position = add->position;
            e.color = std::string(kPlaceholderColor);
            e.placeholder = true;
            doc.entities.push_back(std::move(e));
        } else if (const auto* det = std::get_if<Detail>(&action)) {
            auto& e = need(det->id);
            finalize(e);
            for (const auto& [key, value] : det->fields) {
                switch (key) {
                    case DetailKey::color: e.color = value; break;
                    case DetailKey::shape: e.shape = value; break;
                    case DetailKey::texture: e.texture = value; break;
                    case DetailKey::attribute:
                        if (std::find(e.attributes.begin(), e.attributes.end(), value) == e.attributes.end()) {
                            e.attributes.push_back(value);
                        }
                        break;
                }
            }
        } else if (const auto* in = std::get_if<Interact>(&action)) {
            if (in->target) need(*in->target);
            auto& e = need(in->id);
            finalize(e);
            e.interactions.push_back({in->verb, in->target});
        } else if (const auto* del = std::get_if<Delete>(&action)) {
            need(del->id);
            for (auto& other : doc.entities) {
                if (other.id == del->id) continue;
                const bool refers = std::any_of(other.interactions.begin(), other.interactions.end(),
                                                [&](const Interaction& i) { return i.target == del->id; });
                if (!refers) continue;
                if (other.locked) {
                    throw Error(Errc::locked_entity_mutation,
                                "deleting " + del->id + " would alter locked entity " + other.id);
                }
                std::erase_if(other.interactions, [&](const Interaction& i) { return i.target == del->id; });
            }
            std::erase_if(doc.entities, [&](const SceneEntity& e) { return e.id == del->id; });
        } else if (const auto* bg = std::get_if<FillBackground>(&action)) {
            doc.background = bg->text;
        }
    }
    return doc;
}

}  // namespace coig::grammar
