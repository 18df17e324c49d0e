// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#include "coig/scene.hpp"

#include <map>
#include <set>

#include "coig/error.hpp"

namespace coig {

std::string_view position_name(Position p) {
    switch (p) {
        case Position::left: return "left";
        case Position::right: return "right";
        case Position::top: return "top";
        case Position::bottom: return "bottom";
        case Position::center: return "center";
    }
    return "center";
}

std::optional<Position> parse_position(std::string_view s) {
    const auto v = text::lower(text::trim(s));
    if (v == "left") return Position::left;
    if (v == "right") return Position::right;
    if (v == "top") return Position::top;
    if (v == "bottom") return Position::bottom;
    if (v == "center") return Position::center;
    return std::nullopt;
}

const SceneEntity* SceneDocument::find(std::string_view id) const {
    for (const auto& e : entities) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

SceneEntity* SceneDocument::find(std::string_view id) {
    for (auto& e : entities) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

namespace {

void put_optional(json& j, const char* key, const std::optional<std::string>& v) {
    if (v) j[key] = *v;
}

std::optional<std::string> get_optional(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<std::string>();
}

}  // namespace

json to_json(const SceneEntity& e) {
    json j = json::object();
    j["id"] = e.id;
    j["class"] = e.cls;
    put_optional(j, "color", e.color);
    put_optional(j, "shape", e.shape);
    put_optional(j, "texture", e.texture);
    j["attributes"] = e.attributes;
    j["position"] = std::string(position_name(e.position));
    json inter = json::array();
    for (const auto& i : e.interactions) {
        json ij = {{"verb", i.verb}};
        put_optional(ij, "target", i.target);
        inter.push_back(std::move(ij));
    }
    j["interactions"] = std::move(inter);
    j["locked"] = e.locked;
    j["placeholder"] = e.placeholder;
    return j;
}

json to_json(const SceneDocument& doc) {
    json j = json::object();
    json ents = json::array();
    for (const auto& e : doc.entities) ents.push_back(to_json(e));
    j["entities"] = std::move(ents);
    put_optional(j, "background", doc.background);
    return j;
}

SceneDocument scene_from_json(const json& j) {
    try {
        SceneDocument doc;
        for (const auto& ej : j.at("entities")) {
            SceneEntity e;
            e.id = ej.at("id").get<std::string>();
            e.cls = ej.at("class").get<std::string>();
            e.color = get_optional(ej, "color");
            e.shape = get_optional(ej, "shape");
            e.texture = get_optional(ej, "texture");
            if (ej.contains("attributes")) e.attributes = ej.at("attributes").get<std::vector<std::string>>();
            const auto pos = parse_position(ej.at("position").get<std::string>());
            if (!pos) throw Error(Errc::schema_error, "bad position for entity " + e.id);
            e.position = *pos;
            for (const auto& ij : ej.at("interactions")) {
                e.interactions.push_back({ij.at("verb").get<std::string>(), get_optional(ij, "target")});
            }
            e.locked = ej.at("locked").get<bool>();
            e.placeholder = ej.at("placeholder").get<bool>();
            doc.entities.push_back(std::move(e));
        }
        doc.background = get_optional(j, "background");
        return doc;
    } catch (const json::exception& ex) {
        throw Error(Errc::schema_error, std::string("scene document: ") + ex.what());
    }
}

void check_scene(const SceneDocument& doc) {
    std::set<std::string> ids;
    for (const auto& e : doc.entities) {
        if (e.id.empty()) throw Error(Errc::schema_error, "empty entity id");
        if (!ids.insert(e.id).second) throw Error(Errc::schema_error, "duplicate entity id " + e.id);
        if (e.placeholder && (e.color != std::string(kPlaceholderColor) || e.texture)) {
            throw Error(Errc::schema_error, "placeholder " + e.id + " must be gray and untextured");
        }
    }
    for (const auto& e : doc.entities) {
        for (const auto& i : e.interactions) {
            if (i.target && !ids.contains(*i.target)) {
                throw Error(Errc::schema_error, "interaction of " + e.id + " targets missing " + *i.target);
            }
        }
    }
}

std::string serialize_scene(const SceneDocument& doc) { return canonical_dump(to_json(doc)); }

SceneDocument parse_scene(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& ex) {
        throw Error(Errc::schema_error, std::string("scene document: ") + ex.what());
    }
    auto doc = scene_from_json(j);
    check_scene(doc);
    return doc;
}

std::string_view media_kind_name(MediaKind k) {
    return k == MediaKind::raster_png ? "raster_png" : "scene_document";
}

MediaKind parse_media_kind(std::string_view s) {
    if (s == "raster_png") return MediaKind::raster_png;
    if (s == "scene_document") return MediaKind::scene_document;
    throw Error(Errc::schema_error, "unknown media kind " + std::string(s));
}

ImageArtifact ImageArtifact::from_scene(const SceneDocument& doc) {
    check_scene(doc);
    ImageArtifact a;
    a.kind = MediaKind::scene_document;
    a.bytes = to_bytes(serialize_scene(doc));
    a.id = sha256_hex(a.bytes);
    return a;
}

ImageArtifact ImageArtifact::from_png(Bytes png, int width, int height) {
    ImageArtifact a;
    a.kind = MediaKind::raster_png;
    a.bytes = std::move(png);
    a.width = width;
    a.height = height;
    a.id = sha256_hex(a.bytes);
    return a;
}

SceneDocument ImageArtifact::scene() const {
    if (kind != MediaKind::scene_document) {
        throw Error(Errc::schema_error, "artifact " + id + " is a raster image, not a scene document");
    }
    return parse_scene(to_string(bytes));
}

ArtifactRef ref_of(const ImageArtifact& a) { return {a.id, a.kind, a.width, a.height}; }

json to_json(const ArtifactRef& r) {
    json j = {{"id", r.id}, {"media_kind", std::string(media_kind_name(r.kind))}};
    if (r.kind == MediaKind::raster_png) {
        j["width"] = r.width;
        j["height"] = r.height;
    }
    return j;
}

ArtifactRef artifact_ref_from_json(const json& j) {
    ArtifactRef r;
    r.id = j.at("id").get<std::string>();
    r.kind = parse_media_kind(j.at("media_kind").get<std::string>());
    r.width = j.value("width", 0);
    r.height = j.value("height", 0);
    return r;
}

json to_json(const CensusReport& r) {
    json entities = json::array();
    for (const auto& e : r.entries) {
        json inter = json::array();
        for (const auto& i : e.interactions) {
            inter.push_back({{"verb", i.verb}, {"target", i.target ? json(*i.target) : json(nullptr)}});
        }
        entities.push_back({{"id", e.census_id},
                            {"class", e.cls},
                            {"attributes", e.attributes},
                            {"interactions", std::move(inter)}});
    }
    return {{"entities", std::move(entities)}};
}

CensusReport census_from_json(const json& j) {
    auto fail = [](const std::string& why) { return Error(Errc::census_parse_error, why); };
    if (!j.is_object() || !j.contains("entities") || !j.at("entities").is_array()) {
        throw fail("expected an object with an 'entities' array");
    }
    CensusReport r;
    std::set<std::string> ids;
    for (const auto& ej : j.at("entities")) {
        if (!ej.is_object()) throw fail("entity is not an object");
        CensusEntry e;
        if (!ej.contains("id") || !ej.at("id").is_string()) throw fail("entity without string id");
        if (!ej.contains("class") || !ej.at("class").is_string()) throw fail("entity without string class");
        e.census_id = ej.at("id").get<std::string>();
        e.cls = ej.at("class").get<std::string>();
        if (!ej.contains("attributes") || !ej.contains("interactions")) {
            throw fail("entity without attributes or interactions");
        }
        {
            if (!ej.at("attributes").is_array()) throw fail("attributes must be an array");
            for (const auto& a : ej.at("attributes")) {
                if (!a.is_string()) throw fail("attribute must be a string");
                e.attributes.push_back(a.get<std::string>());
            }
        }
        {
            if (!ej.at("interactions").is_array()) throw fail("interactions must be an array");
            for (const auto& ij : ej.at("interactions")) {
                if (!ij.is_object() || !ij.contains("verb") || !ij.at("verb").is_string()) {
                    throw fail("interaction without string verb");
                }
                CensusInteraction ci{ij.at("verb").get<std::string>(), std::nullopt};
                if (ij.contains("target") && !ij.at("target").is_null()) {
                    if (!ij.at("target").is_string()) throw fail("interaction target must be a string or null");
                    ci.target = ij.at("target").get<std::string>();
                }
                e.interactions.push_back(std::move(ci));
            }
        }
        if (!ids.insert(e.census_id).second) throw fail("duplicate census id " + e.census_id);
        r.entries.push_back(std::move(e));
    }
    for (const auto& e : r.entries) {
        for (const auto& i : e.interactions) {
            if (i.target && !ids.contains(*i.target)) throw fail("interaction targets unknown id " + *i.target);
        }
    }
    return r;
}

CensusReport census_of(const SceneDocument& doc) {
    std::map<std::string, std::string> census_ids;
    int next = 1;
    for (const auto& e : doc.entities) {
        if (!e.placeholder) census_ids[e.id] = "P" + std::to_string(next++);
    }
    CensusReport r;
    for (const auto& e : doc.entities) {
        if (e.placeholder) continue;
        CensusEntry c;
        c.census_id = census_ids.at(e.id);
        c.cls = e.cls;
        for (const auto* v : {&e.color, &e.shape, &e.texture}) {
            if (*v) c.attributes.push_back(**v);
        }
        c.attributes.insert(c.attributes.end(), e.attributes.begin(), e.attributes.end());
        for (const auto& i : e.interactions) {
            CensusInteraction ci{i.verb, std::nullopt};
            if (i.target) {
                if (auto it = census_ids.find(*i.target); it != census_ids.end()) ci.target = it->second;
            }
            c.interactions.push_back(std::move(ci));
        }
        r.entries.push_back(std::move(c));
    }
    return r;
}

}  // namespace coig
