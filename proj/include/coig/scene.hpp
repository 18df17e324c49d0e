// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coig/util.hpp"

namespace coig {

enum class Position { left, right, top, bottom, center };

std::string_view position_name(Position p);
std::optional<Position> parse_position(std::string_view s);

struct Interaction {
    std::string verb;
    std::optional<std::string> target;  // entity id

    bool operator==(const Interaction&) const = default;
};

/// Placeholders are always gray and untextured; locked entities only change
/// when an action names them by id.
struct SceneEntity {
    std::string id;
    std::string cls;
    std::optional<std::string> color;
    std::optional<std::string> shape;
    std::optional<std::string> texture;
    // Free-form descriptors that are not color/shape/texture ("with white hair").
    std::vector<std::string> attributes;
    Position position = Position::center;
    std::vector<Interaction> interactions;
    bool locked = false;
    bool placeholder = false;

    bool operator==(const SceneEntity&) const = default;
};

inline constexpr std::string_view kPlaceholderColor = "gray";

struct SceneDocument {
    std::vector<SceneEntity> entities;
    std::optional<std::string> background;

    const SceneEntity* find(std::string_view id) const;
    SceneEntity* find(std::string_view id);

    bool operator==(const SceneDocument&) const = default;
};

json to_json(const SceneEntity& e);
json to_json(const SceneDocument& doc);
SceneDocument scene_from_json(const json& doc);

/// Throws Errc::schema_error when an invariant does not hold.
void check_scene(const SceneDocument& doc);

std::string serialize_scene(const SceneDocument& doc);
SceneDocument parse_scene(std::string_view text);

enum class MediaKind { raster_png, scene_document };

std::string_view media_kind_name(MediaKind k);
MediaKind parse_media_kind(std::string_view s);

/// An image state I_t. The id is always the SHA-256 of the payload.
struct ImageArtifact {
    std::string id;
    MediaKind kind = MediaKind::scene_document;
    Bytes bytes;
    int width = 0;
    int height = 0;

    static ImageArtifact from_scene(const SceneDocument& doc);
    static ImageArtifact from_png(Bytes png, int width, int height);

    /// Parses the payload; throws schema_error for raster artifacts.
    SceneDocument scene() const;
};

/// Reference to a stored artifact, as recorded in manifests.
struct ArtifactRef {
    std::string id;
    MediaKind kind = MediaKind::scene_document;
    int width = 0;
    int height = 0;

    bool operator==(const ArtifactRef&) const = default;
};

ArtifactRef ref_of(const ImageArtifact& a);
json to_json(const ArtifactRef& r);
ArtifactRef artifact_ref_from_json(const json& j);

// Visual census: what an evaluator can see, under fresh ids P1..Pk.

struct CensusInteraction {
    std::string verb;
    std::optional<std::string> target;  // census id

    bool operator==(const CensusInteraction&) const = default;
};

struct CensusEntry {
    std::string census_id;
    std::string cls;
    std::vector<std::string> attributes;
    std::vector<CensusInteraction> interactions;

    bool operator==(const CensusEntry&) const = default;
};

struct CensusReport {
    std::vector<CensusEntry> entries;

    bool operator==(const CensusReport&) const = default;
};

json to_json(const CensusReport& r);
/// Strict: unknown shapes, duplicate ids and dangling targets are rejected
/// with Errc::census_parse_error.
CensusReport census_from_json(const json& j);

/// Mock evaluator view of a scene: every non-placeholder entity, with the
/// attributes it visibly carries.
CensusReport census_of(const SceneDocument& doc);

}  // namespace coig
