// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "coig/scene.hpp"

namespace coig::raster {

inline constexpr int kDefaultSize = 320;

/// 8-bit RGB, no interlace. `rgb` holds width*height*3 bytes.
Bytes encode_png(int width, int height, std::span<const std::uint8_t> rgb);

/// Preview of a scene document: one labelled box per entity at its position,
/// filled with its color (gray for placeholders), striped when textured.
/// Deterministic for a given scene.
ImageArtifact render(const SceneDocument& scene, int width = kDefaultSize, int height = kDefaultSize);

/// Plain white image.
ImageArtifact blank(int width = kDefaultSize, int height = kDefaultSize);

}  // namespace coig::raster
