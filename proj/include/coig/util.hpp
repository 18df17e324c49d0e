// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace coig {

using json = nlohmann::json;
using Bytes = std::vector<std::uint8_t>;

// Milliseconds since the Unix epoch. Injected so tests can pin time.
using Timestamp = std::int64_t;
using Clock = std::function<Timestamp()>;

Timestamp system_now();
Clock system_clock();

/// Canonical text form of a document: sorted keys, no insignificant
/// whitespace. Byte-stable for a given value.
std::string canonical_dump(const json& doc);

/// Hex-encoded SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> data);
std::string sha256_hex(std::string_view data);

std::string base64_encode(std::span<const std::uint8_t> data);
Bytes base64_decode(std::string_view text);

Bytes to_bytes(std::string_view s);
std::string to_string(std::span<const std::uint8_t> b);

/// 128 random bits, hex.
std::string random_id();

namespace text {

std::string trim(std::string_view s);
std::string lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool starts_with_ci(std::string_view s, std::string_view prefix);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_ws(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace text

/// Uniform draw in [0, n) from a 64-bit engine. Unlike
/// std::uniform_int_distribution the result is identical on every standard
/// library, which keeps seeded benchmark files byte-stable.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return static_cast<std::size_t>(draw % bound);
}

}  // namespace coig
