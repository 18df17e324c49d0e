// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

// Operator configuration: store location and named backend profiles.
//
//   {
//     "store_root": "./coig-store",
//     "default_profile": "mock",
//     "seed": 7,
//     "backend_profiles": {
//       "mock":  {"kind": "mock", "fault": "none"},
//       "live":  {"kind": "http", "text": {...}, "image": {...}, "vision": {...}}
//     }
//   }
//
// "mock" and "mock-merge" are always defined unless the file overrides them.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "coig/backends.hpp"

namespace coig {

struct BackendProfile {
    enum class Kind { mock, http };
    Kind kind = Kind::mock;
    MockFault fault = MockFault::none;
    // http only; every role is required.
    std::optional<BackendConfig> text;
    std::optional<BackendConfig> image;
    std::optional<BackendConfig> vision;
};

json to_json(const BackendProfile& p);
BackendProfile backend_profile_from_json(const json& j);  // config_error

struct CliConfig {
    std::filesystem::path store_root = "coig-store";
    std::map<std::string, BackendProfile> backend_profiles;
    std::string default_profile = "mock";
    std::uint64_t seed = 7;
};

/// Built-in profiles only.
CliConfig default_config();
/// Merges the document over the defaults. config_error when the default
/// profile is undefined or a profile is malformed.
CliConfig config_from_json(const json& j);
json to_json(const CliConfig& c);

inline constexpr const char* kConfigEnv = "COIG_CONFIG";
inline constexpr const char* kStoreEnv = "COIG_STORE";
inline constexpr const char* kConfigFileName = "coig.json";

/// `explicit_path` > $COIG_CONFIG > ./coig.json. An explicitly named file
/// that does not exist is a config_error, as is $COIG_CONFIG naming a
/// different file than an existing ./coig.json. nullopt when none applies.
std::optional<std::filesystem::path> discover_config(const std::optional<std::filesystem::path>& explicit_path,
                                                     const std::filesystem::path& cwd);

/// Discovery, parse, then store root override: `store_override` > $COIG_STORE
/// > file value. A relative store root in a file is relative to that file.
CliConfig load_config(const std::optional<std::filesystem::path>& explicit_path,
                      const std::optional<std::filesystem::path>& store_override = std::nullopt);

/// config_error for unknown names.
const BackendProfile& find_profile(const CliConfig& c, const std::string& name);

/// Instantiates the three roles. Mock profiles share one MockBackend wired to
/// the template planner and caption interpreter.
Backends make_backends(const BackendProfile& p);

}  // namespace coig
