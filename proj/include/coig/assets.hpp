// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

// Text assets compiled into the library from assets/ and data/.
namespace coig::assets {

std::string_view csp_system_prompt();
std::string_view census_prompt();

std::string_view ec_jobs();
std::string_view ec_attributes();
std::string_view ec_interactions();

}  // namespace coig::assets
