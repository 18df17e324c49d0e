// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coig {

enum class Errc {
    precondition_violated,
    // backends
    transport_error,
    auth_error,
    rate_limited,
    grammar_error,
    unknown_entity,
    locked_entity_mutation,
    question_parse_error,
    census_parse_error,
    // planner
    planner_output_error,
    // executor
    plan_invalid,
    no_more_steps,
    prior_step_failed,
    index_out_of_range,
    run_not_paused,
    // runstore
    io_error,
    integrity_error,
    not_found,
    corrupt_manifest,
    // eval
    missing_artifact,
    field_absent,
    gray_forbidden,
    spec_mismatch,
    // bench
    vocab_too_small,
    schema_error,
    // cli / service
    config_error,
    bind_error,
};

/// Stable snake_case name of an error code, used in messages and API bodies.
constexpr std::string_view errc_name(Errc c) noexcept {
    switch (c) {
        case Errc::precondition_violated: return "precondition_violated";
        case Errc::transport_error: return "transport_error";
        case Errc::auth_error: return "auth_error";
        case Errc::rate_limited: return "rate_limited";
        case Errc::grammar_error: return "grammar_error";
        case Errc::unknown_entity: return "unknown_entity";
        case Errc::locked_entity_mutation: return "locked_entity_mutation";
        case Errc::question_parse_error: return "question_parse_error";
        case Errc::census_parse_error: return "census_parse_error";
        case Errc::planner_output_error: return "planner_output_error";
        case Errc::plan_invalid: return "plan_invalid";
        case Errc::no_more_steps: return "no_more_steps";
        case Errc::prior_step_failed: return "prior_step_failed";
        case Errc::index_out_of_range: return "index_out_of_range";
        case Errc::run_not_paused: return "run_not_paused";
        case Errc::io_error: return "io_error";
        case Errc::integrity_error: return "integrity_error";
        case Errc::not_found: return "not_found";
        case Errc::corrupt_manifest: return "corrupt_manifest";
        case Errc::missing_artifact: return "missing_artifact";
        case Errc::field_absent: return "field_absent";
        case Errc::gray_forbidden: return "gray_forbidden";
        case Errc::spec_mismatch: return "spec_mismatch";
        case Errc::vocab_too_small: return "vocab_too_small";
        case Errc::schema_error: return "schema_error";
        case Errc::config_error: return "config_error";
        case Errc::bind_error: return "bind_error";
    }
    return "unknown";
}

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

    /// True for failures worth retrying or pausing on (network-ish), as
    /// opposed to deterministic rejections of the input.
    bool transient() const noexcept {
        return code_ == Errc::transport_error || code_ == Errc::rate_limited;
    }

private:
    Errc code_;
};

}  // namespace coig
