// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

// HTTP API over the run store.
//
//   POST /runs                         {plan} | {prompt, profile?, step_wise?}
//   GET  /runs[?status=]
//   GET  /runs/{id}
//   GET  /runs/{id}/events             text/event-stream, replay then live tail
//   GET  /artifacts/{hash}[.png]
//   POST /runs/{id}/pause | /resume
//   POST /runs/{id}/interventions      {Intervention}
//   POST /runs/{id}/eval/readability
//   POST /runs/{id}/eval/causal        {PerturbationSpec}
//   GET  /reports/{run_id}/{metric}
//   GET  /healthz
//
// Errors are {code, message, detail?} with code one of not_found (404),
// invalid_input (422), conflict (409), backend_failure (502), internal (500)
// and unauthorized (401) when a bearer token is configured.

#pragma once

#include <memory>
#include <optional>
#include <string>

#include "coig/config.hpp"
#include "coig/error.hpp"

namespace coig {

enum class ApiCode { not_found, invalid_input, conflict, backend_failure, internal, unauthorized };
std::string_view api_code_name(ApiCode c);
int http_status(ApiCode c);
ApiCode api_code_of(Errc e);

struct ServiceOptions {
    CliConfig config;
    /// When set, every endpoint except /healthz requires "Authorization: Bearer <token>".
    std::optional<std::string> bearer_token;
    Clock clock = system_clock();
};

/// Runs execute on one worker thread each. Every handler re-reads state from
/// the store, so a restarted service resumes runs left in `running`.
class Service {
public:
    explicit Service(ServiceOptions options);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds; port 0 picks a free port. Returns the bound port. bind_error on failure.
    int bind(const std::string& host, int port);
    /// Blocks serving requests until stop().
    void serve();
    /// Stops accepting requests, lets in-flight steps finish, joins workers.
    /// Runs that were executing stay `running` and continue on next start.
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace coig
