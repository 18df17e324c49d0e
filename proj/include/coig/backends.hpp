// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coig/grammar.hpp"
#include "coig/scene.hpp"

namespace coig {

/// Connection settings for one model role. The auth token itself is never
/// stored: only the name of the environment variable holding it.
struct BackendConfig {
    std::string endpoint_url;
    std::string auth_token_env_var;
    std::string model_name;
    double timeout_s = 60.0;
    int max_retries = 3;
    double retry_backoff_s = 1.0;
};

/// Throws Errc::config_error when timeout <= 0 or max_retries < 0.
void check_config(const BackendConfig& c);
json to_json(const BackendConfig& c);
BackendConfig backend_config_from_json(const json& j);

// The three model roles. Public entry points validate preconditions and
// delegate to the do_* hooks.

class TextModel {
public:
    virtual ~TextModel() = default;
    std::string complete(const std::string& system_prompt, const std::string& user_prompt);
    virtual std::string name() const = 0;

protected:
    virtual std::string do_complete(const std::string& system_prompt, const std::string& user_prompt) = 0;
};

class ImageModel {
public:
    virtual ~ImageModel() = default;
    ImageArtifact generate(const std::string& prompt);
    ImageArtifact edit(const ImageArtifact& image, const std::string& prompt);
    virtual std::string name() const = 0;

protected:
    virtual ImageArtifact do_generate(const std::string& prompt) = 0;
    virtual ImageArtifact do_edit(const ImageArtifact& image, const std::string& prompt) = 0;
};

enum class Answer { yes, no };

class VisionModel {
public:
    virtual ~VisionModel() = default;
    Answer answer(const ImageArtifact& image, const std::string& question);
    CensusReport census(const ImageArtifact& image);
    virtual std::string name() const = 0;

protected:
    virtual Answer do_answer(const ImageArtifact& image, const std::string& question) = 0;
    virtual CensusReport do_census(const ImageArtifact& image) = 0;
};

/// The three roles a chain needs, shared so that one backend object can
/// serve several roles.
struct Backends {
    std::shared_ptr<TextModel> text;
    std::shared_ptr<ImageModel> image;
    std::shared_ptr<VisionModel> vision;
};

// ---------------------------------------------------------------------------
// Deterministic mock backed by scene documents.

enum class MockFault {
    none,
    merge,  // generate() drops the last entity of the scene it produces
};

std::string_view mock_fault_name(MockFault f);
MockFault parse_mock_fault(std::string_view s);

struct MockOptions {
    /// Produces the planner reply for a user prompt.
    std::function<std::string(std::string_view user_prompt)> planner;
    /// Turns free text that is not in the action grammar into actions
    /// (used for single-pass generation of natural captions).
    std::function<std::optional<std::vector<grammar::Action>>(std::string_view prompt)> interpreter;
    MockFault fault = MockFault::none;
};

/// Stateless after construction; safe to share across threads.
class MockBackend final : public TextModel, public ImageModel, public VisionModel {
public:
    explicit MockBackend(MockOptions options = {});

    std::string name() const override { return "mock"; }

protected:
    std::string do_complete(const std::string& system_prompt, const std::string& user_prompt) override;
    ImageArtifact do_generate(const std::string& prompt) override;
    ImageArtifact do_edit(const ImageArtifact& image, const std::string& prompt) override;
    Answer do_answer(const ImageArtifact& image, const std::string& question) override;
    CensusReport do_census(const ImageArtifact& image) override;

private:
    MockOptions options_;
};

// ---------------------------------------------------------------------------
// HTTP clients for OpenAI-compatible endpoints.

struct HttpResponse {
    int status = 0;
    std::string body;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Runs `attempt` until it returns a 2xx response. Connection failures,
/// 5xx and 429 are retried up to config.max_retries times with exponential
/// backoff and jitter; 401/403 fail immediately with auth_error. Exhausted
/// retries raise transport_error, or rate_limited when the last status was
/// 429. `attempt` signals connection failure by returning status 0.
HttpResponse send_with_retries(const BackendConfig& config, const std::function<HttpResponse()>& attempt,
                               const Sleeper& sleep);

Sleeper real_sleeper();

class HttpTextModel final : public TextModel {
public:
    explicit HttpTextModel(BackendConfig config, Sleeper sleep = real_sleeper());
    std::string name() const override { return config_.model_name; }

protected:
    std::string do_complete(const std::string& system_prompt, const std::string& user_prompt) override;

private:
    BackendConfig config_;
    Sleeper sleep_;
};

class HttpImageModel final : public ImageModel {
public:
    explicit HttpImageModel(BackendConfig config, Sleeper sleep = real_sleeper());
    std::string name() const override { return config_.model_name; }

protected:
    ImageArtifact do_generate(const std::string& prompt) override;
    ImageArtifact do_edit(const ImageArtifact& image, const std::string& prompt) override;

private:
    BackendConfig config_;
    Sleeper sleep_;
};

class HttpVisionModel final : public VisionModel {
public:
    explicit HttpVisionModel(BackendConfig config, Sleeper sleep = real_sleeper());
    std::string name() const override { return config_.model_name; }

protected:
    Answer do_answer(const ImageArtifact& image, const std::string& question) override;
    CensusReport do_census(const ImageArtifact& image) override;

private:
    BackendConfig config_;
    Sleeper sleep_;
};

/// Extracts the census object from a live evaluator reply. The reply must be
/// a bare JSON object or exactly one fenced ```json block with nothing else
/// around it; anything looser raises census_parse_error.
CensusReport parse_census_reply(std::string_view reply);

/// Reads width/height from a PNG header; throws schema_error if not a PNG.
std::pair<int, int> png_dimensions(std::span<const std::uint8_t> png);

/// Instruction given to a live evaluator for the visual census.
std::string_view census_instructions();

}  // namespace coig
