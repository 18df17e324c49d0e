// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#include "coig/backends.hpp"

#include "coig/error.hpp"
#include "coig/qa.hpp"

namespace coig {

void check_config(const BackendConfig& c) {
    if (!(c.timeout_s > 0)) throw Error(Errc::config_error, "backend timeout must be > 0");
    if (c.max_retries < 0) throw Error(Errc::config_error, "backend max_retries must be >= 0");
    if (c.retry_backoff_s < 0) throw Error(Errc::config_error, "backend retry_backoff must be >= 0");
}

json to_json(const BackendConfig& c) {
    return {{"endpoint_url", c.endpoint_url},
            {"auth_token_env_var", c.auth_token_env_var},
            {"model_name", c.model_name},
            {"timeout", c.timeout_s},
            {"max_retries", c.max_retries},
            {"retry_backoff", c.retry_backoff_s}};
}

BackendConfig backend_config_from_json(const json& j) {
    BackendConfig c;
    try {
        c.endpoint_url = j.value("endpoint_url", "");
        c.auth_token_env_var = j.value("auth_token_env_var", "");
        c.model_name = j.value("model_name", "");
        c.timeout_s = j.value("timeout", 60.0);
        c.max_retries = j.value("max_retries", 3);
        c.retry_backoff_s = j.value("retry_backoff", 1.0);
    } catch (const json::exception& ex) {
        throw Error(Errc::config_error, std::string("backend config: ") + ex.what());
    }
    check_config(c);
    return c;
}

std::string TextModel::complete(const std::string& system_prompt, const std::string& user_prompt) {
    if (system_prompt.empty() || user_prompt.empty()) {
        throw Error(Errc::precondition_violated, "llm_complete requires non-empty prompts");
    }
    return do_complete(system_prompt, user_prompt);
}

ImageArtifact ImageModel::generate(const std::string& prompt) {
    if (text::trim(prompt).empty()) throw Error(Errc::precondition_violated, "t2i_generate requires a prompt");
    return do_generate(prompt);
}

ImageArtifact ImageModel::edit(const ImageArtifact& image, const std::string& prompt) {
    if (text::trim(prompt).empty()) throw Error(Errc::precondition_violated, "t2i_edit requires a prompt");
    if (image.id != sha256_hex(image.bytes)) {
        throw Error(Errc::precondition_violated, "artifact id does not match its payload");
    }
    return do_edit(image, prompt);
}

Answer VisionModel::answer(const ImageArtifact& image, const std::string& question) {
    if (text::trim(question).empty()) throw Error(Errc::question_parse_error, "empty question");
    return do_answer(image, question);
}

CensusReport VisionModel::census(const ImageArtifact& image) {
    if (image.id != sha256_hex(image.bytes)) {
        throw Error(Errc::precondition_violated, "artifact id does not match its payload");
    }
    return do_census(image);
}

std::string_view mock_fault_name(MockFault f) { return f == MockFault::merge ? "merge" : "none"; }

MockFault parse_mock_fault(std::string_view s) {
    if (s.empty() || s == "none") return MockFault::none;
    if (s == "merge") return MockFault::merge;
    throw Error(Errc::config_error, "unknown mock fault '" + std::string(s) + "'");
}

MockBackend::MockBackend(MockOptions options) : options_(std::move(options)) {}

std::string MockBackend::do_complete(const std::string&, const std::string& user_prompt) {
    if (!options_.planner) throw Error(Errc::config_error, "mock text model has no planner configured");
    return options_.planner(user_prompt);
}

ImageArtifact MockBackend::do_generate(const std::string& prompt) {
    std::vector<grammar::Action> actions;
    try {
        actions = grammar::parse(prompt);
    } catch (const Error& e) {
        if (e.code() != Errc::grammar_error || !options_.interpreter) throw;
        auto interpreted = options_.interpreter(prompt);
        if (!interpreted) throw;
        actions = std::move(*interpreted);
    }
    auto scene = grammar::apply(SceneDocument{}, actions);
    if (options_.fault == MockFault::merge && !scene.entities.empty()) {
        const auto dropped = scene.entities.back().id;
        scene.entities.pop_back();
        for (auto& e : scene.entities) {
            std::erase_if(e.interactions, [&](const Interaction& i) { return i.target == dropped; });
        }
    }
    return ImageArtifact::from_scene(scene);
}

ImageArtifact MockBackend::do_edit(const ImageArtifact& image, const std::string& prompt) {
    const auto actions = grammar::parse(prompt);
    return ImageArtifact::from_scene(grammar::apply(image.scene(), actions));
}

Answer MockBackend::do_answer(const ImageArtifact& image, const std::string& question) {
    const auto query = qa::parse(question);
    return qa::holds(query, image.scene()) ? Answer::yes : Answer::no;
}

CensusReport MockBackend::do_census(const ImageArtifact& image) { return census_of(image.scene()); }

}  // namespace coig
