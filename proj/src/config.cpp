// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#include "coig/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "coig/caption.hpp"
#include "coig/error.hpp"

namespace fs = std::filesystem;

namespace coig {

json to_json(const BackendProfile& p) {
    if (p.kind == BackendProfile::Kind::mock) return {{"kind", "mock"}, {"fault", std::string(mock_fault_name(p.fault))}};
    json j = {{"kind", "http"}};
    if (p.text) j["text"] = to_json(*p.text);
    if (p.image) j["image"] = to_json(*p.image);
    if (p.vision) j["vision"] = to_json(*p.vision);
    return j;
}

BackendProfile backend_profile_from_json(const json& j) {
    if (!j.is_object()) throw Error(Errc::config_error, "backend profile must be an object");
    BackendProfile p;
    const auto kind = j.value("kind", std::string("mock"));
    if (kind == "mock") {
        p.kind = BackendProfile::Kind::mock;
        try {
            p.fault = parse_mock_fault(j.value("fault", std::string("none")));
        } catch (const Error& e) {
            throw Error(Errc::config_error, e.what());
        }
        return p;
    }
    if (kind != "http") throw Error(Errc::config_error, "unknown backend kind '" + kind + "' (mock, http)");
    p.kind = BackendProfile::Kind::http;
    for (auto [key, slot] : {std::pair{"text", &p.text}, std::pair{"image", &p.image}, std::pair{"vision", &p.vision}}) {
        if (!j.contains(key)) throw Error(Errc::config_error, std::string("http profile lacks the '") + key + "' role");
        *slot = backend_config_from_json(j.at(key));
        if ((*slot)->endpoint_url.empty()) {
            throw Error(Errc::config_error, std::string("http profile role '") + key + "' has no endpoint_url");
        }
    }
    return p;
}

CliConfig default_config() {
    CliConfig c;
    c.backend_profiles["mock"] = {};
    c.backend_profiles["mock-merge"] = {BackendProfile::Kind::mock, MockFault::merge, {}, {}, {}};
    return c;
}

CliConfig config_from_json(const json& j) {
    if (!j.is_object()) throw Error(Errc::config_error, "config must be an object");
    auto c = default_config();
    try {
        if (j.contains("store_root")) c.store_root = j.at("store_root").get<std::string>();
        if (j.contains("default_profile")) c.default_profile = j.at("default_profile").get<std::string>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("backend_profiles")) {
            for (const auto& [name, body] : j.at("backend_profiles").items()) {
                c.backend_profiles[name] = backend_profile_from_json(body);
            }
        }
    } catch (const json::exception& ex) {
        throw Error(Errc::config_error, std::string("config: ") + ex.what());
    }
    if (!c.backend_profiles.contains(c.default_profile)) {
        throw Error(Errc::config_error, "default_profile '" + c.default_profile + "' is not defined");
    }
    return c;
}

json to_json(const CliConfig& c) {
    json profiles = json::object();
    for (const auto& [name, p] : c.backend_profiles) profiles[name] = to_json(p);
    return {{"store_root", c.store_root.string()},
            {"default_profile", c.default_profile},
            {"seed", c.seed},
            {"backend_profiles", std::move(profiles)}};
}

std::optional<fs::path> discover_config(const std::optional<fs::path>& explicit_path, const fs::path& cwd) {
    if (explicit_path) {
        if (!fs::exists(*explicit_path)) throw Error(Errc::config_error, "config file " + explicit_path->string() + " does not exist");
        return explicit_path;
    }
    const auto local = cwd / kConfigFileName;
    const bool has_local = fs::exists(local);
    if (const char* env = std::getenv(kConfigEnv); env && *env) {
        const fs::path named(env);
        if (!fs::exists(named)) throw Error(Errc::config_error, std::string(kConfigEnv) + " names missing file " + named.string());
        if (has_local && !fs::equivalent(named, local)) {
            throw Error(Errc::config_error, std::string(kConfigEnv) + "=" + named.string() + " and " + local.string() +
                                                " both exist; pass --config to choose");
        }
        return named;
    }
    if (has_local) return local;
    return std::nullopt;
}

CliConfig load_config(const std::optional<fs::path>& explicit_path, const std::optional<fs::path>& store_override) {
    CliConfig c = default_config();
    if (const auto path = discover_config(explicit_path, fs::current_path())) {
        std::ifstream in(*path);
        if (!in) throw Error(Errc::config_error, "cannot read config " + path->string());
        std::stringstream ss;
        ss << in.rdbuf();
        json j;
        try {
            j = json::parse(ss.str());
        } catch (const json::exception& ex) {
            throw Error(Errc::config_error, path->string() + ": " + ex.what());
        }
        c = config_from_json(j);
        if (c.store_root.is_relative()) c.store_root = fs::absolute(*path).parent_path() / c.store_root;
    }
    if (store_override) {
        c.store_root = *store_override;
    } else if (const char* env = std::getenv(kStoreEnv); env && *env) {
        c.store_root = env;
    }
    return c;
}

const BackendProfile& find_profile(const CliConfig& c, const std::string& name) {
    const auto it = c.backend_profiles.find(name);
    if (it == c.backend_profiles.end()) throw Error(Errc::config_error, "unknown backend profile '" + name + "'");
    return it->second;
}

Backends make_backends(const BackendProfile& p) {
    if (p.kind == BackendProfile::Kind::mock) {
        MockOptions opts;
        opts.planner = [](std::string_view prompt) { return caption::template_planner_reply(prompt); };
        opts.interpreter = [](std::string_view prompt) { return caption::interpret(prompt); };
        opts.fault = p.fault;
        auto mock = std::make_shared<MockBackend>(std::move(opts));
        return {mock, mock, mock};
    }
    return {std::make_shared<HttpTextModel>(*p.text), std::make_shared<HttpImageModel>(*p.image),
            std::make_shared<HttpVisionModel>(*p.vision)};
}

}  // namespace coig
