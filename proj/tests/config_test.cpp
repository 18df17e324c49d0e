// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

#include "coig/config.hpp"
#include "support.hpp"

namespace coig {
namespace {

using testing::TempDir;

// Restores an environment variable on scope exit.
class EnvGuard {
public:
    explicit EnvGuard(const char* name) : name_(name) {
        if (const char* v = std::getenv(name)) old_ = v;
    }
    ~EnvGuard() {
        if (old_) ::setenv(name_, old_->c_str(), 1);
        else ::unsetenv(name_);
    }
    void set(const std::string& v) { ::setenv(name_, v.c_str(), 1); }
    void unset() { ::unsetenv(name_); }

private:
    const char* name_;
    std::optional<std::string> old_;
};

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no coig::Error thrown";
    return Errc::precondition_violated;
}

TEST(Config, Defaults) {
    const auto c = default_config();
    EXPECT_EQ(c.default_profile, "mock");
    EXPECT_TRUE(c.backend_profiles.contains("mock"));
    EXPECT_EQ(find_profile(c, "mock-merge").fault, MockFault::merge);
    EXPECT_EQ(code_of([&] { find_profile(c, "live"); }), Errc::config_error);
}

TEST(Config, HttpProfileNeedsEveryRole) {
    const json role = {{"endpoint_url", "https://api.example.com/v1"}, {"auth_token_env_var", "KEY"}, {"model_name", "m"}};
    json doc = {{"default_profile", "live"},
                {"backend_profiles", {{"live", {{"kind", "http"}, {"text", role}, {"image", role}}}}}};
    EXPECT_EQ(code_of([&] { config_from_json(doc); }), Errc::config_error);
    doc["backend_profiles"]["live"]["vision"] = role;
    const auto c = config_from_json(doc);
    const auto& p = find_profile(c, "live");
    EXPECT_EQ(p.kind, BackendProfile::Kind::http);
    EXPECT_EQ(p.text->auth_token_env_var, "KEY");
    // Round trip keeps only the variable name.
    EXPECT_EQ(config_from_json(to_json(c)).backend_profiles.at("live").vision->model_name, "m");
    EXPECT_EQ(to_json(c).dump().find("secret"), std::string::npos);
}

TEST(Config, UndefinedDefaultProfile) {
    EXPECT_EQ(code_of([] { config_from_json(json{{"default_profile", "ghost"}}); }), Errc::config_error);
}

TEST(Config, DiscoveryOrder) {
    TempDir d;
    EnvGuard env(kConfigEnv);
    env.unset();
    EXPECT_FALSE(discover_config(std::nullopt, d.path()).has_value());

    const auto local = d.path() / kConfigFileName;
    std::ofstream(local) << "{}";
    EXPECT_EQ(discover_config(std::nullopt, d.path()), local);

    const auto other = d.path() / "other.json";
    std::ofstream(other) << "{}";
    EXPECT_EQ(discover_config(other, d.path()), other);
    EXPECT_EQ(code_of([&] { discover_config(d.path() / "missing.json", d.path()); }), Errc::config_error);

    env.set(other.string());
    EXPECT_EQ(code_of([&] { discover_config(std::nullopt, d.path()); }), Errc::config_error);
    env.set(local.string());
    EXPECT_EQ(discover_config(std::nullopt, d.path()), local);
}

TEST(Config, StoreRootResolution) {
    TempDir d;
    EnvGuard cfg(kConfigEnv);
    EnvGuard store(kStoreEnv);
    cfg.unset();
    store.unset();
    const auto file = d.path() / "conf.json";
    std::ofstream(file) << R"({"store_root":"data/store","seed":11})";
    auto c = load_config(file);
    EXPECT_EQ(c.store_root, d.path() / "data/store");
    EXPECT_EQ(c.seed, 11u);
    store.set("/tmp/from-env");
    EXPECT_EQ(load_config(file).store_root, "/tmp/from-env");
    EXPECT_EQ(load_config(file, std::filesystem::path("/tmp/flag")).store_root, "/tmp/flag");
}

TEST(Config, MalformedFile) {
    TempDir d;
    const auto file = d.path() / "bad.json";
    std::ofstream(file) << "{";
    EXPECT_EQ(code_of([&] { load_config(file); }), Errc::config_error);
}

}  // namespace
}  // namespace coig
