// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include <httplib.h>

#include "coig/assets.hpp"
#include "coig/backends.hpp"
#include "coig/error.hpp"

namespace coig {

namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path prefix without trailing slash
};

Endpoint split_endpoint(const std::string& url) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) throw Error(Errc::config_error, "endpoint_url needs a scheme: " + url);
    const auto path = url.find('/', scheme + 3);
    Endpoint ep;
    ep.origin = url.substr(0, path);
    if (path != std::string::npos) ep.prefix = url.substr(path);
    while (!ep.prefix.empty() && ep.prefix.back() == '/') ep.prefix.pop_back();
    return ep;
}

httplib::Headers auth_headers(const BackendConfig& c) {
    httplib::Headers h;
    if (!c.auth_token_env_var.empty()) {
        const char* token = std::getenv(c.auth_token_env_var.c_str());
        if (!token || !*token) {
            throw Error(Errc::auth_error, "environment variable " + c.auth_token_env_var + " is not set");
        }
        h.emplace("Authorization", std::string("Bearer ") + token);
    }
    return h;
}

std::unique_ptr<httplib::Client> make_client(const BackendConfig& c, const Endpoint& ep) {
    auto client = std::make_unique<httplib::Client>(ep.origin);
    const auto secs = static_cast<time_t>(c.timeout_s);
    const auto usecs = static_cast<time_t>((c.timeout_s - static_cast<double>(secs)) * 1e6);
    client->set_connection_timeout(secs, usecs);
    client->set_read_timeout(secs, usecs);
    client->set_write_timeout(secs, usecs);
    return client;
}

HttpResponse post_json(const BackendConfig& c, const std::string& path, const json& body, const Sleeper& sleep) {
    const auto ep = split_endpoint(c.endpoint_url);
    const auto headers = auth_headers(c);
    const auto payload = body.dump();
    return send_with_retries(
        c,
        [&]() -> HttpResponse {
            auto client = make_client(c, ep);
            auto res = client->Post(ep.prefix + path, headers, payload, "application/json");
            if (!res) return {0, httplib::to_string(res.error())};
            return {res->status, res->body};
        },
        sleep);
}

json parse_body(const HttpResponse& r) {
    try {
        return json::parse(r.body);
    } catch (const json::exception& ex) {
        throw Error(Errc::transport_error, std::string("malformed response body: ") + ex.what());
    }
}

std::string chat_content(const json& reply) {
    try {
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& ex) {
        throw Error(Errc::transport_error, std::string("unexpected chat reply shape: ") + ex.what());
    }
}

json image_part(const ImageArtifact& image) {
    if (image.kind != MediaKind::raster_png) {
        throw Error(Errc::precondition_violated, "live evaluator needs a raster image, got " + image.id);
    }
    return {{"type", "image_url"}, {"image_url", {{"url", "data:image/png;base64," + base64_encode(image.bytes)}}}};
}

ImageArtifact artifact_from_images_reply(const HttpResponse& r) {
    const auto reply = parse_body(r);
    std::string b64;
    try {
        b64 = reply.at("data").at(0).at("b64_json").get<std::string>();
    } catch (const json::exception& ex) {
        throw Error(Errc::transport_error, std::string("unexpected image reply shape: ") + ex.what());
    }
    auto png = base64_decode(b64);
    const auto [w, h] = png_dimensions(png);
    return ImageArtifact::from_png(std::move(png), w, h);
}

}  // namespace

Sleeper real_sleeper() {
    return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

HttpResponse send_with_retries(const BackendConfig& config, const std::function<HttpResponse()>& attempt,
                               const Sleeper& sleep) {
    thread_local std::mt19937_64 jitter_rng{std::random_device{}()};
    HttpResponse last;
    for (int i = 0; i <= config.max_retries; ++i) {
        last = attempt();
        if (last.status >= 200 && last.status < 300) return last;
        if (last.status == 401 || last.status == 403) {
            throw Error(Errc::auth_error, "HTTP " + std::to_string(last.status) + ": " + last.body);
        }
        const bool retryable = last.status == 0 || last.status == 429 || last.status >= 500;
        if (!retryable) throw Error(Errc::transport_error, "HTTP " + std::to_string(last.status) + ": " + last.body);
        if (i == config.max_retries) break;
        const double u = static_cast<double>(jitter_rng() >> 11) * 0x1.0p-53;
        const double delay_s = config.retry_backoff_s * std::ldexp(1.0, i) * (0.5 + 0.5 * u);
        sleep(std::chrono::milliseconds(static_cast<std::int64_t>(delay_s * 1000.0)));
    }
    if (last.status == 429) throw Error(Errc::rate_limited, "rate limited after retries");
    throw Error(Errc::transport_error, last.status == 0 ? "connection failed: " + last.body
                                                        : "HTTP " + std::to_string(last.status) + " after retries");
}

std::pair<int, int> png_dimensions(std::span<const std::uint8_t> png) {
    static constexpr std::uint8_t kMagic[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    if (png.size() < 24 || !std::equal(std::begin(kMagic), std::end(kMagic), png.begin())) {
        throw Error(Errc::schema_error, "payload is not a PNG image");
    }
    auto be32 = [&](std::size_t off) {
        return static_cast<int>((std::uint32_t{png[off]} << 24) | (std::uint32_t{png[off + 1]} << 16) |
                                (std::uint32_t{png[off + 2]} << 8) | std::uint32_t{png[off + 3]});
    };
    return {be32(16), be32(20)};
}

CensusReport parse_census_reply(std::string_view reply) {
    auto body = text::trim(reply);
    if (body.starts_with("```")) {
        const auto first_nl = body.find('\n');
        const auto close = body.rfind("```");
        if (first_nl == std::string::npos || close <= first_nl) {
            throw Error(Errc::census_parse_error, "unterminated fenced block");
        }
        const auto tag = text::trim(std::string_view(body).substr(3, first_nl - 3));
        if (!tag.empty() && tag != "json") throw Error(Errc::census_parse_error, "unexpected fence tag " + tag);
        if (close + 3 != body.size()) throw Error(Errc::census_parse_error, "text after fenced block");
        body = text::trim(std::string_view(body).substr(first_nl + 1, close - first_nl - 1));
        if (body.find("```") != std::string::npos) throw Error(Errc::census_parse_error, "more than one block");
    }
    if (!body.starts_with('{')) throw Error(Errc::census_parse_error, "reply is not a JSON object");
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& ex) {
        throw Error(Errc::census_parse_error, ex.what());
    }
    return census_from_json(j);
}

std::string_view census_instructions() { return assets::census_prompt(); }

HttpTextModel::HttpTextModel(BackendConfig config, Sleeper sleep) : config_(std::move(config)), sleep_(std::move(sleep)) {
    check_config(config_);
}

std::string HttpTextModel::do_complete(const std::string& system_prompt, const std::string& user_prompt) {
    const json body = {{"model", config_.model_name},
                       {"messages",
                        json::array({{{"role", "system"}, {"content", system_prompt}},
                                     {{"role", "user"}, {"content", user_prompt}}})}};
    return chat_content(parse_body(post_json(config_, "/chat/completions", body, sleep_)));
}

HttpImageModel::HttpImageModel(BackendConfig config, Sleeper sleep)
    : config_(std::move(config)), sleep_(std::move(sleep)) {
    check_config(config_);
}

ImageArtifact HttpImageModel::do_generate(const std::string& prompt) {
    const json body = {{"model", config_.model_name}, {"prompt", prompt}, {"response_format", "b64_json"}};
    return artifact_from_images_reply(post_json(config_, "/images/generations", body, sleep_));
}

ImageArtifact HttpImageModel::do_edit(const ImageArtifact& image, const std::string& prompt) {
    if (image.kind != MediaKind::raster_png) {
        throw Error(Errc::precondition_violated, "live image edit needs a raster input");
    }
    const auto ep = split_endpoint(config_.endpoint_url);
    const auto headers = auth_headers(config_);
    httplib::MultipartFormDataItems items{
        {"model", config_.model_name, "", ""},
        {"prompt", prompt, "", ""},
        {"response_format", "b64_json", "", ""},
        {"image", to_string(image.bytes), "image.png", "image/png"},
    };
    const auto res = send_with_retries(
        config_,
        [&]() -> HttpResponse {
            auto client = make_client(config_, ep);
            auto r = client->Post(ep.prefix + "/images/edits", headers, items);
            if (!r) return {0, httplib::to_string(r.error())};
            return {r->status, r->body};
        },
        sleep_);
    return artifact_from_images_reply(res);
}

HttpVisionModel::HttpVisionModel(BackendConfig config, Sleeper sleep)
    : config_(std::move(config)), sleep_(std::move(sleep)) {
    check_config(config_);
}

Answer HttpVisionModel::do_answer(const ImageArtifact& image, const std::string& question) {
    const json content = json::array(
        {{{"type", "text"}, {"text", question + "\nAnswer with a single word: yes or no."}}, image_part(image)});
    const json body = {{"model", config_.model_name},
                       {"messages", json::array({{{"role", "user"}, {"content", content}}})}};
    const auto reply = text::lower(text::trim(chat_content(parse_body(post_json(config_, "/chat/completions", body, sleep_)))));
    if (reply.starts_with("yes")) return Answer::yes;
    if (reply.starts_with("no")) return Answer::no;
    throw Error(Errc::transport_error, "evaluator reply is neither yes nor no: " + reply);
}

CensusReport HttpVisionModel::do_census(const ImageArtifact& image) {
    const json content = json::array({{{"type", "text"}, {"text", "Perform the census on this image."}}, image_part(image)});
    const json body = {{"model", config_.model_name},
                       {"messages", json::array({{{"role", "system"}, {"content", std::string(census_instructions())}},
                                                 {{"role", "user"}, {"content", content}}})}};
    return parse_census_reply(chat_content(parse_body(post_json(config_, "/chat/completions", body, sleep_))));
}

}  // namespace coig
