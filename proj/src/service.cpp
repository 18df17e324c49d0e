// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#include "coig/service.hpp"

#include <atomic>
#include <condition_variable>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "coig/eval.hpp"
#include "coig/executor.hpp"
#include "coig/raster.hpp"
#include "coig/runstore.hpp"

namespace coig {

std::string_view api_code_name(ApiCode c) {
    switch (c) {
        case ApiCode::not_found: return "not_found";
        case ApiCode::invalid_input: return "invalid_input";
        case ApiCode::conflict: return "conflict";
        case ApiCode::backend_failure: return "backend_failure";
        case ApiCode::internal: return "internal";
        case ApiCode::unauthorized: return "unauthorized";
    }
    return "internal";
}

int http_status(ApiCode c) {
    switch (c) {
        case ApiCode::not_found: return 404;
        case ApiCode::invalid_input: return 422;
        case ApiCode::conflict: return 409;
        case ApiCode::backend_failure: return 502;
        case ApiCode::internal: return 500;
        case ApiCode::unauthorized: return 401;
    }
    return 500;
}

ApiCode api_code_of(Errc e) {
    switch (e) {
        case Errc::not_found: return ApiCode::not_found;
        case Errc::precondition_violated:
        case Errc::grammar_error:
        case Errc::unknown_entity:
        case Errc::question_parse_error:
        case Errc::plan_invalid:
        case Errc::index_out_of_range:
        case Errc::field_absent:
        case Errc::gray_forbidden:
        case Errc::spec_mismatch:
        case Errc::vocab_too_small:
        case Errc::schema_error:
        case Errc::config_error: return ApiCode::invalid_input;
        case Errc::run_not_paused:
        case Errc::prior_step_failed:
        case Errc::no_more_steps:
        case Errc::missing_artifact:
        case Errc::locked_entity_mutation: return ApiCode::conflict;
        case Errc::transport_error:
        case Errc::auth_error:
        case Errc::rate_limited:
        case Errc::census_parse_error:
        case Errc::planner_output_error: return ApiCode::backend_failure;
        case Errc::io_error:
        case Errc::integrity_error:
        case Errc::corrupt_manifest:
        case Errc::bind_error: return ApiCode::internal;
    }
    return ApiCode::internal;
}

namespace {

struct Slot {
    std::mutex mu;  // single writer for the run
    std::thread worker;
    bool active = false;  // guarded by mu

    std::mutex ev_mu;
    std::condition_variable cv;
    std::uint64_t version = 0;

    void notify() {
        {
            std::lock_guard lk(ev_mu);
            ++version;
        }
        cv.notify_all();
    }
};

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(canonical_dump(body), "application/json");
}

void send_error(httplib::Response& res, ApiCode code, const std::string& message, const json& detail = nullptr) {
    json body = {{"code", std::string(api_code_name(code))}, {"message", message}};
    if (!detail.is_null()) body["detail"] = detail;
    send_json(res, http_status(code), body);
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    auto j = json::parse(req.body);
    if (!j.is_object()) throw Error(Errc::schema_error, "request body must be an object");
    return j;
}

json run_view(const ChainRun& run) {
    auto j = to_json(run);
    j["cursor"] = run.cursor();
    return j;
}

bool is_png(const Bytes& b) { return b.size() >= 8 && b[0] == 0x89 && b[1] == 'P' && b[2] == 'N' && b[3] == 'G'; }

}  // namespace

struct Service::Impl {
    explicit Impl(ServiceOptions o) : opts(std::move(o)), store(opts.config.store_root) {}

    ServiceOptions opts;
    RunStore store;
    httplib::Server server;
    std::atomic<bool> stopping{false};
    std::atomic<bool> serving{false};
    std::atomic<bool> served{false};
    bool bound = false;

    std::mutex slots_mu;
    std::map<std::string, std::shared_ptr<Slot>> slots;

    std::mutex backends_mu;
    std::map<std::string, Backends> backends;

    std::shared_ptr<Slot> slot(const std::string& id) {
        std::lock_guard lk(slots_mu);
        auto& s = slots[id];
        if (!s) s = std::make_shared<Slot>();
        return s;
    }

    Backends backends_for(const std::string& profile) {
        std::lock_guard lk(backends_mu);
        auto it = backends.find(profile);
        if (it == backends.end()) it = backends.emplace(profile, make_backends(find_profile(opts.config, profile))).first;
        return it->second;
    }

    Executor executor_for(const std::string& profile, const std::shared_ptr<Slot>& s = nullptr) {
        ExecutorOptions eo;
        eo.clock = opts.clock;
        if (s) eo.on_event = [s](const StepEvent&) { s->notify(); };
        return Executor(store, backends_for(profile).image, profile, eo);
    }

    // Caller holds s->mu.
    void spawn(const std::string& id, const std::shared_ptr<Slot>& s) {
        if (stopping || s->active) return;
        if (s->worker.joinable()) s->worker.join();
        s->active = true;
        s->worker = std::thread([this, id, s] { work(id, s); });
    }

    void work(const std::string& id, const std::shared_ptr<Slot>& s) {
        for (;;) {
            {
                std::unique_lock lk(s->mu);
                bool done = true;
                if (!stopping) {
                    try {
                        auto run = store.load_run(id);
                        const int n = static_cast<int>(run.plan.steps.size());
                        if (run.status == RunStatus::running) {
                            if (run.cursor() >= n) {
                                run.status = RunStatus::completed;
                                store.save_run(run);
                            } else if (!run.has_failed_tail()) {
                                auto ex = executor_for(run.backend_profile, s);
                                const auto rec = ex.advance(run);
                                done = rec.status != StepStatus::succeeded || run.status != RunStatus::running;
                                if (!done && run.step_wise) {
                                    run.status = RunStatus::paused;
                                    store.save_run(run);
                                    done = true;
                                }
                            }
                        }
                    } catch (const std::exception& e) {
                        std::cerr << "run " << id << ": " << e.what() << "\n";
                    }
                }
                if (done) {
                    s->active = false;
                    break;
                }
            }
            s->notify();
        }
        s->notify();
    }

    template <typename Fn>
    void guarded(httplib::Response& res, Fn fn) {
        try {
            fn();
        } catch (const PlanInvalid& e) {
            json vs = json::array();
            for (const auto& v : e.violations()) vs.push_back(to_json(v));
            send_error(res, ApiCode::invalid_input, e.what(), {{"violations", vs}});
        } catch (const Error& e) {
            send_error(res, api_code_of(e.code()), e.what(), {{"error", std::string(errc_name(e.code()))}});
        } catch (const json::exception& e) {
            send_error(res, ApiCode::invalid_input, std::string("malformed document: ") + e.what());
        } catch (const std::exception& e) {
            send_error(res, ApiCode::internal, e.what());
        }
    }

    void routes() {
        server.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
            if (!opts.bearer_token || req.path == "/healthz") return httplib::Server::HandlerResponse::Unhandled;
            if (req.get_header_value("Authorization") == "Bearer " + *opts.bearer_token) {
                return httplib::Server::HandlerResponse::Unhandled;
            }
            send_error(res, ApiCode::unauthorized, "missing or wrong bearer token");
            return httplib::Server::HandlerResponse::Handled;
        });

        server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, {{"status", "ok"}});
        });

        server.Post("/runs", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const auto body = parse_body(req);
                const auto profile = body.value("profile", opts.config.default_profile);
                find_profile(opts.config, profile);
                const bool step_wise = body.value("step_wise", false);
                ChainPlan plan;
                if (body.contains("plan")) {
                    plan = plan_from_json(body.at("plan"));
                } else if (body.contains("prompt")) {
                    DecomposeOptions d;
                    d.clock = opts.clock;
                    plan = decompose(body.at("prompt").get<std::string>(), *backends_for(profile).text, d);
                } else {
                    throw Error(Errc::schema_error, "body needs 'plan' or 'prompt'");
                }
                auto ex = executor_for(profile);
                auto run = ex.create_run(std::move(plan), step_wise);
                const auto s = slot(run.run_id);
                std::lock_guard lk(s->mu);
                run.status = RunStatus::running;
                store.save_run(run);
                spawn(run.run_id, s);
                send_json(res, 201, {{"run_id", run.run_id}, {"run", run_view(run)}});
            });
        });

        server.Get("/runs", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                std::optional<RunStatus> filter;
                if (req.has_param("status")) filter = parse_run_status(req.get_param_value("status"));
                json runs = json::array();
                for (const auto& s : store.list_runs(filter)) runs.push_back(to_json(s));
                send_json(res, 200, {{"runs", std::move(runs)}});
            });
        });

        server.Get(R"(/runs/([A-Za-z0-9_-]+))", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { send_json(res, 200, run_view(store.load_run(req.matches[1]))); });
        });

        server.Get(R"(/runs/([A-Za-z0-9_-]+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const std::string id = req.matches[1];
                store.load_run(id);
                std::size_t next = 0;
                if (req.has_param("since")) next = std::stoul(req.get_param_value("since"));
                else if (req.has_header("Last-Event-ID")) next = std::stoul(req.get_header_value("Last-Event-ID")) + 1;
                const auto s = slot(id);
                auto cursor = std::make_shared<std::size_t>(next);
                res.set_header("Cache-Control", "no-cache");
                res.set_chunked_content_provider(
                    "text/event-stream", [this, id, s, cursor](std::size_t, httplib::DataSink& sink) {
                        std::uint64_t seen;
                        {
                            std::lock_guard lk(s->ev_mu);
                            seen = s->version;
                        }
                        ChainRun run;
                        try {
                            run = store.load_run(id);
                        } catch (const std::exception& e) {
                            const auto msg = "event: error\ndata: " + canonical_dump({{"message", e.what()}}) + "\n\n";
                            sink.write(msg.data(), msg.size());
                            sink.done();
                            return true;
                        }
                        for (const auto& e : events_of(run)) {
                            if (e.seq < *cursor) continue;
                            const auto msg = "id: " + std::to_string(e.seq) + "\nevent: step\ndata: " +
                                             canonical_dump(to_json(e)) + "\n\n";
                            if (!sink.write(msg.data(), msg.size())) return false;
                            *cursor = e.seq + 1;
                        }
                        const bool live = run.status == RunStatus::running && !stopping;
                        if (!live) {
                            const auto msg = "event: end\ndata: " +
                                             canonical_dump({{"status", std::string(run_status_name(run.status))}}) +
                                             "\n\n";
                            sink.write(msg.data(), msg.size());
                            sink.done();
                            return true;
                        }
                        std::unique_lock lk(s->ev_mu);
                        s->cv.wait_for(lk, std::chrono::milliseconds(250), [&] { return s->version != seen; });
                        return sink.is_writable();
                    });
            });
        });

        server.Get(R"(/artifacts/([0-9a-f]{64})(\.png)?)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const std::string id = req.matches[1];
                const bool want_png = req.matches[2].length() > 0;
                auto bytes = store.load_blob(id);
                std::string type = is_png(bytes) ? "image/png" : "application/json";
                if (want_png && !is_png(bytes)) {
                    bytes = raster::render(parse_scene(to_string(bytes))).bytes;
                    type = "image/png";
                }
                res.set_header("Cache-Control", "public, max-age=31536000, immutable");
                res.set_header("ETag", "\"" + id + (want_png ? ".png" : "") + "\"");
                res.set_content(to_string(bytes), type);
            });
        });

        server.Post(R"(/runs/([A-Za-z0-9_-]+)/pause)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const std::string id = req.matches[1];
                const auto s = slot(id);
                std::lock_guard lk(s->mu);
                auto run = store.load_run(id);
                executor_for(run.backend_profile, s).pause(run);
                s->notify();
                send_json(res, 200, run_view(run));
            });
        });

        server.Post(R"(/runs/([A-Za-z0-9_-]+)/resume)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const std::string id = req.matches[1];
                const auto s = slot(id);
                std::lock_guard lk(s->mu);
                auto run = store.load_run(id);
                if (run.status == RunStatus::running) throw Error(Errc::run_not_paused, "run is already running");
                executor_for(run.backend_profile, s).resume(run);
                if (run.status == RunStatus::running) spawn(id, s);
                s->notify();
                send_json(res, 200, run_view(run));
            });
        });

        server.Post(R"(/runs/([A-Za-z0-9_-]+)/interventions)",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        guarded(res, [&] {
                            const std::string id = req.matches[1];
                            auto iv = intervention_from_json(parse_body(req));
                            const auto s = slot(id);
                            std::lock_guard lk(s->mu);
                            auto run = store.load_run(id);
                            executor_for(run.backend_profile, s).apply_intervention(run, std::move(iv));
                            s->notify();
                            send_json(res, 200, run_view(run));
                        });
                    });

        server.Post(R"(/runs/([A-Za-z0-9_-]+)/eval/readability)",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        guarded(res, [&] {
                            const std::string id = req.matches[1];
                            const auto run = store.load_run(id);
                            const auto vision = backends_for(run.backend_profile).vision;
                            const auto report = eval::readability_workflow(run, *vision, store);
                            send_json(res, 200, eval::to_json(report));
                        });
                    });

        server.Post(R"(/runs/([A-Za-z0-9_-]+)/eval/causal)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const std::string id = req.matches[1];
                const auto body = parse_body(req);
                const auto orig = store.load_run(id);
                const auto spec = eval::perturbation_from_json(body);
                auto ex = executor_for(orig.backend_profile);
                const auto vision = backends_for(orig.backend_profile).vision;
                const auto c = eval::causal_workflow(ex, orig, spec, *vision);
                const auto s = slot(id);
                std::lock_guard lk(s->mu);
                send_json(res, 200, eval::to_json(eval::record_causal_case(store, id, c)));
            });
        });

        server.Get(R"(/reports/([A-Za-z0-9_-]+)/([A-Za-z0-9_-]+))",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       guarded(res, [&] { send_json(res, 200, store.load_report(req.matches[1], req.matches[2])); });
                   });

        server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (res.body.empty() && res.status == 404) send_error(res, ApiCode::not_found, "no such endpoint");
        });
    }

    void resume_running() {
        for (const auto& summary : store.list_runs(RunStatus::running)) {
            const auto s = slot(summary.run_id);
            std::lock_guard lk(s->mu);
            spawn(summary.run_id, s);
        }
    }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) { impl_->routes(); }

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
    // No SO_REUSEPORT: a second service on the same port must fail.
    impl_->server.set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound <= 0) throw Error(Errc::bind_error, "cannot bind " + host + ":" + std::to_string(port));
    impl_->bound = true;
    return bound;
}

void Service::serve() {
    if (!impl_->bound) throw Error(Errc::bind_error, "serve() before bind()");
    // Paired with stop(): either serve() sees stopping or stop() sees serving.
    impl_->serving = true;
    struct Done {
        std::atomic<bool>& flag;
        ~Done() { flag = true; }
    } done{impl_->served};
    if (impl_->stopping) return;
    impl_->resume_running();
    impl_->server.listen_after_bind();
}

void Service::stop() {
    if (!impl_ || impl_->stopping.exchange(true)) return;
    if (impl_->serving) {
        while (!impl_->server.is_running() && !impl_->served) std::this_thread::sleep_for(std::chrono::milliseconds(1));
        impl_->server.stop();
    }
    std::map<std::string, std::shared_ptr<Slot>> slots;
    {
        std::lock_guard lk(impl_->slots_mu);
        slots = impl_->slots;
    }
    for (auto& [_, s] : slots) {
        std::thread worker;
        {
            std::lock_guard lk(s->mu);
            worker = std::move(s->worker);
        }
        s->notify();
        if (worker.joinable()) worker.join();
    }
}

}  // namespace coig
