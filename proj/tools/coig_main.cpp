// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

// coig: plan, run, steer and evaluate image-generation chains.
//
// Exit status: 0 success, 1 operation failure, 2 usage error.

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <signal.h>
#include <unistd.h>

#include <CLI11.hpp>

#include "coig/bench.hpp"
#include "coig/config.hpp"
#include "coig/eval.hpp"
#include "coig/executor.hpp"
#include "coig/runstore.hpp"
#include "coig/service.hpp"

namespace fs = std::filesystem;
using namespace coig;

namespace {

struct Globals {
    bool json = false;
    std::string config;
    std::string store;
};

// Writes either the canonical document (--json) or the human text.
void emit(const Globals& g, const json& doc, const std::string& human) {
    if (g.json) std::cout << canonical_dump(doc) << "\n";
    else std::cout << human;
}

CliConfig config_of(const Globals& g) {
    return load_config(g.config.empty() ? std::nullopt : std::optional<fs::path>(g.config),
                       g.store.empty() ? std::nullopt : std::optional<fs::path>(g.store));
}

std::string run_line(const ChainRun& run) {
    return run.run_id + " " + std::string(run_status_name(run.status)) + " (" + std::to_string(run.cursor()) + "/" +
           std::to_string(run.plan.steps.size()) + " steps)\n";
}

json run_doc(const ChainRun& run) {
    auto j = to_json(run);
    j["cursor"] = run.cursor();
    return j;
}

std::string plan_text(const ChainPlan& plan) {
    std::string out = "prompt: " + plan.original_prompt + "\n";
    for (const auto& s : plan.steps) {
        out += std::to_string(s.index) + ". [" + std::string(step_kind_name(s.kind)) + "] " + s.step_action + "\n";
    }
    return out;
}

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
    return buf;
}

// Operation failures surface here; a failed or stalled run is one too.
int finish_run(const Globals& g, const ChainRun& run) {
    emit(g, run_doc(run), run_line(run));
    if (run.status == RunStatus::failed || run.has_failed_tail()) {
        const auto* r = run.current(run.cursor() + 1);
        std::cerr << "error: step " << run.cursor() + 1 << " failed"
                  << (r && r->error ? ": " + *r->error : std::string()) << "\n";
        return 1;
    }
    return 0;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::not_found, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chain-of-image-generation engine: plan, run, steer and evaluate monitorable generation chains."};
    app.failure_message(CLI::FailureMessage::help);
    app.require_subcommand(1);

    Globals g;
    app.add_flag("--json", g.json, "Emit one canonical JSON document on stdout");
    app.add_option("--config", g.config, "Config file (default: $COIG_CONFIG, then ./coig.json)");
    app.add_option("--store", g.store, "Store root (default: $COIG_STORE, then the config value)");

    std::function<int()> action;

    // plan
    auto* plan_cmd = app.add_subcommand("plan", "Decompose a caption into a step plan");
    std::string plan_prompt, plan_profile, plan_out;
    plan_cmd->add_option("prompt", plan_prompt, "Caption")->required();
    plan_cmd->add_option("--profile", plan_profile, "Backend profile");
    plan_cmd->add_option("--out", plan_out, "Write the plan file here");
    plan_cmd->callback([&] {
        action = [&] {
            const auto cfg = config_of(g);
            const auto backends = make_backends(find_profile(cfg, plan_profile.empty() ? cfg.default_profile : plan_profile));
            const auto plan = decompose(plan_prompt, *backends.text);
            if (!plan_out.empty()) write_file_atomic(plan_out, serialize_plan(plan) + "\n");
            emit(g, to_json(plan), plan_text(plan));
            return 0;
        };
    });

    // run
    auto* run_cmd = app.add_subcommand("run", "Execute a plan file or a caption");
    std::string run_input, run_profile;
    bool run_step = false;
    run_cmd->add_option("input", run_input, "Plan file or caption")->required();
    run_cmd->add_option("--profile", run_profile, "Backend profile");
    run_cmd->add_flag("--step", run_step, "Step-wise: pause after every step");
    run_cmd->callback([&] {
        action = [&] {
            const auto cfg = config_of(g);
            const auto profile = run_profile.empty() ? cfg.default_profile : run_profile;
            const auto backends = make_backends(find_profile(cfg, profile));
            RunStore store(cfg.store_root);
            const bool is_file = fs::is_regular_file(run_input);
            auto plan = is_file ? parse_plan(read_text(run_input)) : decompose(run_input, *backends.text);
            Executor ex(store, backends.image, profile);
            auto run = ex.start_run(std::move(plan), run_step);
            if (run.status == RunStatus::running) ex.run_to_completion(run);
            return finish_run(g, run);
        };
    });

    // resume
    auto* resume_cmd = app.add_subcommand("resume", "Continue a paused or failed run");
    std::string resume_id;
    resume_cmd->add_option("run_id", resume_id)->required();
    resume_cmd->callback([&] {
        action = [&] {
            const auto cfg = config_of(g);
            RunStore store(cfg.store_root);
            auto run = store.load_run(resume_id);
            Executor ex(store, make_backends(find_profile(cfg, run.backend_profile)).image, run.backend_profile);
            ex.resume(run);
            if (run.status == RunStatus::running) ex.run_to_completion(run);
            return finish_run(g, run);
        };
    });

    // pause
    auto* pause_cmd = app.add_subcommand("pause", "Pause a run so it can be edited");
    std::string pause_id;
    pause_cmd->add_option("run_id", pause_id)->required();
    pause_cmd->callback([&] {
        action = [&] {
            const auto cfg = config_of(g);
            RunStore store(cfg.store_root);
            auto run = store.load_run(pause_id);
            Executor ex(store, nullptr, run.backend_profile);
            ex.pause(run);
            emit(g, run_doc(run), run_line(run));
            return 0;
        };
    });

    // intervene
    auto* iv_cmd = app.add_subcommand("intervene", "Edit, insert, delete or rerun plan steps of a paused run");
    std::string iv_id, iv_kind, iv_action, iv_step_kind, iv_target, iv_payload;
    int iv_at = 0;
    bool iv_pause = false;
    iv_cmd->add_option("run_id", iv_id)->required();
    iv_cmd->add_option("--kind", iv_kind, "edit_step | insert_step | delete_step | rerun_from")
        ->required()
        ->check(CLI::IsMember({"edit_step", "insert_step", "delete_step", "rerun_from"}));
    iv_cmd->add_option("--at", iv_at, "1-based step index")->required();
    iv_cmd->add_option("--action", iv_action, "Step action for edit/insert");
    iv_cmd->add_option("--step-kind", iv_step_kind, "Step kind for edit/insert (default: keep, or entity_detail)");
    iv_cmd->add_option("--target", iv_target, "Target entity id");
    iv_cmd->add_option("--payload", iv_payload, "PlanStep JSON file instead of --action");
    iv_cmd->add_flag("--pause", iv_pause, "Pause the run first");
    iv_cmd->callback([&] {
        action = [&] {
            const auto cfg = config_of(g);
            RunStore store(cfg.store_root);
            auto run = store.load_run(iv_id);
            Executor ex(store, make_backends(find_profile(cfg, run.backend_profile)).image, run.backend_profile);
            if (iv_pause) ex.pause(run);
            Intervention iv;
            iv.kind = parse_intervention_kind(iv_kind);
            iv.at_index = iv_at;
            iv.author = Author::human;
            if (!iv_payload.empty()) {
                iv.payload = plan_step_from_json(json::parse(read_text(iv_payload)));
            } else if (!iv_action.empty()) {
                PlanStep s;
                s.kind = StepKind::entity_detail;
                if (iv.kind == InterventionKind::edit_step && iv_at >= 1 && iv_at <= static_cast<int>(run.plan.steps.size())) {
                    s = run.plan.steps[static_cast<std::size_t>(iv_at - 1)];
                }
                s.step_action = iv_action;
                s.final_goal.clear();
                if (!iv_step_kind.empty()) s.kind = parse_step_kind(iv_step_kind);
                if (!iv_target.empty()) s.target_entity = iv_target;
                iv.payload = s;
            }
            ex.apply_intervention(run, std::move(iv));
            emit(g, run_doc(run), run_line(run) + plan_text(run.plan));
            return 0;
        };
    });

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Readability and causal-relevance evaluation");
    eval_cmd->require_subcommand(1);
    auto* read_cmd = eval_cmd->add_subcommand("readability", "Before/after QA per detail step");
    std::string read_id;
    read_cmd->add_option("run_id", read_id)->required();
    read_cmd->callback([&] {
        action = [&] {
            const auto cfg = config_of(g);
            RunStore store(cfg.store_root);
            const auto run = store.load_run(read_id);
            const auto backends = make_backends(find_profile(cfg, run.backend_profile));
            const auto report = eval::readability_workflow(run, *backends.vision, store);
            std::string human = "kind      probes  before   after\n";
            for (const auto& [k, a] : report.by_kind) {
                char line[96];
                std::snprintf(line, sizeof line, "%-9s %6zu  %6s  %6s\n", k.c_str(), a.count, percent(a.before).c_str(),
                              percent(a.after).c_str());
                human += line;
            }
            emit(g, eval::to_json(report), human);
            return 0;
        };
    });
    auto* causal_cmd = eval_cmd->add_subcommand("causal", "Perturb one step's color and check persistence");
    std::string causal_id, causal_to;
    int causal_step = 0;
    causal_cmd->add_option("run_id", causal_id)->required();
    causal_cmd->add_option("--step", causal_step, "Step to perturb")->required();
    causal_cmd->add_option("--to", causal_to, "New color")->required();
    causal_cmd->callback([&] {
        action = [&] {
            const auto cfg = config_of(g);
            RunStore store(cfg.store_root);
            const auto run = store.load_run(causal_id);
            const auto backends = make_backends(find_profile(cfg, run.backend_profile));
            Executor ex(store, backends.image, run.backend_profile);
            eval::PerturbationSpec spec;
            spec.step_index = causal_step;
            spec.perturbed_value = causal_to;
            const auto c = eval::causal_workflow(ex, run, spec, *backends.vision);
            const auto report = eval::record_causal_case(store, run.run_id, c);
            const auto human = "perturbed run " + c.pert_run_id + ": unperturbed_final " + percent(c.u_final) +
                               ", at_step " + percent(c.at_step) + ", perturbed_final " + percent(c.p_final) + "\n";
            emit(g, eval::to_json(report), human);
            return 0;
        };
    });

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Benchmark generation and scoring");
    bench_cmd->require_subcommand(1);
    auto* gen_cmd = bench_cmd->add_subcommand("ec-gen", "Generate Entity Collapse prompts (JSONL)");
    int gen_count = 300;
    std::optional<std::uint64_t> gen_seed;
    std::string gen_out, gen_vocab;
    gen_cmd->add_option("--count", gen_count, "Number of prompts")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--seed", gen_seed, "Seed (default: config seed)");
    gen_cmd->add_option("--out", gen_out, "Output file (default: stdout)");
    gen_cmd->add_option("--vocab", gen_vocab, "Directory with jobs.txt, attributes.txt, interactions.txt");
    gen_cmd->callback([&] {
        action = [&] {
            const auto cfg = config_of(g);
            const auto vocab = gen_vocab.empty() ? bench::ECVocab::defaults() : bench::load_vocab(gen_vocab);
            const auto prompts = bench::generate_ec_prompts(vocab, gen_count, gen_seed.value_or(cfg.seed));
            const auto body = bench::to_jsonl(prompts);
            if (gen_out.empty()) {
                if (g.json) {
                    json all = json::array();
                    for (const auto& p : prompts) all.push_back(bench::to_json(p));
                    std::cout << canonical_dump({{"prompts", all}}) << "\n";
                } else {
                    std::cout << body;
                }
            } else {
                write_file_atomic(gen_out, body);
                emit(g, {{"count", prompts.size()}, {"path", gen_out}},
                     "wrote " + std::to_string(prompts.size()) + " prompts to " + gen_out + "\n");
            }
            return 0;
        };
    });
    auto* brun_cmd = bench_cmd->add_subcommand("run", "Run a benchmark suite");
    std::string b_suite, b_pipeline, b_prompts, b_profile, b_fault, b_style = "compbench_style", b_out;
    std::size_t b_threads = 1;
    brun_cmd->add_option("--suite", b_suite, "ec | qa")->required()->check(CLI::IsMember({"ec", "qa"}));
    brun_cmd->add_option("--pipeline", b_pipeline, "coig | single_pass")
        ->required()
        ->check(CLI::IsMember({"coig", "single_pass"}));
    brun_cmd->add_option("--prompts", b_prompts, "Prompt file (JSONL)")->required();
    brun_cmd->add_option("--style", b_style, "QA record style: geneval_style | compbench_style | conceptmix_style");
    brun_cmd->add_option("--profile", b_profile, "Backend profile");
    brun_cmd->add_option("--fault", b_fault, "Mock fault injection: none | merge")
        ->check(CLI::IsMember({"none", "merge"}));
    brun_cmd->add_option("--threads", b_threads, "Prompts processed in parallel")->check(CLI::PositiveNumber);
    brun_cmd->add_option("--out", b_out, "Write <out>.json and <out>.csv");
    brun_cmd->callback([&] {
        action = [&] {
            const auto cfg = config_of(g);
            auto profile = find_profile(cfg, b_profile.empty() ? cfg.default_profile : b_profile);
            if (!b_fault.empty()) {
                if (profile.kind != BackendProfile::Kind::mock) {
                    throw Error(Errc::config_error, "--fault applies to mock profiles only");
                }
                profile.fault = parse_mock_fault(b_fault);
            }
            RunStore store(cfg.store_root);
            bench::PipelineContext ctx;
            ctx.backends = make_backends(profile);
            ctx.store = &store;
            ctx.profile = b_profile.empty() ? cfg.default_profile : b_profile;
            ctx.threads = b_threads;
            const auto pipeline = bench::parse_pipeline(b_pipeline);
            const auto body = read_text(b_prompts);
            json doc;
            std::string csv;
            if (b_suite == "ec") {
                const auto card = bench::run_ec_benchmark(bench::parse_ec_prompts(body), pipeline, ctx);
                doc = bench::to_json(card);
                csv = bench::table_csv({card});
            } else {
                const auto style = bench::parse_qa_style(b_style);
                const auto card = bench::run_qa_benchmark(bench::load_qa_records(body, style), style, pipeline, ctx);
                doc = bench::to_json(card);
                csv = bench::table_csv(card);
            }
            if (!b_out.empty()) {
                write_file_atomic(b_out + ".json", canonical_dump(doc) + "\n");
                write_file_atomic(b_out + ".csv", csv);
            }
            emit(g, doc, csv);
            return doc.value("failed", 0) > 0 ? 1 : 0;
        };
    });

    // serve
    auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
    std::string s_host = "127.0.0.1", s_token_env = "COIG_SERVICE_TOKEN";
    int s_port = 8080;
    serve_cmd->add_option("--host", s_host, "Bind address");
    serve_cmd->add_option("--port", s_port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--token-env", s_token_env, "Env var holding the bearer token; unset disables auth");
    serve_cmd->callback([&] {
        action = [&] {
            ServiceOptions opts;
            opts.config = config_of(g);
            if (const char* t = std::getenv(s_token_env.c_str()); t && *t) opts.bearer_token = t;

            sigset_t signals;
            sigemptyset(&signals);
            sigaddset(&signals, SIGINT);
            sigaddset(&signals, SIGTERM);
            pthread_sigmask(SIG_BLOCK, &signals, nullptr);

            Service service(std::move(opts));
            const int port = service.bind(s_host, s_port);
            std::cerr << "listening on http://" << s_host << ":" << port << "\n";
            std::thread waiter([&] {
                int sig = 0;
                sigwait(&signals, &sig);
                service.stop();
            });
            service.serve();
            // serve() also returns on listener failure; wake the waiter.
            ::kill(::getpid(), SIGTERM);
            waiter.join();
            emit(g, {{"status", "stopped"}, {"port", port}}, "");
            return 0;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        return action();
    } catch (const Error& e) {
        if (g.json) {
            std::cout << canonical_dump({{"error", {{"code", std::string(errc_name(e.code()))}, {"message", e.what()}}}})
                      << "\n";
        }
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        if (g.json) std::cout << canonical_dump({{"error", {{"code", "internal"}, {"message", e.what()}}}}) << "\n";
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
