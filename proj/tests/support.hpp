// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

// Fixtures and hand-rolled generators shared by the unit and acceptance tests.

#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "coig/backends.hpp"
#include "coig/caption.hpp"
#include "coig/config.hpp"
#include "coig/executor.hpp"
#include "coig/plan.hpp"
#include "coig/runstore.hpp"
#include "coig/util.hpp"

namespace coig::testing {

/// Fresh directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> n{0};
        path_ = std::filesystem::temp_directory_path() /
                ("coig-test-" + std::to_string(::getpid()) + "-" + std::to_string(n++) + "-" + random_id().substr(0, 8));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Deterministic clock ticking 1 ms per call.
inline Clock counting_clock(Timestamp start = 1'700'000'000'000) {
    auto t = std::make_shared<std::atomic<Timestamp>>(start);
    return [t] { return (*t)++; };
}

inline std::shared_ptr<MockBackend> mock(MockFault fault = MockFault::none) {
    BackendProfile p;
    p.fault = fault;
    return std::static_pointer_cast<MockBackend>(make_backends(p).image);
}

/// Image model wrapper that fails selected calls.
class FlakyImageModel final : public ImageModel {
public:
    using Fault = std::function<void(int call)>;  // throws to fail call #call (1-based)
    FlakyImageModel(std::shared_ptr<ImageModel> inner, Fault fault) : inner_(std::move(inner)), fault_(std::move(fault)) {}
    std::string name() const override { return "flaky"; }
    int calls() const { return calls_; }

protected:
    ImageArtifact do_generate(const std::string& prompt) override {
        fault_(++calls_);
        return inner_->generate(prompt);
    }
    ImageArtifact do_edit(const ImageArtifact& image, const std::string& prompt) override {
        fault_(++calls_);
        return inner_->edit(image, prompt);
    }

private:
    std::shared_ptr<ImageModel> inner_;
    Fault fault_;
    int calls_ = 0;
};

// Generators ----------------------------------------------------------------

inline const std::vector<std::string>& object_classes() {
    static const std::vector<std::string> v{"apple", "bowl", "cup", "book", "chair", "lamp", "vase",
                                            "clock", "hat", "ball", "kite", "bottle", "pillow", "mug"};
    return v;
}

inline const std::vector<std::string>& shape_words() {
    static const std::vector<std::string> v{"round", "square", "triangular", "oval", "cubic", "tall"};
    return v;
}

inline const std::vector<std::string>& texture_words() {
    static const std::vector<std::string> v{"glossy", "metallic", "wooden", "fluffy", "leather", "ceramic"};
    return v;
}

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
    return v[uniform_index(rng, v.size())];
}

struct CaptionOptions {
    std::size_t min_entities = 1;
    std::size_t max_entities = 4;
    bool always_color = true;
    double shape_p = 0.4;
    double texture_p = 0.4;
    double background_p = 0.5;
};

/// "a red glossy apple, a blue bowl and a green cup on a table": distinct
/// classes, every entity colored by default.
inline std::string random_caption(std::mt19937_64& rng, const CaptionOptions& o = {}) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const auto n = o.min_entities + uniform_index(rng, o.max_entities - o.min_entities + 1);
    auto classes = object_classes();
    std::shuffle(classes.begin(), classes.end(), rng);
    std::vector<std::string> phrases;
    for (std::size_t i = 0; i < n; ++i) {
        std::string p = "a ";
        if (o.always_color || coin(rng) < 0.5) p += pick(rng, caption::color_vocabulary()) + " ";
        if (coin(rng) < o.shape_p) p += pick(rng, shape_words()) + " ";
        if (coin(rng) < o.texture_p) p += pick(rng, texture_words()) + " ";
        phrases.push_back(p + classes[i]);
    }
    std::string text;
    for (std::size_t i = 0; i < phrases.size(); ++i) {
        if (i) text += i + 1 == phrases.size() ? " and " : ", ";
        text += phrases[i];
    }
    if (coin(rng) < o.background_p) text += " on a " + pick(rng, std::vector<std::string>{"table", "beach", "shelf"});
    return text;
}

/// Template plan for a random caption.
inline ChainPlan random_plan(std::mt19937_64& rng, const CaptionOptions& o = {}) {
    const auto text = random_caption(rng, o);
    const auto parsed = caption::parse(text);
    if (!parsed) throw std::logic_error("generator produced an unparseable caption: " + text);
    return caption::template_plan(text, *parsed);
}

/// A run in a random lifecycle state: partially or fully executed, possibly
/// with a pause, a correction insert or a rerun applied.
inline ChainRun random_run(std::mt19937_64& rng, Executor& ex) {
    auto run = ex.start_run(random_plan(rng), true);
    const int n = static_cast<int>(run.plan.steps.size());
    const int upto = 1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n)));
    while (run.cursor() < upto) ex.advance(run);
    switch (uniform_index(rng, 4)) {
        case 0: break;
        case 1: ex.pause(run); break;
        case 2: {
            ex.pause(run);
            Intervention iv;
            iv.kind = InterventionKind::insert_step;
            iv.at_index = n + 1;
            PlanStep fix;
            fix.kind = StepKind::correction;
            fix.final_goal = run.plan.original_prompt;
            fix.step_action = "Detail e1: texture=matte";
            fix.target_entity = "e1";
            iv.payload = fix;
            iv.applied_at = ex.now();
            ex.apply_intervention(run, iv);
            ex.run_to_completion(run);
            break;
        }
        default: {
            ex.pause(run);
            Intervention iv;
            iv.kind = InterventionKind::rerun_from;
            iv.at_index = 1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(run.cursor())));
            iv.applied_at = ex.now();
            ex.apply_intervention(run, iv);
            ex.advance(run);
            break;
        }
    }
    return run;
}

struct KillHarnessResult {
    int rounds = 0;
    int torn = 0;            // manifest present but unreadable
    int foreign = 0;         // readable but not a version that was ever written
    int killed_mid_run = 0;  // child still running when killed
};

/// Forks a writer that rewrites the run's manifest in a loop with growing
/// versions, SIGKILLs it after a random delay, and checks what is left.
inline KillHarnessResult kill_during_save(RunStore& store, const ChainRun& base, int rounds, std::mt19937_64& rng) {
    KillHarnessResult out;
    // Large manifests widen the window in which a kill lands mid-write.
    auto big = base;
    big.plan.original_prompt = std::string(256 * 1024, 'x');
    store.save_run(big);
    for (int r = 0; r < rounds; ++r) {
        const pid_t pid = ::fork();
        if (pid == 0) {
            auto v = big;
            for (int i = 0;; ++i) {
                v.backend_profile = "v" + std::to_string(r) + "-" + std::to_string(i);
                try {
                    store.save_run(v);
                } catch (...) {
                    ::_exit(3);
                }
            }
        }
        const auto delay_us = 200 + uniform_index(rng, 20000);
        ::usleep(static_cast<useconds_t>(delay_us));
        int status = 0;
        if (::waitpid(pid, &status, WNOHANG) == 0) ++out.killed_mid_run;
        ::kill(pid, SIGKILL);
        ::waitpid(pid, &status, 0);
        ++out.rounds;
        try {
            auto got = store.load_run(base.run_id);
            const bool ours = got.backend_profile == base.backend_profile ||
                              got.backend_profile.rfind("v", 0) == 0;
            got.backend_profile = big.backend_profile;
            if (!ours || got != big) ++out.foreign;
        } catch (const Error&) {
            ++out.torn;
        }
    }
    return out;
}

}  // namespace coig::testing
