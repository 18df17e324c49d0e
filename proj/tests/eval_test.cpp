// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "coig/caption.hpp"
#include "coig/eval.hpp"
#include "support.hpp"

namespace coig {
namespace {

using testing::TempDir;

const std::string kCaption = "a red round apple and a blue glossy bowl on a table";

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no coig::Error thrown";
    return Errc::precondition_violated;
}

struct EvalFixture : ::testing::Test {
    TempDir dir;
    RunStore store{dir.path()};
    std::shared_ptr<MockBackend> mock = testing::mock();
    ExecutorOptions opts() {
        ExecutorOptions o;
        o.clock = testing::counting_clock();
        return o;
    }
    Executor ex{store, mock, "mock", opts()};

    ChainRun completed(const std::string& caption) {
        auto run = ex.start_run(caption::template_plan(caption, *caption::parse(caption)));
        ex.run_to_completion(run);
        return run;
    }
};

TEST_F(EvalFixture, ProbesCoverDetailFields) {
    const auto plan = caption::template_plan(kCaption, *caption::parse(kCaption));
    const auto probes = eval::build_probes(plan);
    ASSERT_EQ(probes.size(), 4u);
    EXPECT_EQ(probes[0].step_index, 2);
    EXPECT_EQ(probes[0].object_class, "apple");
    EXPECT_EQ(probes[0].attribute_kind, qa::AttributeKind::color);
    EXPECT_EQ(probes[0].question, "Is the apple present? Is it red in color?");
    EXPECT_EQ(probes[1].attribute_kind, qa::AttributeKind::shape);
    EXPECT_EQ(probes[3].attribute_kind, qa::AttributeKind::texture);
    EXPECT_EQ(probes[3].target_entity, "e2");
}

TEST_F(EvalFixture, ReadabilityBeforeZeroAfterOne) {
    const auto run = completed(kCaption);
    const auto report = eval::readability_workflow(run, *mock, store);
    ASSERT_EQ(report.probes.size(), 4u);
    for (const auto& p : report.probes) {
        EXPECT_EQ(p.before, 0.0) << p.probe.question;
        EXPECT_EQ(p.after, 1.0) << p.probe.question;
        EXPECT_FALSE(p.flagged);
    }
    EXPECT_EQ(report.by_kind.at("color").count, 2u);
    EXPECT_EQ(report.overall.after, 1.0);
    const auto stored = store.load_report(run.run_id, "readability");
    EXPECT_EQ(stored, eval::to_json(report));
    const auto csv = eval::to_csv(report);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "probe_id,attribute_kind,before,after");
}

TEST_F(EvalFixture, ReadabilityNeedsExecutedSteps) {
    auto run = ex.start_run(caption::template_plan(kCaption, *caption::parse(kCaption)), true);
    EXPECT_EQ(code_of([&] { eval::readability_workflow(run, *mock, store); }), Errc::missing_artifact);
}

TEST_F(EvalFixture, PerturbationRules) {
    const auto plan = caption::template_plan(kCaption, *caption::parse(kCaption));
    const auto spec = eval::perturbation_at(plan, 2, "green");
    EXPECT_EQ(spec.original_value, "red");
    const auto pert = eval::make_perturbation(plan, spec);
    EXPECT_EQ(pert.steps[1].step_action, "Detail e1 (apple): color=green, shape=round");
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        if (i != 1) {
            EXPECT_EQ(pert.steps[i], plan.steps[i]);
        }
    }
    EXPECT_EQ(code_of([&] { eval::perturbation_at(plan, 4, "green"); }), Errc::field_absent);
    EXPECT_EQ(code_of([&] { eval::perturbation_at(plan, 9, "green"); }), Errc::field_absent);
    EXPECT_EQ(code_of([&] { eval::make_perturbation(plan, eval::perturbation_at(plan, 2, "gray")); }),
              Errc::gray_forbidden);
    EXPECT_EQ(code_of([&] { eval::make_perturbation(plan, eval::perturbation_at(plan, 2, "red")); }),
              Errc::spec_mismatch);
    auto wrong = spec;
    wrong.original_value = "yellow";
    EXPECT_EQ(code_of([&] { eval::make_perturbation(plan, wrong); }), Errc::field_absent);
}

TEST_F(EvalFixture, RandomPerturbationNeverGrayOrOriginal) {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 200; ++i) {
        const auto plan = testing::random_plan(rng);
        auto colors = caption::color_vocabulary();
        colors.push_back("gray");
        const auto spec = eval::random_perturbation(plan, colors, rng);
        EXPECT_NE(spec.perturbed_value, "gray");
        EXPECT_NE(spec.perturbed_value, spec.original_value);
        EXPECT_NO_THROW(eval::make_perturbation(plan, spec));
    }
}

TEST_F(EvalFixture, SpecJsonRoundTrip) {
    eval::PerturbationSpec s{3, eval::PerturbField::color, "red", "blue"};
    const auto back = eval::perturbation_from_json(eval::to_json(s));
    EXPECT_EQ(back.step_index, 3);
    EXPECT_EQ(back.perturbed_value, "blue");
    EXPECT_EQ(code_of([] { eval::perturbation_from_json(json{{"field", "color"}}); }), Errc::schema_error);
}

TEST_F(EvalFixture, CausalCaseAndReport) {
    const auto orig = completed(kCaption);
    eval::PerturbationSpec spec{3, eval::PerturbField::color, "", "green"};
    const auto c = eval::causal_workflow(ex, orig, spec, *mock);
    EXPECT_EQ(c.spec.original_value, "blue");
    EXPECT_EQ(c.u_final, 0.0);
    EXPECT_EQ(c.at_step, 1.0);
    EXPECT_EQ(c.p_final, 1.0);
    EXPECT_EQ(c.question, "Is the bowl present? Is it green in color?");

    const auto pert = store.load_run(c.pert_run_id);
    EXPECT_EQ(pert.status, RunStatus::completed);
    EXPECT_EQ(pert.original_plan, orig.plan);
    ASSERT_EQ(pert.interventions.size(), 1u);
    EXPECT_EQ(pert.interventions[0].kind, InterventionKind::edit_step);
    // The prefix reuses the original checkpoints.
    EXPECT_EQ(pert.current(1)->image, orig.current(1)->image);
    EXPECT_EQ(pert.current(2)->image, orig.current(2)->image);
    EXPECT_NE(pert.current(3)->image, orig.current(3)->image);

    const auto report = eval::record_causal_case(store, orig.run_id, c);
    EXPECT_EQ(report.cases.size(), 1u);
    const auto again = eval::record_causal_case(store, orig.run_id, c);
    EXPECT_EQ(again.cases.size(), 2u);
    EXPECT_EQ(again.score_at_step, 1.0);
    const auto stored = eval::causal_cases_from_json(store.load_report(orig.run_id, "causal"));
    ASSERT_EQ(stored.size(), 2u);
    EXPECT_EQ(stored[0].case_id, c.case_id);
    const auto csv = eval::to_csv(again);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "case_id,u_final,at_step,p_final");
}

TEST_F(EvalFixture, CausalRejectsMismatchedRuns) {
    const auto orig = completed(kCaption);
    const auto other = completed(kCaption);
    const auto spec = eval::perturbation_at(orig.plan, 2, "green");
    EXPECT_EQ(code_of([&] { eval::eval_causal(orig, other, spec, *mock, store); }), Errc::spec_mismatch);
    auto paused = ex.start_run(orig.plan, true);
    EXPECT_EQ(code_of([&] { eval::eval_causal(orig, paused, spec, *mock, store); }), Errc::missing_artifact);
}

TEST_F(EvalFixture, AggregateMeans) {
    std::vector<eval::CausalCase> cases(4);
    cases[0].at_step = 1;
    cases[1].at_step = 1;
    cases[1].p_final = 1;
    cases[2].u_final = 1;
    const auto r = eval::aggregate(cases);
    EXPECT_DOUBLE_EQ(r.score_at_step, 0.5);
    EXPECT_DOUBLE_EQ(r.score_perturbed_final, 0.25);
    EXPECT_DOUBLE_EQ(r.score_unperturbed_final, 0.25);
    EXPECT_EQ(eval::aggregate({}).score_at_step, 0.0);
}

}  // namespace
}  // namespace coig
