// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <deque>
#include <random>

#include "coig/caption.hpp"
#include "coig/plan.hpp"
#include "support.hpp"

namespace coig {
namespace {

class ScriptedText final : public TextModel {
public:
    explicit ScriptedText(std::deque<std::string> replies) : replies_(std::move(replies)) {}
    std::string name() const override { return "scripted"; }
    std::vector<std::string> prompts;

protected:
    std::string do_complete(const std::string&, const std::string& user) override {
        prompts.push_back(user);
        auto r = replies_.front();
        replies_.pop_front();
        return r;
    }

private:
    std::deque<std::string> replies_;
};

ChainPlan apple_bowl() {
    const std::string text = "a red apple and a blue bowl on a table";
    return caption::template_plan(text, *caption::parse(text));
}

bool has_rule(const std::vector<PlanViolation>& vs, Rule r, int step) {
    return std::any_of(vs.begin(), vs.end(), [&](const auto& v) { return v.rule == r && v.step_index == step; });
}

TEST(Plan, TemplatePlanIsValid) {
    const auto p = apple_bowl();
    ASSERT_EQ(p.steps.size(), 4u);
    EXPECT_EQ(p.steps[0].kind, StepKind::foundational_layout);
    EXPECT_EQ(p.steps[3].kind, StepKind::background);
    EXPECT_TRUE(validate_plan(p).empty());
}

TEST(Plan, RandomTemplatePlansAreValid) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 300; ++i) {
        const auto p = testing::random_plan(rng);
        EXPECT_TRUE(validate_plan(p).empty()) << serialize_plan(p);
    }
}

TEST(Plan, MissingFoundation) {
    auto p = apple_bowl();
    std::swap(p.steps[0], p.steps[1]);
    p.steps[0].index = 1;
    p.steps[1].index = 2;
    EXPECT_TRUE(has_rule(validate_plan(p), Rule::missing_foundation, 1));
}

TEST(Plan, MultiEntityStep) {
    auto p = apple_bowl();
    p.steps[1].step_action = "Detail e1 (apple): color=red. Detail e2 (bowl): color=blue";
    EXPECT_TRUE(has_rule(validate_plan(p), Rule::multi_entity_step, 2));
    auto q = apple_bowl();
    q.steps[1].target_entity.reset();
    EXPECT_TRUE(has_rule(validate_plan(q), Rule::multi_entity_step, 2));
}

TEST(Plan, DestructiveEdit) {
    auto p = apple_bowl();
    p.steps[2].step_action = "Detail e1 (apple): color=green";
    p.steps[2].target_entity = "e1";
    EXPECT_TRUE(has_rule(validate_plan(p), Rule::destructive_edit, 3));
    p.steps[2].kind = StepKind::correction;
    EXPECT_FALSE(has_rule(validate_plan(p), Rule::destructive_edit, 3));
}

TEST(Plan, MissingFinalGoal) {
    auto p = apple_bowl();
    p.steps[2].final_goal = "a bowl";
    EXPECT_TRUE(has_rule(validate_plan(p), Rule::missing_final_goal, 3));
}

TEST(Plan, Malformed) {
    ChainPlan empty;
    empty.original_prompt = "x";
    EXPECT_FALSE(validate_plan(empty).empty());
    auto p = apple_bowl();
    p.steps[2].index = 7;
    const auto vs = validate_plan(p);
    EXPECT_TRUE(std::any_of(vs.begin(), vs.end(), [](const auto& v) { return v.rule == Rule::malformed; }));
    EXPECT_FALSE(validate_plan(apple_bowl(), 3).empty());
}

TEST(Plan, SerializeRoundTrip) {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 50; ++i) {
        auto p = testing::random_plan(rng);
        p.created_at = 1234 + i;
        p.planner_model = "mock";
        EXPECT_EQ(parse_plan(serialize_plan(p)), p);
    }
}

TEST(Plan, PlannerOutputExtraction) {
    const auto p = apple_bowl();
    const auto block = plan_block(p);
    EXPECT_EQ(parse_planner_output("Here is the plan.\n" + block + "\nGood luck."), p);

    std::vector<std::string> warnings;
    auto q = p;
    q.original_prompt = "another";
    EXPECT_EQ(parse_planner_output(block + "\n" + plan_block(q), &warnings), p);
    EXPECT_EQ(warnings.size(), 1u);

    EXPECT_EQ(parse_planner_output("Sure: " + serialize_plan(p) + " done"), p);
    EXPECT_THROW(parse_planner_output("I cannot help with that."), Error);
}

TEST(Plan, DecomposeRetriesOnce) {
    const auto p = apple_bowl();
    ScriptedText ok({"nonsense", plan_block(p)});
    DecomposeOptions o;
    o.clock = [] { return Timestamp{42}; };
    const auto got = decompose(p.original_prompt, ok, o);
    EXPECT_EQ(got.steps, p.steps);
    EXPECT_EQ(got.created_at, 42);
    EXPECT_EQ(got.planner_model, "scripted");
    ASSERT_EQ(ok.prompts.size(), 2u);
    EXPECT_NE(ok.prompts[1].find("coig-plan"), std::string::npos);

    ScriptedText bad({"nonsense", "still nonsense"});
    try {
        decompose("x", bad);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::planner_output_error);
    }
}

TEST(Plan, DecomposeEnforcesStepCap) {
    ScriptedText t({plan_block(apple_bowl())});
    DecomposeOptions o;
    o.max_steps = 2;
    try {
        decompose("a red apple and a blue bowl on a table", t, o);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::planner_output_error);
    }
}

TEST(Plan, MockPlannerThroughDecompose) {
    auto backends = make_backends(BackendProfile{});
    const auto p = decompose("a red apple and a blue bowl on a table", *backends.text);
    EXPECT_TRUE(validate_plan(p).empty());
    EXPECT_EQ(p.steps.size(), 4u);
}

TEST(Plan, RenderPromptCarriesBothContexts) {
    const auto s = apple_bowl().steps[1];
    const auto r = render_prompt(s);
    EXPECT_NE(r.find("Final Goal: " + s.final_goal), std::string::npos);
    EXPECT_NE(r.find(s.step_action), std::string::npos);
}

TEST(Plan, EntityIds) {
    EXPECT_EQ(plan_entity_ids(apple_bowl()), (std::vector<std::string>{"e1", "e2"}));
}

}  // namespace
}  // namespace coig
