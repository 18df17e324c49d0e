// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "coig/backends.hpp"
#include "coig/executor.hpp"
#include "coig/plan.hpp"
#include "coig/qa.hpp"
#include "coig/run.hpp"
#include "coig/runstore.hpp"

namespace coig::eval {

// ---------------------------------------------------------------------------
// Readability

struct ReadabilityProbe {
    int step_index = 0;
    qa::AttributeKind attribute_kind = qa::AttributeKind::color;
    std::string value;
    std::string object_class;
    std::string target_entity;
    std::string question;
};

/// One probe per color/shape/texture field of every entity_detail step whose
/// entity class is known (from its "(class)" annotation or the "Add
/// placeholder" sentence that introduced it).
std::vector<ReadabilityProbe> build_probes(const ChainPlan& plan);

struct ProbeResult {
    std::string probe_id;
    ReadabilityProbe probe;
    double before = 0.0;
    double after = 0.0;
    bool flagged = false;  // step 1: before is measured on a blank sentinel
};

struct KindAggregate {
    std::size_t count = 0;
    double before = 0.0;
    double after = 0.0;
};

struct ReadabilityReport {
    std::string run_id;
    std::vector<ProbeResult> probes;
    std::map<std::string, KindAggregate> by_kind;  // keyed by attribute kind
    KindAggregate overall;
};

/// before on I_{t-1}, after on I_t. missing_artifact when a probed step has
/// no succeeded record.
ReadabilityReport eval_readability(const ChainRun& run, const std::vector<ReadabilityProbe>& probes,
                                   VisionModel& vision, const RunStore& store);

json to_json(const ReadabilityReport& r);
std::string to_csv(const ReadabilityReport& r);

// ---------------------------------------------------------------------------
// Causal relevance

enum class PerturbField { color };
std::string_view perturb_field_name(PerturbField f);

struct PerturbationSpec {
    int step_index = 0;
    PerturbField field = PerturbField::color;
    std::string original_value;
    std::string perturbed_value;
};

json to_json(const PerturbationSpec& s);
PerturbationSpec perturbation_from_json(const json& j);  // schema_error

/// Replaces the color value in one entity_detail step. field_absent when the
/// step is out of range, not an entity_detail step, or does not carry the
/// original color; gray_forbidden for a gray target; spec_mismatch when the
/// values are equal.
ChainPlan make_perturbation(const ChainPlan& plan, const PerturbationSpec& spec);

/// Spec for the step's current color with the target filled in by the caller.
/// field_absent when the step carries no color.
PerturbationSpec perturbation_at(const ChainPlan& plan, int step_index, std::string perturbed_value);

/// A uniformly chosen color step, recolored with a uniform draw from `colors`
/// minus the original and gray. field_absent when no step carries a color.
PerturbationSpec random_perturbation(const ChainPlan& plan, const std::vector<std::string>& colors,
                                     std::mt19937_64& rng);

/// Forks `orig` into a new run whose plan is the perturbed plan. Steps before
/// the perturbed one reuse the original checkpoints; the rest are executed.
ChainRun perturbed_run(Executor& executor, const ChainRun& orig, const PerturbationSpec& spec);

struct CausalCase {
    std::string case_id;
    std::string orig_run_id;
    std::string pert_run_id;
    PerturbationSpec spec;
    std::string question;
    double u_final = 0.0;
    double at_step = 0.0;
    double p_final = 0.0;
};

struct CausalReport {
    std::vector<CausalCase> cases;
    double score_unperturbed_final = 0.0;
    double score_at_step = 0.0;
    double score_perturbed_final = 0.0;
};

/// One case. Both runs must be completed (missing_artifact otherwise);
/// spec_mismatch when the runs' plans do not differ at the spec's step in
/// the way the spec describes.
CausalCase eval_causal(const ChainRun& orig, const ChainRun& pert, const PerturbationSpec& spec,
                       VisionModel& vision, const RunStore& store);

/// Means over cases.
CausalReport aggregate(std::vector<CausalCase> cases);

json to_json(const CausalReport& r);
/// Reads the cases back from a stored report (schema_error).
std::vector<CausalCase> causal_cases_from_json(const json& report);
std::string to_csv(const CausalReport& r);

// ---------------------------------------------------------------------------
// Stored workflows shared by the CLI and the service

/// build_probes + eval_readability, saved as reports/<run_id>/readability.
ReadabilityReport readability_workflow(const ChainRun& run, VisionModel& vision, RunStore& store);

/// Fills an empty original_value from the plan, forks the perturbed run and
/// evaluates it.
CausalCase causal_workflow(Executor& executor, const ChainRun& orig, PerturbationSpec spec, VisionModel& vision);

/// Appends the case to reports/<run_id>/causal and returns the new aggregate.
/// Callers serialize concurrent writers for one run.
CausalReport record_causal_case(RunStore& store, const std::string& run_id, const CausalCase& c);

}  // namespace coig::eval
