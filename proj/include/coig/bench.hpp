// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

// Entity Collapse (EC) benchmark generation and census scoring, plus
// yes/no QA scoring for externally supplied prompt files.

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coig/backends.hpp"
#include "coig/executor.hpp"
#include "coig/qa.hpp"
#include "coig/runstore.hpp"

namespace coig::bench {

// ---------------------------------------------------------------------------
// Entity Collapse prompts

struct ECVocab {
    std::vector<std::string> jobs;
    std::vector<std::string> attributes;
    std::vector<std::string> interactions;

    /// The vocabularies compiled in from data/ec_vocab.
    static ECVocab defaults();
};

/// Reads jobs.txt, attributes.txt and interactions.txt from `dir`: one item
/// per line, blank lines and lines starting with '#' skipped.
ECVocab load_vocab(const std::filesystem::path& dir);

/// vocab_too_small unless there are at least 1 job, 4 attributes and 2
/// interactions; schema_error on duplicates or items containing '.', ',' or
/// '='.
void check_vocab(const ECVocab& vocab);

inline constexpr int kEcEntities = 4;

struct ECPrompt {
    int id = 0;
    std::string job;
    std::array<std::string, 4> attributes;
    std::array<std::string, 2> interactions;  // entity 1 -> 2, entity 3 -> 4
    std::string text;
    int expected_entity_count = kEcEntities;
};

std::string render_ec_text(const std::string& job, const std::array<std::string, 4>& attributes,
                           const std::array<std::string, 2>& interactions);

/// Deterministic in (vocab, count, seed). Attributes are distinct within a
/// prompt, as are the two interactions.
std::vector<ECPrompt> generate_ec_prompts(const ECVocab& vocab, int count, std::uint64_t seed);

json to_json(const ECPrompt& p);
ECPrompt ec_prompt_from_json(const json& j);  // schema_error
/// One canonical record per line.
std::string to_jsonl(const std::vector<ECPrompt>& prompts);
std::vector<ECPrompt> parse_ec_prompts(std::string_view jsonl);

struct ECScore {
    int entity_count = 0;       // 0..1
    int attribute_binding = 0;  // 0..4
    int interaction = 0;        // 0..2
    int total() const { return entity_count + attribute_binding + interaction; }
    bool operator==(const ECScore&) const = default;
};

/// Size of a maximum matching in a bipartite graph given as adjacency rows.
std::size_t max_matching(const std::vector<std::vector<bool>>& adjacency);

/// entity_count: exactly four entries of the job class.
/// attribute_binding: maximum one-to-one matching of the four prompted
/// attributes to distinct entries carrying them.
/// interaction: largest set of prompted interactions realized by census
/// edges with the same verb between distinct entries, no entry shared by two
/// credited edges.
ECScore score_ec(const CensusReport& census, const ECPrompt& prompt);

// ---------------------------------------------------------------------------
// Pipelines

enum class Pipeline { coig, single_pass };
std::string_view pipeline_name(Pipeline p);
Pipeline parse_pipeline(std::string_view s);  // config_error

struct PipelineContext {
    Backends backends;
    RunStore* store = nullptr;  // required for coig
    std::string profile = "mock";
    ExecutorOptions executor;
    std::size_t threads = 1;
};

struct Rendered {
    ImageArtifact image;
    std::optional<std::string> run_id;
};

/// coig: plan, run to completion, final state. single_pass: one generate()
/// of the full prompt. Backend and planner errors propagate.
Rendered render_prompt_with(const std::string& prompt, Pipeline pipeline, const PipelineContext& ctx);

struct ECResult {
    int prompt_id = 0;
    std::optional<ECScore> score;
    std::optional<std::string> run_id;
    std::optional<std::string> error;
};

struct ECScorecard {
    Pipeline pipeline = Pipeline::coig;
    std::vector<ECResult> results;  // prompt order
    double entity_count = 0.0;
    double attribute_binding = 0.0;
    double interaction = 0.0;
    double total = 0.0;
    std::size_t failed = 0;
};

/// Per-prompt failures are recorded and count as zero; the batch never aborts.
ECScorecard run_ec_benchmark(const std::vector<ECPrompt>& prompts, Pipeline pipeline, const PipelineContext& ctx);

json to_json(const ECScorecard& s);
/// EC table rows, one value column per scorecard.
std::string table_csv(const std::vector<ECScorecard>& cards);
/// One row per prompt.
std::string results_csv(const ECScorecard& s);

// ---------------------------------------------------------------------------
// QA-template benchmarks

enum class QaStyle { geneval, compbench, conceptmix };
std::string_view qa_style_name(QaStyle s);  // "geneval_style", ...
QaStyle parse_qa_style(std::string_view s);  // config_error

struct QAItem {
    std::string question;
    bool expected_yes = true;
};

struct QaRecord {
    std::string id;
    std::string prompt;
    std::string group;
    std::vector<QAItem> items;
};

/// Record schemas (one JSON object per line):
///   geneval_style    {id?, prompt, tag, include: [{class, count?, color?,
///                     shape?, texture?, position?: [relation, index]}]}
///   compbench_style  {id?, prompt, category?}; objects parsed from prompt
///   conceptmix_style {id?, prompt, k, questions: [string]}; passthrough
/// Throws schema_error.
QaRecord build_qa(const json& record, QaStyle style, std::size_t line = 0);
std::vector<QaRecord> load_qa_records(std::string_view jsonl, QaStyle style);

struct QaScore {
    std::size_t yes = 0;
    std::size_t answered = 0;
    std::size_t abstained = 0;
    double fraction = 0.0;  // yes / answered
    bool all_yes = false;   // strict: every item answered yes
    std::vector<std::string> warnings;
};

/// precondition_violated for an empty item list. Backend errors on an item
/// are abstentions, excluded from the denominator with a warning.
QaScore score_qa(const ImageArtifact& image, const std::vector<QAItem>& items, VisionModel& vision);

struct QaResult {
    std::string id;
    std::string group;
    std::optional<QaScore> score;
    std::optional<std::string> run_id;
    std::optional<std::string> error;
};

struct QaScorecard {
    std::string benchmark;
    Pipeline pipeline = Pipeline::coig;
    std::vector<QaResult> results;
    std::map<std::string, double> groups;  // yes / answered over the group's items
    double overall = 0.0;
    double strict = 0.0;  // fraction of prompts with every item yes
    std::size_t failed = 0;
};

QaScorecard run_qa_benchmark(const std::vector<QaRecord>& records, QaStyle style, Pipeline pipeline,
                             const PipelineContext& ctx);

json to_json(const QaScorecard& s);
std::string table_csv(const QaScorecard& s);

}  // namespace coig::bench
