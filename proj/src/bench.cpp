// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#include "coig/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "coig/assets.hpp"
#include "coig/caption.hpp"
#include "coig/error.hpp"

namespace coig::bench {

namespace {

std::vector<std::string> parse_list(std::string_view body) {
    std::vector<std::string> out;
    for (const auto& line : text::split(body, '\n')) {
        auto item = text::trim(line);
        if (item.empty() || item.front() == '#') continue;
        out.push_back(std::move(item));
    }
    return out;
}

std::vector<std::string> read_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::config_error, "cannot read vocabulary file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_list(ss.str());
}

void check_list(const std::vector<std::string>& items, std::size_t need, const char* what) {
    std::set<std::string> seen;
    for (const auto& item : items) {
        if (item.find_first_of(".,=\n") != std::string::npos) {
            throw Error(Errc::schema_error, std::string(what) + " item '" + item + "' contains '.', ',' or '='");
        }
        if (!seen.insert(text::lower(item)).second) {
            throw Error(Errc::schema_error, std::string("duplicate ") + what + " '" + item + "'");
        }
    }
    if (items.size() < need) {
        throw Error(Errc::vocab_too_small, std::string(what) + " vocabulary has " + std::to_string(items.size()) +
                                               " items, needs at least " + std::to_string(need));
    }
}

// k distinct indices out of n, in draw order (partial Fisher-Yates).
std::vector<std::size_t> sample(std::mt19937_64& rng, std::size_t n, std::size_t k) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + uniform_index(rng, n - i)]);
    idx.resize(k);
    return idx;
}

std::string norm(std::string_view s) { return text::lower(text::trim(s)); }

std::string num(double v, const char* fmt = "%.3f") {
    char buf[32];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

// Runs `fn(i)` for i in [0, n) on up to `threads` workers.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn fn) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

template <typename T>
T get_field(const json& j, const char* key, std::size_t line) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(Errc::schema_error, "record " + std::to_string(line) + ": missing or invalid '" + key + "'");
    }
}

}  // namespace

ECVocab ECVocab::defaults() {
    return {parse_list(assets::ec_jobs()), parse_list(assets::ec_attributes()), parse_list(assets::ec_interactions())};
}

ECVocab load_vocab(const std::filesystem::path& dir) {
    return {read_list(dir / "jobs.txt"), read_list(dir / "attributes.txt"), read_list(dir / "interactions.txt")};
}

void check_vocab(const ECVocab& vocab) {
    check_list(vocab.jobs, 1, "job");
    check_list(vocab.attributes, 4, "attribute");
    check_list(vocab.interactions, 2, "interaction");
}

std::string render_ec_text(const std::string& job, const std::array<std::string, 4>& a,
                           const std::array<std::string, 2>& i) {
    auto plural = caption::pluralize(job);
    return "Four " + plural + " are in a room. The first is " + a[0] + " and " + i[0] + " the second, who is " + a[1] +
           ". The third is " + a[2] + " and " + i[1] + " the fourth, who is " + a[3] + ".";
}

std::vector<ECPrompt> generate_ec_prompts(const ECVocab& vocab, int count, std::uint64_t seed) {
    if (count < 1) throw Error(Errc::precondition_violated, "count must be at least 1");
    check_vocab(vocab);
    std::mt19937_64 rng(seed);
    std::vector<ECPrompt> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int n = 0; n < count; ++n) {
        ECPrompt p;
        p.id = n + 1;
        p.job = vocab.jobs[uniform_index(rng, vocab.jobs.size())];
        const auto a = sample(rng, vocab.attributes.size(), 4);
        for (std::size_t k = 0; k < 4; ++k) p.attributes[k] = vocab.attributes[a[k]];
        const auto i = sample(rng, vocab.interactions.size(), 2);
        for (std::size_t k = 0; k < 2; ++k) p.interactions[k] = vocab.interactions[i[k]];
        p.text = render_ec_text(p.job, p.attributes, p.interactions);
        out.push_back(std::move(p));
    }
    return out;
}

json to_json(const ECPrompt& p) {
    return {{"id", p.id},
            {"job", p.job},
            {"attributes", p.attributes},
            {"interactions", p.interactions},
            {"text", p.text},
            {"expected_entity_count", p.expected_entity_count}};
}

ECPrompt ec_prompt_from_json(const json& j) {
    try {
        ECPrompt p;
        p.id = j.at("id").get<int>();
        p.job = j.at("job").get<std::string>();
        const auto attrs = j.at("attributes").get<std::vector<std::string>>();
        const auto inters = j.at("interactions").get<std::vector<std::string>>();
        if (attrs.size() != 4 || inters.size() != 2) {
            throw Error(Errc::schema_error, "EC prompt needs 4 attributes and 2 interactions");
        }
        std::copy(attrs.begin(), attrs.end(), p.attributes.begin());
        std::copy(inters.begin(), inters.end(), p.interactions.begin());
        p.text = j.at("text").get<std::string>();
        p.expected_entity_count = j.value("expected_entity_count", kEcEntities);
        return p;
    } catch (const json::exception& ex) {
        throw Error(Errc::schema_error, std::string("EC prompt: ") + ex.what());
    }
}

std::string to_jsonl(const std::vector<ECPrompt>& prompts) {
    std::string out;
    for (const auto& p : prompts) out += canonical_dump(to_json(p)) + "\n";
    return out;
}

std::vector<ECPrompt> parse_ec_prompts(std::string_view jsonl) {
    std::vector<ECPrompt> out;
    std::size_t line_no = 0;
    for (const auto& line : text::split(jsonl, '\n')) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            out.push_back(ec_prompt_from_json(json::parse(line)));
        } catch (const json::exception& ex) {
            throw Error(Errc::schema_error, "line " + std::to_string(line_no) + ": " + ex.what());
        } catch (const Error& e) {
            throw Error(Errc::schema_error, "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::size_t max_matching(const std::vector<std::vector<bool>>& adj) {
    std::size_t right = 0;
    for (const auto& row : adj) right = std::max(right, row.size());
    std::vector<int> owner(right, -1);
    std::size_t size = 0;
    for (std::size_t u = 0; u < adj.size(); ++u) {
        std::vector<bool> seen(right, false);
        // Kuhn's augmenting path search.
        auto augment = [&](auto&& self, std::size_t x) -> bool {
            for (std::size_t v = 0; v < adj[x].size(); ++v) {
                if (!adj[x][v] || seen[v]) continue;
                seen[v] = true;
                if (owner[v] < 0 || self(self, static_cast<std::size_t>(owner[v]))) {
                    owner[v] = static_cast<int>(x);
                    return true;
                }
            }
            return false;
        };
        if (augment(augment, u)) ++size;
    }
    return size;
}

ECScore score_ec(const CensusReport& census, const ECPrompt& prompt) {
    ECScore s;
    const auto job = norm(prompt.job);
    const auto same_class = std::count_if(census.entries.begin(), census.entries.end(), [&](const CensusEntry& e) {
        return norm(e.cls) == job || norm(caption::singularize(norm(e.cls))) == job;
    });
    s.entity_count = same_class == prompt.expected_entity_count ? 1 : 0;

    std::vector<std::vector<bool>> adj(4, std::vector<bool>(census.entries.size(), false));
    for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t e = 0; e < census.entries.size(); ++e) {
            const auto& attrs = census.entries[e].attributes;
            adj[a][e] = std::any_of(attrs.begin(), attrs.end(),
                                    [&](const std::string& x) { return norm(x) == norm(prompt.attributes[a]); });
        }
    }
    s.attribute_binding = static_cast<int>(max_matching(adj));

    struct Edge {
        std::string from, to;
    };
    std::array<std::vector<Edge>, 2> candidates;
    for (std::size_t k = 0; k < 2; ++k) {
        for (const auto& e : census.entries) {
            for (const auto& i : e.interactions) {
                if (i.target && *i.target != e.census_id && norm(i.verb) == norm(prompt.interactions[k])) {
                    candidates[k].push_back({e.census_id, *i.target});
                }
            }
        }
    }
    int best = candidates[0].empty() && candidates[1].empty() ? 0 : 1;
    for (const auto& a : candidates[0]) {
        for (const auto& b : candidates[1]) {
            if (a.from != b.from && a.from != b.to && a.to != b.from && a.to != b.to) best = 2;
        }
    }
    s.interaction = best;
    return s;
}

std::string_view pipeline_name(Pipeline p) { return p == Pipeline::coig ? "coig" : "single_pass"; }

Pipeline parse_pipeline(std::string_view s) {
    if (s == "coig") return Pipeline::coig;
    if (s == "single_pass") return Pipeline::single_pass;
    throw Error(Errc::config_error, "unknown pipeline '" + std::string(s) + "' (coig, single_pass)");
}

Rendered render_prompt_with(const std::string& prompt, Pipeline pipeline, const PipelineContext& ctx) {
    if (!ctx.backends.image) throw Error(Errc::config_error, "no image backend configured");
    if (pipeline == Pipeline::single_pass) return {ctx.backends.image->generate(prompt), std::nullopt};
    if (!ctx.backends.text) throw Error(Errc::config_error, "no text backend configured");
    if (!ctx.store) throw Error(Errc::config_error, "the coig pipeline needs a run store");
    DecomposeOptions dopts;
    dopts.max_steps = ctx.executor.max_steps;
    dopts.clock = ctx.executor.clock;
    auto plan = decompose(prompt, *ctx.backends.text, dopts);
    Executor ex(*ctx.store, ctx.backends.image, ctx.profile, ctx.executor);
    auto run = ex.start_run(std::move(plan));
    if (run.status == RunStatus::running) ex.run_to_completion(run);
    const int n = static_cast<int>(run.plan.steps.size());
    if (run.status != RunStatus::completed || run.cursor() != n) {
        const auto* failed = run.current(run.cursor() + 1);
        throw Error(Errc::missing_artifact, "run " + run.run_id + " stopped at step " + std::to_string(run.cursor() + 1) +
                                                (failed && failed->error ? ": " + *failed->error : ""));
    }
    return {ctx.store->load_artifact(*run.current(n)->image), run.run_id};
}

ECScorecard run_ec_benchmark(const std::vector<ECPrompt>& prompts, Pipeline pipeline, const PipelineContext& ctx) {
    if (!ctx.backends.vision) throw Error(Errc::config_error, "no vision backend configured");
    ECScorecard card;
    card.pipeline = pipeline;
    card.results.resize(prompts.size());
    parallel_for(prompts.size(), ctx.threads, [&](std::size_t i) {
        auto& r = card.results[i];
        r.prompt_id = prompts[i].id;
        try {
            auto out = render_prompt_with(prompts[i].text, pipeline, ctx);
            r.run_id = out.run_id;
            r.score = score_ec(ctx.backends.vision->census(out.image), prompts[i]);
        } catch (const std::exception& e) {
            r.error = e.what();
        }
    });
    for (const auto& r : card.results) {
        if (!r.score) {
            ++card.failed;
            continue;
        }
        card.entity_count += r.score->entity_count;
        card.attribute_binding += r.score->attribute_binding;
        card.interaction += r.score->interaction;
        card.total += r.score->total();
    }
    if (!prompts.empty()) {
        const auto n = static_cast<double>(prompts.size());
        card.entity_count /= n;
        card.attribute_binding /= n;
        card.interaction /= n;
        card.total /= n;
    }
    return card;
}

json to_json(const ECScorecard& s) {
    json results = json::array();
    for (const auto& r : s.results) {
        json j = {{"prompt_id", r.prompt_id}};
        if (r.score) {
            j["entity_count"] = r.score->entity_count;
            j["attribute_binding"] = r.score->attribute_binding;
            j["interaction"] = r.score->interaction;
            j["total"] = r.score->total();
        }
        if (r.run_id) j["run_id"] = *r.run_id;
        if (r.error) j["error"] = *r.error;
        results.push_back(std::move(j));
    }
    return {{"suite", "ec"},
            {"pipeline", std::string(pipeline_name(s.pipeline))},
            {"results", std::move(results)},
            {"means",
             {{"entity_count", s.entity_count},
              {"attribute_binding", s.attribute_binding},
              {"interaction", s.interaction},
              {"total", s.total}}},
            {"failed", s.failed}};
}

std::string table_csv(const std::vector<ECScorecard>& cards) {
    std::string out = "Metric";
    for (const auto& c : cards) out += "," + std::string(pipeline_name(c.pipeline));
    out += "\n";
    auto row = [&](const char* label, double ECScorecard::*field, double max) {
        out += label;
        for (const auto& c : cards) {
            out += "," + num(c.*field) + " (" + num(100.0 * (c.*field) / max, "%.1f") + "%)";
        }
        out += "\n";
    };
    row("Entity Count (out of 1)", &ECScorecard::entity_count, 1.0);
    row("Attribute Binding (out of 4)", &ECScorecard::attribute_binding, 4.0);
    row("Interaction (out of 2)", &ECScorecard::interaction, 2.0);
    row("Total Score (out of 7)", &ECScorecard::total, 7.0);
    return out;
}

std::string results_csv(const ECScorecard& s) {
    std::string out = "prompt_id,entity_count,attribute_binding,interaction,total,error\n";
    for (const auto& r : s.results) {
        out += std::to_string(r.prompt_id) + ",";
        if (r.score) {
            out += std::to_string(r.score->entity_count) + "," + std::to_string(r.score->attribute_binding) + "," +
                   std::to_string(r.score->interaction) + "," + std::to_string(r.score->total()) + ",";
        } else {
            out += "0,0,0,0,";
        }
        if (r.error) {
            auto e = *r.error;
            std::replace(e.begin(), e.end(), '"', '\'');
            out += "\"" + e + "\"";
        }
        out += "\n";
    }
    return out;
}

std::string_view qa_style_name(QaStyle s) {
    switch (s) {
        case QaStyle::geneval: return "geneval_style";
        case QaStyle::compbench: return "compbench_style";
        case QaStyle::conceptmix: return "conceptmix_style";
    }
    return "geneval_style";
}

QaStyle parse_qa_style(std::string_view s) {
    for (auto v : {QaStyle::geneval, QaStyle::compbench, QaStyle::conceptmix}) {
        if (s == qa_style_name(v) || s == qa_style_name(v).substr(0, qa_style_name(v).find('_'))) return v;
    }
    throw Error(Errc::config_error,
                "unknown QA style '" + std::string(s) + "' (geneval_style, compbench_style, conceptmix_style)");
}

namespace {

struct Object {
    std::string cls;
    int count = 1;
    std::vector<qa::Condition> conditions;
};

void object_items(const Object& o, std::vector<QAItem>& items) {
    items.push_back({qa::presence(o.cls)});
    if (o.count > 1) items.push_back({qa::attribute(o.cls, {qa::AttributeKind::count, std::to_string(o.count)})});
    for (const auto& c : o.conditions) items.push_back({qa::attribute(o.cls, c)});
}

std::optional<qa::Relation> relation_of(std::string_view phrase) {
    if (phrase.find("left") != std::string_view::npos) return qa::Relation::left_of;
    if (phrase.find("right") != std::string_view::npos) return qa::Relation::right_of;
    if (phrase == "above") return qa::Relation::above;
    if (phrase == "below") return qa::Relation::below;
    return std::nullopt;
}

std::vector<QAItem> geneval_items(const json& record, std::size_t line) {
    const auto include = record.find("include");
    if (include == record.end() || !include->is_array() || include->empty()) {
        throw Error(Errc::schema_error, "record " + std::to_string(line) + ": 'include' must be a non-empty array");
    }
    std::vector<Object> objects;
    for (const auto& o : *include) {
        Object obj;
        obj.cls = get_field<std::string>(o, "class", line);
        obj.count = o.contains("count") ? get_field<int>(o, "count", line) : 1;
        if (obj.count < 1) throw Error(Errc::schema_error, "record " + std::to_string(line) + ": count must be >= 1");
        for (auto kind : {qa::AttributeKind::color, qa::AttributeKind::shape, qa::AttributeKind::texture}) {
            const auto key = std::string(qa::attribute_kind_name(kind));
            if (o.contains(key)) obj.conditions.push_back({kind, get_field<std::string>(o, key.c_str(), line)});
        }
        objects.push_back(std::move(obj));
    }
    std::vector<QAItem> items;
    for (const auto& o : objects) object_items(o, items);
    for (const auto& o : *include) {
        if (!o.contains("position")) continue;
        const auto& pos = o.at("position");
        if (!pos.is_array() || pos.size() != 2 || !pos[0].is_string() || !pos[1].is_number_integer()) {
            throw Error(Errc::schema_error, "record " + std::to_string(line) + ": position must be [relation, index]");
        }
        const auto rel = relation_of(text::lower(pos[0].get<std::string>()));
        const auto idx = pos[1].get<int>();
        if (!rel || idx < 0 || idx >= static_cast<int>(objects.size())) {
            throw Error(Errc::schema_error, "record " + std::to_string(line) + ": bad position reference");
        }
        items.push_back({qa::relation(o.at("class").get<std::string>(), *rel,
                                      objects[static_cast<std::size_t>(idx)].cls)});
    }
    return items;
}

std::vector<QAItem> compbench_items(const std::string& prompt, std::size_t line) {
    const auto c = caption::parse(prompt);
    if (!c || c->entities.empty()) {
        throw Error(Errc::schema_error, "record " + std::to_string(line) + ": cannot parse objects from '" + prompt + "'");
    }
    std::vector<Object> objects;
    for (const auto& e : c->entities) {
        std::vector<qa::Condition> conds;
        if (e.color) conds.push_back({qa::AttributeKind::color, *e.color});
        if (e.shape) conds.push_back({qa::AttributeKind::shape, *e.shape});
        if (e.texture) conds.push_back({qa::AttributeKind::texture, *e.texture});
        auto same = std::find_if(objects.begin(), objects.end(), [&](const Object& o) {
            if (o.cls != e.cls || o.conditions.size() != conds.size()) return false;
            for (std::size_t i = 0; i < conds.size(); ++i) {
                if (o.conditions[i].kind != conds[i].kind || o.conditions[i].value != conds[i].value) return false;
            }
            return true;
        });
        if (same != objects.end()) ++same->count;
        else objects.push_back({e.cls, 1, std::move(conds)});
    }
    std::vector<QAItem> items;
    for (const auto& o : objects) object_items(o, items);

    static const std::regex kRel(R"(\b(to the left of|left of|to the right of|right of|above|below)\b)");
    std::smatch m;
    const auto lowered = text::lower(prompt);
    if (c->entities.size() == 2 && std::regex_search(lowered, m, kRel)) {
        if (const auto rel = relation_of(m[1].str())) {
            items.push_back({qa::relation(c->entities[0].cls, *rel, c->entities[1].cls)});
        }
    }
    return items;
}

}  // namespace

QaRecord build_qa(const json& record, QaStyle style, std::size_t line) {
    if (!record.is_object()) throw Error(Errc::schema_error, "record " + std::to_string(line) + ": not an object");
    QaRecord r;
    r.prompt = get_field<std::string>(record, "prompt", line);
    if (record.contains("id")) {
        const auto& id = record.at("id");
        r.id = id.is_string() ? id.get<std::string>() : id.dump();
    } else {
        r.id = std::to_string(line);
    }
    switch (style) {
        case QaStyle::geneval:
            r.group = get_field<std::string>(record, "tag", line);
            r.items = geneval_items(record, line);
            break;
        case QaStyle::compbench:
            r.group = record.contains("category") ? get_field<std::string>(record, "category", line) : "all";
            r.items = compbench_items(r.prompt, line);
            break;
        case QaStyle::conceptmix: {
            r.group = "k=" + std::to_string(get_field<int>(record, "k", line));
            for (const auto& q : get_field<std::vector<std::string>>(record, "questions", line)) {
                r.items.push_back({q});
            }
            if (r.items.empty()) {
                throw Error(Errc::schema_error, "record " + std::to_string(line) + ": 'questions' is empty");
            }
            break;
        }
    }
    return r;
}

std::vector<QaRecord> load_qa_records(std::string_view jsonl, QaStyle style) {
    std::vector<QaRecord> out;
    std::size_t line_no = 0;
    for (const auto& line : text::split(jsonl, '\n')) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& ex) {
            throw Error(Errc::schema_error, "line " + std::to_string(line_no) + ": " + ex.what());
        }
        out.push_back(build_qa(j, style, line_no));
    }
    return out;
}

QaScore score_qa(const ImageArtifact& image, const std::vector<QAItem>& items, VisionModel& vision) {
    if (items.empty()) throw Error(Errc::precondition_violated, "no QA items to score");
    QaScore s;
    for (const auto& item : items) {
        try {
            const bool yes = vision.answer(image, item.question) == Answer::yes;
            ++s.answered;
            if (yes == item.expected_yes) ++s.yes;
        } catch (const std::exception& e) {
            ++s.abstained;
            s.warnings.push_back("abstained on '" + item.question + "': " + e.what());
        }
    }
    s.fraction = s.answered ? static_cast<double>(s.yes) / static_cast<double>(s.answered) : 0.0;
    s.all_yes = s.abstained == 0 && s.yes == items.size();
    return s;
}

QaScorecard run_qa_benchmark(const std::vector<QaRecord>& records, QaStyle style, Pipeline pipeline,
                             const PipelineContext& ctx) {
    if (!ctx.backends.vision) throw Error(Errc::config_error, "no vision backend configured");
    QaScorecard card;
    card.benchmark = std::string(qa_style_name(style));
    card.pipeline = pipeline;
    card.results.resize(records.size());
    parallel_for(records.size(), ctx.threads, [&](std::size_t i) {
        auto& r = card.results[i];
        r.id = records[i].id;
        r.group = records[i].group;
        try {
            auto out = render_prompt_with(records[i].prompt, pipeline, ctx);
            r.run_id = out.run_id;
            r.score = score_qa(out.image, records[i].items, *ctx.backends.vision);
        } catch (const std::exception& e) {
            r.error = e.what();
        }
    });
    std::map<std::string, std::pair<std::size_t, std::size_t>> tally;
    std::size_t yes = 0, answered = 0, strict = 0;
    for (std::size_t i = 0; i < card.results.size(); ++i) {
        const auto& r = card.results[i];
        auto& [gy, ga] = tally[r.group];
        if (!r.score) {
            // Unrendered prompts count every item as a no.
            ++card.failed;
            ga += records[i].items.size();
            answered += records[i].items.size();
            continue;
        }
        gy += r.score->yes;
        ga += r.score->answered;
        yes += r.score->yes;
        answered += r.score->answered;
        if (r.score->all_yes) ++strict;
    }
    for (const auto& [g, t] : tally) {
        card.groups[g] = t.second ? static_cast<double>(t.first) / static_cast<double>(t.second) : 0.0;
    }
    card.overall = answered ? static_cast<double>(yes) / static_cast<double>(answered) : 0.0;
    card.strict = records.empty() ? 0.0 : static_cast<double>(strict) / static_cast<double>(records.size());
    return card;
}

json to_json(const QaScorecard& s) {
    json results = json::array();
    for (const auto& r : s.results) {
        json j = {{"id", r.id}, {"group", r.group}};
        if (r.score) {
            j["fraction"] = r.score->fraction;
            j["all_yes"] = r.score->all_yes;
            j["yes"] = r.score->yes;
            j["answered"] = r.score->answered;
            j["abstained"] = r.score->abstained;
            if (!r.score->warnings.empty()) j["warnings"] = r.score->warnings;
        }
        if (r.run_id) j["run_id"] = *r.run_id;
        if (r.error) j["error"] = *r.error;
        results.push_back(std::move(j));
    }
    return {{"suite", "qa"},
            {"benchmark", s.benchmark},
            {"pipeline", std::string(pipeline_name(s.pipeline))},
            {"results", std::move(results)},
            {"groups", s.groups},
            {"overall", s.overall},
            {"strict", s.strict},
            {"failed", s.failed}};
}

std::string table_csv(const QaScorecard& s) {
    std::string out = "group," + std::string(pipeline_name(s.pipeline)) + "\n";
    for (const auto& [g, v] : s.groups) out += g + "," + num(v) + "\n";
    out += "overall," + num(s.overall) + "\n";
    out += "strict," + num(s.strict) + "\n";
    return out;
}

}  // namespace coig::bench
