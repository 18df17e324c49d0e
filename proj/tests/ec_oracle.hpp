// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force EC scoring and a census generator covering the collapse
// modes: merged entities, swapped or leaked attributes, homogenization.

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "coig/bench.hpp"
#include "coig/caption.hpp"
#include "coig/util.hpp"

namespace coig::testing {

inline std::string ec_norm(const std::string& s) { return text::lower(text::trim(s)); }

inline bool carries(const CensusEntry& e, const std::string& attribute) {
    return std::any_of(e.attributes.begin(), e.attributes.end(),
                       [&](const std::string& a) { return ec_norm(a) == ec_norm(attribute); });
}

/// Tries every partial injective assignment of prompted attributes to entries.
inline int brute_attribute_binding(const CensusReport& census, const bench::ECPrompt& p) {
    std::vector<bool> used(census.entries.size(), false);
    auto go = [&](auto&& self, std::size_t a) -> int {
        if (a == 4) return 0;
        int best = self(self, a + 1);  // leave attribute a unbound
        for (std::size_t e = 0; e < census.entries.size(); ++e) {
            if (used[e] || !carries(census.entries[e], p.attributes[a])) continue;
            used[e] = true;
            best = std::max(best, 1 + self(self, a + 1));
            used[e] = false;
        }
        return best;
    };
    return go(go, 0);
}

struct Edge {
    std::string from, to;
};

inline int brute_interaction(const CensusReport& census, const bench::ECPrompt& p) {
    std::array<std::vector<Edge>, 2> edges;
    for (int k = 0; k < 2; ++k) {
        for (const auto& e : census.entries) {
            for (const auto& i : e.interactions) {
                if (i.target && *i.target != e.census_id && ec_norm(i.verb) == ec_norm(p.interactions[k])) {
                    edges[k].push_back({e.census_id, *i.target});
                }
            }
        }
    }
    int best = 0;
    // Each interaction is either uncredited (npos) or credited to one edge.
    const std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> c0{none}, c1{none};
    for (std::size_t i = 0; i < edges[0].size(); ++i) c0.push_back(i);
    for (std::size_t i = 0; i < edges[1].size(); ++i) c1.push_back(i);
    for (auto a : c0) {
        for (auto b : c1) {
            std::set<std::string> ends;
            int credited = 0;
            bool ok = true;
            for (const auto& [k, idx] : {std::pair{0, a}, std::pair{1, b}}) {
                if (idx == none) continue;
                const auto& e = edges[static_cast<std::size_t>(k)][idx];
                ok = ok && ends.insert(e.from).second && ends.insert(e.to).second;
                ++credited;
            }
            if (ok) best = std::max(best, credited);
        }
    }
    return best;
}

inline int brute_entity_count(const CensusReport& census, const bench::ECPrompt& p) {
    const auto job = ec_norm(p.job);
    const auto plural = caption::pluralize(job);
    int n = 0;
    for (const auto& e : census.entries) {
        const auto c = ec_norm(e.cls);
        if (c == job || c == plural) ++n;
    }
    return n == p.expected_entity_count ? 1 : 0;
}

inline bench::ECScore brute_score(const CensusReport& census, const bench::ECPrompt& p) {
    return {brute_entity_count(census, p), brute_attribute_binding(census, p), brute_interaction(census, p)};
}

enum class Collapse { faithful, merge, swap, leak, homogenize, noise };

inline std::string_view collapse_name(Collapse c) {
    switch (c) {
        case Collapse::faithful: return "faithful";
        case Collapse::merge: return "merge";
        case Collapse::swap: return "swap";
        case Collapse::leak: return "leak";
        case Collapse::homogenize: return "homogenize";
        case Collapse::noise: return "noise";
    }
    return "?";
}

/// A census for `p` damaged according to `mode`, with random extra noise
/// (case changes, plural class names, distractor entries and edges).
inline CensusReport random_census(const bench::ECPrompt& p, Collapse mode, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    struct Proto {
        std::string cls;
        std::vector<std::string> attrs;
        std::vector<std::pair<std::string, int>> edges;  // verb, target proto
    };
    std::vector<Proto> ps(4);
    for (int i = 0; i < 4; ++i) {
        ps[static_cast<std::size_t>(i)].cls = coin(rng) < 0.2 ? caption::pluralize(p.job) : p.job;
        ps[static_cast<std::size_t>(i)].attrs = {p.attributes[static_cast<std::size_t>(i)]};
    }
    ps[0].edges.push_back({p.interactions[0], 1});
    ps[2].edges.push_back({p.interactions[1], 3});

    auto random_attr = [&] { return p.attributes[uniform_index(rng, 4)]; };
    switch (mode) {
        case Collapse::faithful: break;
        case Collapse::merge: {
            // Fold one entity into another: the survivor keeps both attribute sets.
            const auto from = uniform_index(rng, 4);
            auto into = uniform_index(rng, 3);
            if (into >= from) ++into;
            for (auto& a : ps[from].attrs) ps[into].attrs.push_back(a);
            for (auto& e : ps[from].edges) ps[into].edges.push_back(e);
            for (auto& q : ps) {
                for (auto& e : q.edges) {
                    if (e.second == static_cast<int>(from)) e.second = static_cast<int>(into);
                }
            }
            ps[from].cls.clear();  // marks removal
            if (coin(rng) < 0.5) {
                const auto second = uniform_index(rng, 4);
                if (!ps[second].cls.empty() && second != into) {
                    for (auto& q : ps) {
                        for (auto& e : q.edges) {
                            if (e.second == static_cast<int>(second)) e.second = static_cast<int>(into);
                        }
                    }
                    ps[second].cls.clear();
                }
            }
            break;
        }
        case Collapse::swap: {
            std::vector<std::string> attrs;
            for (auto& q : ps) attrs.insert(attrs.end(), q.attrs.begin(), q.attrs.end());
            std::shuffle(attrs.begin(), attrs.end(), rng);
            const auto drop = uniform_index(rng, 3);
            for (std::size_t i = 0; i < 4; ++i) ps[i].attrs = i < drop ? std::vector<std::string>{} : std::vector{attrs[i]};
            if (coin(rng) < 0.5) std::swap(ps[0].edges, ps[2].edges);
            break;
        }
        case Collapse::leak: {
            for (auto& q : ps) {
                if (coin(rng) < 0.5) q.attrs.push_back(random_attr());
                if (coin(rng) < 0.3) q.attrs.erase(q.attrs.begin());
            }
            break;
        }
        case Collapse::homogenize: {
            const auto a = random_attr();
            for (auto& q : ps) q.attrs = {a};
            const auto verb = p.interactions[uniform_index(rng, 2)];
            for (auto& q : ps) {
                for (auto& e : q.edges) e.first = verb;
            }
            break;
        }
        case Collapse::noise: break;
    }

    // Distractors in every mode.
    const std::size_t extra = mode == Collapse::noise ? 1 + uniform_index(rng, 3) : uniform_index(rng, 2);
    for (std::size_t i = 0; i < extra; ++i) {
        Proto d;
        d.cls = coin(rng) < 0.4 ? p.job : "bystander";
        if (coin(rng) < 0.6) d.attrs.push_back(random_attr());
        ps.push_back(d);
    }
    const auto n = ps.size();
    const std::size_t extra_edges = uniform_index(rng, 4);
    for (std::size_t i = 0; i < extra_edges; ++i) {
        const auto from = uniform_index(rng, n);
        const auto to = coin(rng) < 0.15 ? from : uniform_index(rng, n);
        const auto verb = coin(rng) < 0.7 ? p.interactions[uniform_index(rng, 2)] : std::string("ignoring");
        ps[from].edges.push_back({verb, static_cast<int>(to)});
    }

    // Materialize: drop removed protos, assign census ids in shuffled order.
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n; ++i) {
        if (!ps[i].cls.empty()) order.push_back(i);
    }
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::string> id_of(n);
    for (std::size_t k = 0; k < order.size(); ++k) id_of[order[k]] = "P" + std::to_string(k + 1);
    CensusReport r;
    for (auto i : order) {
        CensusEntry e;
        e.census_id = id_of[i];
        e.cls = coin(rng) < 0.2 ? text::lower(ps[i].cls) + " " : ps[i].cls;
        if (coin(rng) < 0.2 && !e.cls.empty()) e.cls[0] = static_cast<char>(std::toupper(e.cls[0]));
        for (auto a : ps[i].attrs) {
            if (coin(rng) < 0.15 && !a.empty()) a[0] = static_cast<char>(std::toupper(a[0]));
            e.attributes.push_back(a);
        }
        for (const auto& [verb, to] : ps[i].edges) {
            if (id_of[static_cast<std::size_t>(to)].empty()) continue;
            e.interactions.push_back({verb, id_of[static_cast<std::size_t>(to)]});
        }
        r.entries.push_back(std::move(e));
    }
    return r;
}

}  // namespace coig::testing
