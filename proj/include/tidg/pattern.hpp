#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "homomorphism.hpp"
#include "instance.hpp"
#include "query.hpp"
#include "rewrite.hpp"

namespace tidg {

struct EdgeMetrics {
    std::size_t weight = 0;       // covered facts, unary ones included
    std::size_t side_weight = 0;  // left- plus right-incident oriented facts

    friend auto operator<=>(const EdgeMetrics&, const EdgeMetrics&) = default;
    friend bool operator==(const EdgeMetrics&, const EdgeMetrics&) = default;
};

inline EdgeMetrics edge_metrics(const Instance& inst, const DirectedEdge& e) {
    require_binary(inst, "edge_metrics");
    require_non_leaf(inst, e);
    return {covered_sigma_facts(inst, e).size(), left_incident(inst, e).size() + right_incident(inst, e).size()};
}

struct IterabilityVerdict {
    bool non_iterable = false;
    int n0 = 0;     // first failing iterate when non_iterable
    int n_max = 0;  // probe bound

    std::string str() const {
        return non_iterable ? "non-iterable (n0 = " + std::to_string(n0) + ")"
                            : "iterable up to n = " + std::to_string(n_max);
    }
};

inline constexpr int default_n_max = 16;

class NotAModel : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Scans n = 2..n_max in order; sound because satisfaction of iterates is
// downward closed.
inline IterabilityVerdict probe_iterability(const Query& q, const Instance& inst, const DirectedEdge& e,
                                            const IncidentPair& pair, int n_max = default_n_max,
                                            std::uint64_t budget = default_hom_budget) {
    if (n_max < 2) throw std::invalid_argument("probe_iterability needs n_max >= 2");
    require_non_leaf(inst, e);
    require_incident_pair(inst, e, pair);
    if (!eval_query(q, inst, budget)) throw NotAModel("the instance does not satisfy the query");
    for (int n = 2; n <= n_max; ++n)
        if (!eval_query(q, iterate_edge(inst, e, pair, n), budget)) return {true, n, n_max};
    return {false, 0, n_max};
}

inline bool is_tight(const Query& q, const Instance& inst, const DirectedEdge& e,
                     std::uint64_t budget = default_hom_budget) {
    require_non_leaf(inst, e);
    return !eval_query(q, dissociate_edge(inst, e), budget);
}

// Greedy single pass; by monotonicity no removed-later fact can become
// removable again, so the result is a minimal model.
inline Instance minimize_model(const Query& q, const Instance& inst, std::uint64_t budget = default_hom_budget) {
    if (!eval_query(q, inst, budget)) throw NotAModel("the instance does not satisfy the query");
    Instance current = inst;
    for (const auto& f : inst.facts()) {
        Instance smaller = current.without(f);
        if (eval_query(q, smaller, budget)) current = std::move(smaller);
    }
    return current;
}

inline bool is_minimal_model(const Query& q, const Instance& inst, std::uint64_t budget = default_hom_budget) {
    if (!eval_query(q, inst, budget)) return false;
    for (const auto& f : inst.facts())
        if (eval_query(q, inst.without(f), budget)) return false;
    return true;
}

// Extensional relations mentioned by the query, with their arities.
inline std::map<std::string, int> query_relations(const Query& q) {
    std::map<std::string, int> out;
    if (auto* u = std::get_if<UCQ>(&q.body)) {
        for (const auto& cq : u->disjuncts)
            for (const auto& a : cq.atoms) out[a.predicate] = static_cast<int>(a.args.size());
    } else if (auto* r = std::get_if<RPQ2>(&q.body)) {
        std::vector<const Regex*> stack{&r->expr};
        while (!stack.empty()) {
            const Regex* x = stack.back();
            stack.pop_back();
            if (x->kind == Regex::Kind::symbol) out[x->relation] = 2;
            for (const auto& c : x->children) stack.push_back(&c);
        }
    } else {
        const auto& p = std::get<DatalogProgram>(q.body);
        auto idb = p.intensional();
        for (const auto& rule : p.rules)
            for (const auto& a : rule.body)
                if (!idb.count(a.predicate)) out[a.predicate] = static_cast<int>(a.args.size());
    }
    return out;
}

struct SeedBounds {
    int domain_bound = 4;
    int max_facts = 4;
    std::size_t max_seeds = 200;
};

// Minimal models over the constants a, b, c, ... (at most domain_bound of
// them, used contiguously), with at most max_facts facts, one per
// isomorphism class. Supersets of models are never visited.
inline std::vector<Instance> enumerate_minimal_models(const Query& q, const SeedBounds& bounds = {},
                                                      std::uint64_t budget = default_hom_budget) {
    std::vector<Constant> names;
    for (int i = 0; i < bounds.domain_bound; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
    std::vector<Fact> universe;
    std::vector<std::pair<int, int>> slots;
    for (const auto& [rel, arity] : query_relations(q)) {
        if (arity != 2) continue;
        for (int i = 0; i < bounds.domain_bound; ++i)
            for (int j = 0; j < bounds.domain_bound; ++j) {
                universe.emplace_back(rel, names[static_cast<std::size_t>(i)], names[static_cast<std::size_t>(j)]);
                slots.emplace_back(i, j);
            }
    }

    std::vector<Instance> found;
    std::vector<std::size_t> chosen;
    auto contiguous = [&] {
        std::vector<bool> used(static_cast<std::size_t>(bounds.domain_bound), false);
        for (auto k : chosen) used[static_cast<std::size_t>(slots[k].first)] = used[static_cast<std::size_t>(slots[k].second)] = true;
        auto first_gap = std::find(used.begin(), used.end(), false);
        return std::find(first_gap, used.end(), true) == used.end();
    };
    auto current = [&] {
        std::vector<Fact> facts;
        for (auto k : chosen) facts.push_back(universe[k]);
        return Instance(std::move(facts));
    };
    auto dfs = [&](auto&& self, std::size_t from) -> void {
        if (found.size() >= bounds.max_seeds) return;
        if (!chosen.empty()) {
            Instance inst = current();
            if (eval_query(q, inst, budget)) {
                if (contiguous() && is_minimal_model(q, inst, budget)) {
                    bool seen = std::any_of(found.begin(), found.end(),
                                            [&](const Instance& g) { return g.size() == inst.size() && is_isomorphic(g, inst, budget); });
                    if (!seen) found.push_back(std::move(inst));
                }
                return;
            }
        }
        if (static_cast<int>(chosen.size()) >= bounds.max_facts) return;
        for (std::size_t k = from; k < universe.size(); ++k) {
            chosen.push_back(k);
            self(self, k + 1);
            chosen.pop_back();
        }
    };
    dfs(dfs, 0);
    std::sort(found.begin(), found.end(), [](const Instance& a, const Instance& b) {
        return a.size() != b.size() ? a.size() < b.size() : a.str() < b.str();
    });
    return found;
}

struct TightPattern {
    Instance instance;
    DirectedEdge edge;
    EdgeMetrics metrics;

    // Tie-breaking key: weight, side weight, then the serialized instance.
    auto key() const { return std::make_tuple(metrics.weight, metrics.side_weight, instance.str(), edge); }
};

struct TightPatternSearch {
    std::optional<TightPattern> best;
    std::vector<TightPattern> candidates;  // every tight edge met, sorted by key
    std::size_t seeds = 0;
    std::size_t dissociations = 0;
};

// Runs the iterative dissociation process from each minimized seed: while
// some non-leaf edge is not tight, dissociate it. Every tight edge seen on the
// way is a candidate; the smallest key wins.
inline TightPatternSearch find_minimal_tight_pattern(const Query& q, const std::vector<Instance>& seeds,
                                                     std::uint64_t budget = default_hom_budget) {
    TightPatternSearch out;
    std::set<std::string> seen_candidates;
    for (const auto& seed : seeds) {
        ++out.seeds;
        Instance current = minimize_model(q, seed, budget);
        for (;;) {
            std::optional<DirectedEdge> loose;
            for (const auto& [a, b] : non_leaf_edges(current)) {
                DirectedEdge e{a, b};
                if (is_tight(q, current, e, budget)) {
                    TightPattern p{current, e, edge_metrics(current, e)};
                    if (seen_candidates.insert(current.str() + e.str()).second) out.candidates.push_back(std::move(p));
                } else if (!loose) {
                    loose = e;
                }
            }
            if (!loose) break;
            current = dissociate_edge(current, *loose);
            ++out.dissociations;
        }
    }
    std::sort(out.candidates.begin(), out.candidates.end(),
              [](const TightPattern& a, const TightPattern& b) { return a.key() < b.key(); });
    if (!out.candidates.empty()) out.best = out.candidates.front();
    return out;
}

// Re-checks the invariants of a pattern from scratch.
inline bool is_valid_tight_pattern(const Query& q, const TightPattern& p, std::uint64_t budget = default_hom_budget) {
    if (!is_non_leaf_edge(p.instance, p.edge)) return false;
    if (!eval_query(q, p.instance, budget)) return false;
    if (edge_metrics(p.instance, p.edge) != p.metrics) return false;
    return is_tight(q, p.instance, p.edge, budget);
}

}  // namespace tidg
