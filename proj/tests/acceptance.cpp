// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace tidg;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool ok = true;
    std::string detail;

    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
    void check(bool cond, const std::string& why) {
        if (!cond) fail(why);
    }
};

std::vector<Query> suite() {
    return {fixtures::rst(), fixtures::rinv_st(), fixtures::chain(), fixtures::zigzag(),
            fixtures::q0(),  fixtures::q0_prime(), fixtures::q1()};
}

// --- graph corpora -------------------------------------------------------------

// Bipartite graphs as (a, b, edge cells over a x b); canonical under
// permutations of each side.
std::vector<BipartiteGraph> connected_bipartite(int max_side, std::size_t max_edges) {
    std::vector<BipartiteGraph> out;
    std::set<std::tuple<int, int, std::uint32_t>> seen;
    for (int a = 1; a <= max_side; ++a)
        for (int b = 1; b <= max_side; ++b) {
            int cells = a * b;
            std::vector<int> pa(static_cast<std::size_t>(a)), pb(static_cast<std::size_t>(b));
            for (std::uint32_t mask = 1; mask < (1u << cells); ++mask) {
                if (static_cast<std::size_t>(std::popcount(mask)) > max_edges) continue;
                std::uint32_t best = ~0u;
                std::iota(pa.begin(), pa.end(), 0);
                do {
                    std::iota(pb.begin(), pb.end(), 0);
                    do {
                        std::uint32_t m = 0;
                        for (int x = 0; x < a; ++x)
                            for (int y = 0; y < b; ++y)
                                if (mask >> (x * b + y) & 1) m |= 1u << (pa[static_cast<std::size_t>(x)] * b + pb[static_cast<std::size_t>(y)]);
                        best = std::min(best, m);
                    } while (std::next_permutation(pb.begin(), pb.end()));
                } while (std::next_permutation(pa.begin(), pa.end()));
                if (!seen.insert({a, b, best}).second) continue;
                BipartiteGraph h;
                for (int x = 0; x < a; ++x) h.A.push_back("a" + std::to_string(x));
                for (int y = 0; y < b; ++y) h.B.push_back("b" + std::to_string(y));
                for (int x = 0; x < a; ++x)
                    for (int y = 0; y < b; ++y)
                        if (best >> (x * b + y) & 1) h.C.push_back({h.A[static_cast<std::size_t>(x)], h.B[static_cast<std::size_t>(y)]});
                if (h.connected()) out.push_back(h);
            }
        }
    return out;
}

BipartiteGraph random_connected_bipartite(std::mt19937_64& rng, int min_vertices, int max_side, std::size_t max_edges) {
    std::uniform_int_distribution<int> side(1, max_side);
    for (;;) {
        int a = side(rng), b = side(rng);
        if (a + b < min_vertices) continue;
        BipartiteGraph h;
        for (int x = 0; x < a; ++x) h.A.push_back("a" + std::to_string(x));
        for (int y = 0; y < b; ++y) h.B.push_back("b" + std::to_string(y));
        std::vector<std::pair<std::string, std::string>> cells;
        for (const auto& x : h.A)
            for (const auto& y : h.B) cells.push_back({x, y});
        std::shuffle(cells.begin(), cells.end(), rng);
        std::uniform_int_distribution<std::size_t> ne(static_cast<std::size_t>(a + b - 1), std::min(max_edges, cells.size()));
        if (static_cast<std::size_t>(a + b - 1) > std::min(max_edges, cells.size())) continue;
        cells.resize(ne(rng));
        h.C = cells;
        if (h.connected()) return h;
    }
}

// St-graphs with at most max_edges edges, s and t plus up to max_edges - 1
// further vertices, none of them isolated; canonical under permutations of
// the further vertices.
std::vector<StGraph> st_graphs(int max_edges) {
    std::vector<StGraph> out;
    std::set<std::pair<int, std::uint32_t>> seen;
    for (int k = 0; k < max_edges; ++k) {
        int nv = k + 2;  // 0 = s, 1 = t
        std::vector<std::pair<int, int>> pairs;
        for (int x = 0; x < nv; ++x)
            for (int y = x + 1; y < nv; ++y) pairs.push_back({x, y});
        auto index = [&](int x, int y) {
            if (x > y) std::swap(x, y);
            return static_cast<int>(std::find(pairs.begin(), pairs.end(), std::make_pair(x, y)) - pairs.begin());
        };
        std::vector<int> chosen;
        std::function<void(std::size_t)> rec = [&](std::size_t from) {
            std::uint32_t mask = 0;
            for (int c : chosen) mask |= 1u << c;
            std::vector<int> deg(static_cast<std::size_t>(nv), 0);
            for (int c : chosen) ++deg[static_cast<std::size_t>(pairs[static_cast<std::size_t>(c)].first)], ++deg[static_cast<std::size_t>(pairs[static_cast<std::size_t>(c)].second)];
            bool no_isolated = true;
            for (int v = 2; v < nv; ++v) no_isolated = no_isolated && deg[static_cast<std::size_t>(v)] > 0;
            if (no_isolated) {
                std::vector<int> perm(static_cast<std::size_t>(k));
                std::iota(perm.begin(), perm.end(), 2);
                std::uint32_t best = ~0u;
                do {
                    auto img = [&](int v) { return v < 2 ? v : perm[static_cast<std::size_t>(v - 2)]; };
                    std::uint32_t m = 0;
                    for (int c : chosen) m |= 1u << index(img(pairs[static_cast<std::size_t>(c)].first), img(pairs[static_cast<std::size_t>(c)].second));
                    best = std::min(best, m);
                } while (std::next_permutation(perm.begin(), perm.end()));
                if (seen.insert({nv, best}).second) {
                    StGraph g;
                    g.s = "s";
                    g.t = "t";
                    g.W = {"s", "t"};
                    for (int v = 2; v < nv; ++v) g.W.push_back("w" + std::to_string(v));
                    for (std::size_t c = 0; c < pairs.size(); ++c)
                        if (best >> c & 1) g.C.push_back({g.W[static_cast<std::size_t>(pairs[c].first)], g.W[static_cast<std::size_t>(pairs[c].second)]});
                    out.push_back(g);
                }
            }
            if (static_cast<int>(chosen.size()) == max_edges) return;
            for (std::size_t c = from; c < pairs.size(); ++c) {
                chosen.push_back(static_cast<int>(c));
                rec(c + 1);
                chosen.pop_back();
            }
        };
        rec(0);
    }
    return out;
}

StGraph random_st_graph(std::mt19937_64& rng, int min_edges, int max_edges) {
    std::uniform_int_distribution<int> ne(min_edges, max_edges);
    int m = ne(rng);
    std::uniform_int_distribution<int> nvd(2, std::max(2, m));
    int nv = nvd(rng);
    StGraph g;
    g.s = "s";
    g.t = "t";
    g.W = {"s", "t"};
    for (int v = 2; v < nv; ++v) g.W.push_back("w" + std::to_string(v));
    std::vector<std::pair<std::string, std::string>> pairs;
    for (std::size_t x = 0; x < g.W.size(); ++x)
        for (std::size_t y = x + 1; y < g.W.size(); ++y) pairs.push_back({g.W[x], g.W[y]});
    std::shuffle(pairs.begin(), pairs.end(), rng);
    pairs.resize(std::min(pairs.size(), static_cast<std::size_t>(m)));
    g.C = pairs;
    return g;
}

// --- shared state across criteria ----------------------------------------------

struct Shared {
    std::size_t gfomc_checked = 0, gfomc_failed = 0;
    std::size_t spot_runs = 0;
    std::vector<std::string> spot_failures;
    std::optional<TightPattern> st_pattern;
    std::optional<IncidentPair> st_pair;
    std::optional<Fact> st_mid;
};

Shared shared;

void record(const Json& report) {
    if (report.contains("gfomc")) {
        ++shared.gfomc_checked;
        if (!report["gfomc"].get<bool>()) ++shared.gfomc_failed;
    }
}

// --- criteria ------------------------------------------------------------------

Outcome golden_iterate() {
    Outcome o;
    auto i = fixtures::rst_path();
    DirectedEdge e{"b", "c"};
    auto p = incident_pairs(i, e).front();
    auto it2 = iterate_edge(i, e, p, 2);
    o.check(oracle::isomorphic(it2, fixtures::rst_path_iterate2()), "iterate(2) = " + it2.str());
    auto q = fixtures::rst();
    o.check(eval_query(q, iterate_edge(i, e, p, 1)), "iterate(1) violates R S* T");
    for (int n = 2; n <= 4; ++n) o.check(!eval_query(q, iterate_edge(i, e, p, n)), "iterate(" + std::to_string(n) + ") satisfies R S* T");
    return o;
}

Outcome golden_dissociation() {
    Outcome o;
    auto d = dissociate_edge(fixtures::dissociation_input(), {"a", "b"});
    o.check(oracle::isomorphic(d, fixtures::dissociation_expected()), "got " + d.str());
    return o;
}

std::vector<Instance> non_leaf_corpus() {
    std::mt19937_64 rng(2024);
    std::vector<Instance> out;
    while (out.size() < 20) {
        auto i = oracle::random_instance(rng, 6, 5);
        if (!non_leaf_edges(i).empty()) out.push_back(i);
    }
    return out;
}

Outcome iterate_suite() {
    Outcome o;
    auto qs = suite();
    std::size_t pairs = 0;
    for (const auto& inst : non_leaf_corpus())
        for (const auto& [a, b] : non_leaf_edges(inst))
            for (DirectedEdge e : {DirectedEdge{a, b}, DirectedEdge{b, a}})
                for (const auto& p : incident_pairs(inst, e)) {
                    ++pairs;
                    std::vector<Instance> it{Instance{}};
                    for (int n = 1; n <= 4; ++n) it.push_back(iterate_edge(inst, e, p, n));
                    for (int i = 1; i <= 4; ++i)
                        for (int j = i; j <= 4; ++j)
                            o.check(find_homomorphism(it[static_cast<std::size_t>(j)], it[static_cast<std::size_t>(i)]).found(),
                                    "no hom iterate(" + std::to_string(j) + ") -> iterate(" + std::to_string(i) + ") on " + inst.str());
                    for (const auto& q : qs) {
                        bool dropped = false;
                        for (int n = 1; n <= 4; ++n) {
                            bool sat = eval_query(q, it[static_cast<std::size_t>(n)]);
                            o.check(!(dropped && sat), "satisfaction set not a prefix for " + to_text(q) + " on " + inst.str());
                            dropped = dropped || !sat;
                        }
                    }
                }
    o.detail = o.ok ? std::to_string(pairs) + " (edge, pair) cases" : o.detail;
    return o;
}

Outcome dissociation_suite() {
    Outcome o;
    std::size_t total = 0;
    for (const auto& inst : non_leaf_corpus()) {
        auto cur = inst;
        std::size_t initial = non_leaf_edges(cur).size(), steps = 0;
        while (!non_leaf_edges(cur).empty()) {
            auto before = non_leaf_edges(cur);
            auto [a, b] = before.front();
            cur = dissociate_edge(cur, {a, b});
            ++steps;
            o.check(non_leaf_edges(cur).size() + 1 == before.size(), "count did not drop by 1 on " + inst.str());
            if (steps > initial + 1) break;
        }
        o.check(steps == initial, "terminated after " + std::to_string(steps) + " steps, expected " + std::to_string(initial));
        total += steps;
    }
    if (o.ok) o.detail = std::to_string(total) + " dissociations";
    return o;
}

Outcome pp2dnf_equality() {
    Outcome o;
    auto q = fixtures::rst();
    auto inst = fixtures::rst_path();
    DirectedEdge e{"b", "c"};
    auto pair = incident_pairs(inst, e).front();
    auto verdict = probe_iterability(q, inst, e, pair);
    o.check(verdict.non_iterable && verdict.n0 == 2, "probe did not find n0 = 2");
    if (!o.ok) return o;

    auto graphs = connected_bipartite(3, 6);
    std::size_t exhaustive = graphs.size();
    std::mt19937_64 rng(77);
    for (int k = 0; k < 50; ++k) graphs.push_back(random_connected_bipartite(rng, 7, 5, 10));
    for (const auto& h : graphs) {
        VerifyOptions opt;
        opt.spot_checks = 16;
        auto r = verify_pp2dnf(q, inst, e, pair, verdict.n0, h, opt);
        record(r);
        o.check(r["prerequisites_ok"].get<bool>(), "prerequisites failed");
        o.check(!r["equal"].is_null() && r["equal"].get<bool>(), "inequality on " + Json(h).dump());
        // Cross-check the counter against the oracle too.
        o.check(count_pp2dnf(h) == BigInt(oracle::count_pp2dnf(h)), "counter disagrees with oracle");
    }
    if (o.ok) o.detail = std::to_string(exhaustive) + " exhaustive + 50 random graphs";
    return o;
}

Outcome stcon_equality() {
    Outcome o;
    auto q = fixtures::zigzag();
    auto seeds = enumerate_minimal_models(q);
    auto search = find_minimal_tight_pattern(q, seeds);
    o.check(search.best.has_value(), "no tight pattern for the zig-zag query");
    if (!o.ok) return o;
    const auto& tp = *search.best;
    o.check(is_valid_tight_pattern(q, tp), "returned pattern is not tight");

    // First incident pair and covered fact that pass the in-harness
    // prerequisites on a trivial graph.
    StGraph single{{"s", "t"}, {{"s", "t"}}, "s", "t"};
    for (const auto& p : incident_pairs(tp.instance, tp.edge)) {
        for (const auto& f : covered_sigma_facts(tp.instance, tp.edge)) {
            if (f.is_unary()) continue;
            auto r = verify_stcon(q, tp, p, f, single);
            if (r["prerequisites_ok"].get<bool>()) {
                shared.st_pair = p;
                shared.st_mid = f;
                break;
            }
        }
        if (shared.st_pair) break;
    }
    o.check(shared.st_pair.has_value(), "no incident pair passes the prerequisites");
    if (!o.ok) return o;
    shared.st_pattern = tp;

    auto graphs = st_graphs(5);
    std::size_t exhaustive = graphs.size();
    std::mt19937_64 rng(91);
    for (int k = 0; k < 30; ++k) graphs.push_back(random_st_graph(rng, 1, 10));
    for (const auto& g : graphs) {
        VerifyOptions opt;
        opt.spot_checks = 16;
        auto r = verify_stcon(q, tp, *shared.st_pair, *shared.st_mid, g, opt);
        record(r);
        o.check(r["prerequisites_ok"].get<bool>(), "prerequisites failed on " + Json(g).dump() + ": " + r.value("reason", ""));
        o.check(!r["equal"].is_null() && r["equal"].get<bool>(), "inequality on " + Json(g).dump());
        o.check(count_stcon(g) == BigInt(oracle::count_stcon(g)), "counter disagrees with oracle");
    }
    if (o.ok)
        o.detail = "pattern " + tp.instance.str() + " at " + tp.edge.str() + "; " + std::to_string(exhaustive) +
                   " exhaustive + 30 random graphs";
    return o;
}

Outcome spot_checks() {
    Outcome o;
    std::mt19937_64 rng(5);
    std::size_t runs = 0, total = 0;
    auto take = [&](const Json& r, const std::string& what) {
        record(r);
        ++runs;
        auto checked = r["spot_checks"]["checked"].get<std::size_t>();
        auto passed = r["spot_checks"]["passed"].get<std::size_t>();
        total += checked;
        o.check(checked >= 100, what + ": only " + std::to_string(checked) + " worlds checked");
        o.check(passed == checked, what + ": " + r["spot_checks"]["failures"].dump());
    };

    auto inst = fixtures::rst_path();
    DirectedEdge e{"b", "c"};
    auto pair = incident_pairs(inst, e).front();
    for (int k = 0; k < 5; ++k) {
        VerifyOptions opt;
        opt.spot_checks = 128;
        opt.rng_seed = static_cast<std::uint64_t>(k);
        auto h = random_connected_bipartite(rng, 8, 5, 10);
        take(verify_pp2dnf(fixtures::rst(), inst, e, pair, 2, h, opt), "pp2dnf " + Json(h).dump());
    }

    if (!shared.st_pattern) {
        o.fail("no tight pattern available");
        return o;
    }
    for (int k = 0; k < 5; ++k) {
        VerifyOptions opt;
        opt.spot_checks = 128;
        opt.rng_seed = static_cast<std::uint64_t>(k);
        auto g = random_st_graph(rng, 8, 10);
        take(verify_stcon(fixtures::zigzag(), *shared.st_pattern, *shared.st_pair, *shared.st_mid, g, opt),
             "stcon " + Json(g).dump());
    }
    take(verify_stcon(fixtures::zigzag(), *shared.st_pattern, *shared.st_pair, *shared.st_mid, fixtures::network_g(), {}),
         "stcon sample graph");
    if (o.ok) o.detail = std::to_string(runs) + " runs, " + std::to_string(total) + " worlds";
    return o;
}

bool fine_dissociations_violate(const Query& q, const TightPattern& tp, std::size_t& cases) {
    bool ok = true;
    for (const auto& p : incident_pairs(tp.instance, tp.edge))
        for (const auto& f : covered_sigma_facts(tp.instance, tp.edge)) {
            if (f.is_unary()) continue;
            ++cases;
            ok = ok && !eval_query(q, fine_dissociate(tp.instance, tp.edge, p, f));
        }
    return ok;
}

// The property needs minimality: it is checked on the returned pattern and
// on every candidate tying it on (weight, side weight). Candidates with a
// larger side weight are only counted.
Outcome fine_dissociation_property() {
    Outcome o;
    std::size_t patterns = 0, cases = 0, larger = 0, larger_violating = 0;
    for (const auto& q : suite()) {
        auto search = find_minimal_tight_pattern(q, enumerate_minimal_models(q));
        if (!search.best) continue;
        for (const auto& tp : search.candidates) {
            if (tp.metrics == search.best->metrics) {
                ++patterns;
                o.check(fine_dissociations_violate(q, tp, cases),
                        "fine dissociation satisfies " + to_text(q) + " on " + tp.instance.str() + " at " + tp.edge.str());
            } else {
                std::size_t ignored = 0;
                ++larger;
                if (!fine_dissociations_violate(q, tp, ignored)) ++larger_violating;
            }
        }
    }
    o.check(patterns > 0, "the search returned no pattern");
    if (o.ok)
        o.detail = std::to_string(patterns) + " minimal patterns, " + std::to_string(cases) + " (pair, F_m) cases; " +
                   std::to_string(larger_violating) + " of " + std::to_string(larger) +
                   " non-minimal candidates have a satisfying fine dissociation";
    return o;
}

Outcome gfomc() {
    Outcome o;
    o.check(shared.gfomc_checked > 0, "no codings were generated");
    o.check(shared.gfomc_failed == 0, std::to_string(shared.gfomc_failed) + " codings are not GFOMC");
    std::mt19937_64 rng(17);
    const char* choices[] = {"0", "1/2", "1"};
    std::uniform_int_distribution<int> pick(0, 2);
    std::size_t tids = 0;
    for (int k = 0; k < 60; ++k) {
        std::vector<std::pair<Fact, Rational>> entries;
        for (const auto& f : oracle::random_instance(rng, 10, 4)) entries.emplace_back(f, Rational::parse(choices[pick(rng)]));
        TID t(entries);
        o.check(is_gfomc(t), "random GFOMC input rejected");
        ++tids;
        auto m = t.uncertain_indices().size();
        for (const auto& q : suite()) {
            auto scaled = pqe_exact(q, t) * Rational(BigInt(1) << m, BigInt(1));
            o.check(scaled.denominator() == BigInt(1), "Pr not a multiple of 2^-m on " + t.str());
        }
    }
    if (o.ok) o.detail = std::to_string(shared.gfomc_checked) + " codings, " + std::to_string(tids) + " random TIDs";
    return o;
}

Outcome unary_translation() {
    Outcome o;
    std::vector<Query> qs{
        parse_ucq("q :- a(X), r(X,Y), s(Y,Z).", true),
        parse_ucq("q :- r(X,Y), b(Y).\nq :- a(X), t(X,X).", true),
        parse_datalog("u(X) :- a(X). u(Y) :- u(X), s(X,Y). goal :- u(X), t(X,Y).", true),
        parse_datalog("u(Y) :- r(X,Y). u(Y) :- u(X), s(X,Y). goal :- u(X), b(X).", true),
        fixtures::q0(),
        fixtures::zigzag(),
    };
    std::mt19937_64 rng(29);
    std::uniform_int_distribution<int> nc(0, 3), kind(0, 4), prob(0, 4), count(1, 10);
    const char* probs[] = {"1/2", "1/3", "2/5", "3/4", "1"};
    const char* unary[] = {"A", "B"};
    const char* binary[] = {"R", "S", "T"};
    for (int k = 0; k < 50; ++k) {
        std::map<Fact, Rational> entries;
        std::size_t uncertain = 0;
        int want = count(rng);
        for (int tries = 0; tries < 100 && static_cast<int>(entries.size()) < want + 2; ++tries) {
            auto c = [&] { return "c" + std::to_string(nc(rng)); };
            int kd = kind(rng);
            Fact f = kd < 2 ? Fact::monadic(unary[kd], c()) : Fact(binary[kd - 2], c(), c());
            if (entries.count(f)) continue;
            Rational p = Rational::parse(probs[prob(rng)]);
            if (!p.is_one()) {
                if (uncertain == 10) continue;
                ++uncertain;
            }
            entries.emplace(f, p);
        }
        TID t(std::vector<std::pair<Fact, Rational>>(entries.begin(), entries.end()));
        TID tb = unary_to_binary(t);
        for (const auto& q : qs) {
            auto before = pqe_exact(q, t);
            auto after = pqe_exact(unary_to_binary(q), tb);
            o.check(before == after, "Pr changed for " + to_text(q) + " on " + t.str());
        }
    }
    if (o.ok) o.detail = "50 TIDs x " + std::to_string(qs.size()) + " queries";
    return o;
}

// Every R-instance over at most three constants.
std::vector<Instance> small_corpus() {
    std::vector<Instance> out;
    std::vector<std::string> names{"x", "y", "z"};
    for (std::uint32_t mask = 1; mask < (1u << 9); ++mask) {
        std::vector<Fact> facts;
        for (int c = 0; c < 9; ++c)
            if (mask >> c & 1) facts.emplace_back("R", names[static_cast<std::size_t>(c / 3)], names[static_cast<std::size_t>(c % 3)]);
        out.emplace_back(facts);
    }
    return out;
}

Outcome oracle_equivalence() {
    Outcome o;
    auto corpus = small_corpus();
    std::size_t pairs = 0;
    for (const auto& a : corpus)
        for (const auto& b : corpus) {
            ++pairs;
            if (find_homomorphism(a, b).found() != oracle::hom_exists(a, b)) o.fail(a.str() + " -> " + b.str());
        }
    std::mt19937_64 rng(37);
    for (int k = 0; k < 5000; ++k) {
        auto a = oracle::random_instance(rng, 6, 5, {"R", "S"});
        auto b = oracle::random_instance(rng, 8, 5, {"R", "S"});
        ++pairs;
        if (find_homomorphism(a, b).found() != oracle::hom_exists(a, b)) o.fail(a.str() + " -> " + b.str());
    }

    std::size_t tids = 0;
    const char* probs[] = {"1/2", "1/3", "2/7", "0", "1", "3/5"};
    std::uniform_int_distribution<int> prob(0, 5);
    for (std::size_t m = 0; m <= 12; ++m) {
        std::vector<std::pair<Fact, Rational>> entries;
        std::size_t c = 0;
        std::set<Fact> used;
        while (entries.size() < m) {
            Fact f("R", "c" + std::to_string(c / 4), "c" + std::to_string(c % 4 + 4));
            ++c;
            Rational p = Rational::parse(probs[prob(rng)]);
            if (p.is_one()) p = Rational(1, 2);
            entries.emplace_back(f, p);
        }
        entries.emplace_back(Fact("S", "k", "k"), Rational(1));
        TID t(entries);
        const auto& facts = t.instance().facts();
        Rational total(0);
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << facts.size()); ++mask) {
            std::vector<Fact> w;
            for (std::size_t i = 0; i < facts.size(); ++i)
                if (mask >> i & 1) w.push_back(facts[i]);
            total += world_probability(t, Instance(w));
        }
        ++tids;
        o.check(total == Rational(1), "world probabilities sum to " + total.str() + " on " + t.str());
    }
    if (o.ok) o.detail = std::to_string(pairs) + " instance pairs, " + std::to_string(tids) + " TIDs";
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
        double limit_s;  // 0: no runtime bound
    };
    std::vector<Criterion> criteria{
        {"1 golden iterate", golden_iterate, 1},
        {"2 golden dissociation", golden_dissociation, 1},
        {"3 iterate homomorphisms and prefix sets", iterate_suite, 60},
        {"4 dissociation count and termination", dissociation_suite, 0},
        {"5 PP2DNF equality", pp2dnf_equality, 600},
        {"6 ST-CON equality", stcon_equality, 600},
        {"7 homomorphism spot checks", spot_checks, 0},
        {"8 fine dissociation violates the query", fine_dissociation_property, 0},
        {"9 GFOMC", gfomc, 0},
        {"10 unary-to-binary translation", unary_translation, 0},
        {"11 oracle equivalence", oracle_equivalence, 0},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        auto start = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& ex) {
            o.fail(std::string("exception: ") + ex.what());
        }
        double secs = std::chrono::duration<double>(Clock::now() - start).count();
        if (c.limit_s > 0 && secs > c.limit_s) o.fail("took " + std::to_string(secs) + " s");
        if (!o.ok) ++failed;
        std::replace(o.detail.begin(), o.detail.end(), '\n', ' ');
        std::printf("%s  %-44s %8.2f s  %s\n", o.ok ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
