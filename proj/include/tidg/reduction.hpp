#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "homomorphism.hpp"
#include "instance.hpp"
#include "pattern.hpp"
#include "query.hpp"
#include "rewrite.hpp"
#include "tid.hpp"

namespace tidg {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Source problems

struct BipartiteGraph {
    std::vector<std::string> A, B;
    std::vector<std::pair<std::string, std::string>> C;

    void validate() const {
        std::set<std::string> a(A.begin(), A.end()), b(B.begin(), B.end());
        if (a.size() != A.size() || b.size() != B.size()) throw std::invalid_argument("duplicate vertex name");
        for (const auto& x : A)
            if (b.count(x)) throw std::invalid_argument("vertex " + x + " is on both sides");
        std::set<std::pair<std::string, std::string>> seen;
        for (const auto& [x, y] : C) {
            if (!a.count(x) || !b.count(y)) throw std::invalid_argument("edge " + x + "-" + y + " is not in A x B");
            if (!seen.insert({x, y}).second) throw std::invalid_argument("duplicate edge " + x + "-" + y);
        }
    }

    // Vertex indices: A first, then B.
    std::size_t vertices() const { return A.size() + B.size(); }

    // Connected components as index sets over A ++ B.
    std::vector<std::vector<std::size_t>> components() const {
        std::map<std::string, std::size_t> idx;
        for (std::size_t i = 0; i < A.size(); ++i) idx[A[i]] = i;
        for (std::size_t j = 0; j < B.size(); ++j) idx[B[j]] = A.size() + j;
        std::vector<std::size_t> parent(vertices());
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](std::size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (const auto& [x, y] : C) parent[find(idx[x])] = find(idx[y]);
        std::map<std::size_t, std::vector<std::size_t>> groups;
        for (std::size_t i = 0; i < vertices(); ++i) groups[find(i)].push_back(i);
        std::vector<std::vector<std::size_t>> out;
        for (auto& [_, g] : groups) out.push_back(std::move(g));
        return out;
    }

    bool connected() const { return vertices() > 0 && components().size() == 1; }

    // Subgraph induced by vertex indices over A ++ B.
    BipartiteGraph induced(const std::vector<std::size_t>& keep) const {
        BipartiteGraph out;
        std::set<std::string> names;
        for (auto i : keep) {
            if (i < A.size()) out.A.push_back(A[i]);
            else out.B.push_back(B[i - A.size()]);
            names.insert(i < A.size() ? A[i] : B[i - A.size()]);
        }
        for (const auto& c : C)
            if (names.count(c.first)) out.C.push_back(c);
        return out;
    }
};

struct StGraph {
    std::vector<std::string> W;
    std::vector<std::pair<std::string, std::string>> C;
    std::string s, t;

    void validate() const {
        std::set<std::string> w(W.begin(), W.end());
        if (w.size() != W.size()) throw std::invalid_argument("duplicate vertex name");
        if (!w.count(s) || !w.count(t)) throw std::invalid_argument("s and t must be vertices");
        if (s == t) throw std::invalid_argument("s and t must differ");
        std::set<std::pair<std::string, std::string>> seen;
        for (const auto& [a, b] : C) {
            if (!w.count(a) || !w.count(b)) throw std::invalid_argument("edge " + a + "-" + b + " uses an unknown vertex");
            if (a == b) throw std::invalid_argument("self-loop on " + a);
            if (!seen.insert(std::minmax(a, b)).second) throw std::invalid_argument("duplicate edge " + a + "-" + b);
        }
    }

    // Whether s and t are connected using the edges selected by `mask`.
    bool connects(std::uint64_t mask) const { return path(mask).has_value(); }

    // A shortest s,t-path (edge indices) within the selected edges.
    std::optional<std::vector<std::size_t>> path(std::uint64_t mask) const {
        std::map<std::string, std::vector<std::pair<std::string, std::size_t>>> adj;
        for (std::size_t k = 0; k < C.size(); ++k) {
            if (!(mask >> k & 1)) continue;
            adj[C[k].first].push_back({C[k].second, k});
            adj[C[k].second].push_back({C[k].first, k});
        }
        std::map<std::string, std::pair<std::string, std::size_t>> via;
        std::vector<std::string> queue{s};
        std::set<std::string> seen{s};
        for (std::size_t h = 0; h < queue.size(); ++h) {
            auto x = queue[h];
            if (x == t) break;
            for (const auto& [y, k] : adj[x])
                if (seen.insert(y).second) {
                    via[y] = {x, k};
                    queue.push_back(y);
                }
        }
        if (!seen.count(t)) return std::nullopt;
        std::vector<std::size_t> edges;
        for (std::string x = t; x != s; x = via[x].first) edges.push_back(via[x].second);
        std::reverse(edges.begin(), edges.end());
        return edges;
    }
};

inline void to_json(Json& j, const BipartiteGraph& h) {
    j = Json{{"A", h.A}, {"B", h.B}, {"C", Json::array()}};
    for (const auto& [a, b] : h.C) j["C"].push_back({a, b});
}
inline void from_json(const Json& j, BipartiteGraph& h) {
    h.A = j.at("A").get<std::vector<std::string>>();
    h.B = j.at("B").get<std::vector<std::string>>();
    h.C.clear();
    for (const auto& e : j.at("C")) h.C.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    h.validate();
}
inline void to_json(Json& j, const StGraph& g) {
    j = Json{{"W", g.W}, {"C", Json::array()}, {"s", g.s}, {"t", g.t}};
    for (const auto& [a, b] : g.C) j["C"].push_back({a, b});
}
inline void from_json(const Json& j, StGraph& g) {
    g.W = j.at("W").get<std::vector<std::string>>();
    g.C.clear();
    for (const auto& e : j.at("C")) g.C.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    g.s = j.at("s").get<std::string>();
    g.t = j.at("t").get<std::string>();
    g.validate();
}

inline constexpr unsigned default_count_exponent = 30;

class CountCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Good worlds: vertex subsets containing an adjacent pair. A world is bad iff
// it is bad on every component, so good = 2^|V| - prod(bad_i).
inline BigInt count_pp2dnf(const BipartiteGraph& h, unsigned max_exponent = default_count_exponent) {
    h.validate();
    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < h.A.size(); ++i) idx[h.A[i]] = i;
    for (std::size_t j = 0; j < h.B.size(); ++j) idx[h.B[j]] = h.A.size() + j;
    BigInt bad = 1;
    for (const auto& comp : h.components()) {
        if (comp.size() > max_exponent)
            throw CountCapExceeded("component with " + std::to_string(comp.size()) + " vertices exceeds the cap");
        std::map<std::size_t, std::size_t> local;
        for (std::size_t k = 0; k < comp.size(); ++k) local[comp[k]] = k;
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        for (const auto& [a, b] : h.C)
            if (local.count(idx[a])) edges.emplace_back(local[idx[a]], local[idx[b]]);
        std::uint64_t comp_bad = 0;
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << comp.size()); ++mask) {
            bool good = std::any_of(edges.begin(), edges.end(),
                                    [&](const auto& e) { return (mask >> e.first & 1) && (mask >> e.second & 1); });
            if (!good) ++comp_bad;
        }
        bad *= comp_bad;
    }
    return (BigInt(1) << h.vertices()) - bad;
}

inline BigInt count_stcon(const StGraph& g, unsigned max_exponent = default_count_exponent) {
    g.validate();
    if (g.C.size() > max_exponent) throw CountCapExceeded(std::to_string(g.C.size()) + " edges exceed the cap");
    BigInt good = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << g.C.size()); ++mask)
        if (g.connects(mask)) ++good;
    return good;
}

// ---------------------------------------------------------------------------
// Codings

// Pairs each external item (vertex of H, edge of G) with the uncertain fact
// that represents it; an external world is a bitmask over the items.
struct WorldMap {
    struct Item {
        std::string kind;  // "A", "B" or "C"
        std::string name;
        Fact fact;
    };
    std::vector<Item> items;

    std::size_t size() const { return items.size(); }

    Instance to_tid_world(const TID& t, std::uint64_t mask) const {
        std::vector<Fact> facts;
        const auto& all = t.instance().facts();
        for (std::size_t i = 0; i < all.size(); ++i)
            if (t.probabilities()[i].is_one()) facts.push_back(all[i]);
        for (std::size_t k = 0; k < items.size(); ++k)
            if (mask >> k & 1) facts.push_back(items[k].fact);
        return Instance(std::move(facts));
    }

    std::uint64_t from_tid_world(const Instance& world) const {
        std::uint64_t mask = 0;
        for (std::size_t k = 0; k < items.size(); ++k)
            if (world.contains(items[k].fact)) mask |= std::uint64_t{1} << k;
        return mask;
    }
};

inline void to_json(Json& j, const WorldMap& w) {
    j = Json::array();
    for (const auto& it : w.items) j.push_back({{"kind", it.kind}, {"name", it.name}, {"fact", it.fact.str()}});
}
inline void from_json(const Json& j, WorldMap& w) {
    w.items.clear();
    for (const auto& it : j)
        w.items.push_back({it.at("kind").get<std::string>(), it.at("name").get<std::string>(),
                           parse_fact(it.at("fact").get<std::string>())});
}

struct Coding {
    TID tid;
    WorldMap worlds;
};

namespace detail {

struct CodingBuilder {
    std::map<Fact, Rational> probs;

    void add(const Fact& f, const Rational& p = Rational(1)) {
        auto [it, fresh] = probs.emplace(f, p);
        if (!fresh && it->second != p) throw std::logic_error("coding assigns two probabilities to " + f.str());
    }
    void add_all(const std::vector<Fact>& fs) {
        for (const auto& f : fs) add(f);
    }
    TID finish() const { return TID(std::vector<std::pair<Fact, Rational>>(probs.begin(), probs.end())); }
};

inline void check_uncertain(const TID& t, std::size_t expected) {
    if (t.uncertain_indices().size() != expected)
        throw std::logic_error("coding produced " + std::to_string(t.uncertain_indices().size()) +
                               " uncertain facts, expected " + std::to_string(expected));
}

}  // namespace detail

// Each edge c = (a,b) of H becomes a back-and-forth path of 2n-1 copies of e
// from u_a to v_b; F_l copies at the u_a and F_r copies at the v_b are the
// uncertain facts.
inline Coding code_pp2dnf(const Instance& inst, const DirectedEdge& e, const IncidentPair& pair, int n,
                          const BipartiteGraph& h) {
    if (n < 1) throw std::invalid_argument("code_pp2dnf needs n >= 1");
    detail::check_rewrite_input(inst, e, "code_pp2dnf");
    require_incident_pair(inst, e, pair);
    h.validate();
    if (!h.connected()) throw std::invalid_argument("code_pp2dnf needs a connected bipartite graph");

    auto taken = inst.domain_set();
    std::map<std::string, Constant> ua, vb;
    for (std::size_t i = 0; i < h.A.size(); ++i) ua[h.A[i]] = fresh_name(taken, e.u + "@A" + std::to_string(i + 1));
    for (std::size_t j = 0; j < h.B.size(); ++j) vb[h.B[j]] = fresh_name(taken, e.v + "@B" + std::to_string(j + 1));
    // u_{c,i} for 2 <= i <= n and v_{c,i} for 1 <= i <= n-1, with u_{c,1} = u_a
    // and v_{c,n} = v_b.
    std::vector<std::vector<Constant>> uc(h.C.size()), vc(h.C.size());
    for (std::size_t k = 0; k < h.C.size(); ++k) {
        std::string tag = "@C" + std::to_string(k + 1) + "#";
        uc[k].push_back(ua[h.C[k].first]);
        for (int i = 2; i <= n; ++i) uc[k].push_back(fresh_name(taken, e.u + tag + std::to_string(i)));
        for (int i = 1; i <= n - 1; ++i) vc[k].push_back(fresh_name(taken, e.v + tag + std::to_string(i)));
        vc[k].push_back(vb[h.C[k].second]);
    }

    detail::CodingBuilder b;
    b.add_all(inst.induced(detail::without_edge(inst, e)).facts());
    WorldMap wm;
    const Rational half(1, 2);
    for (const auto& a : h.A) {
        Fact f = detail::moved(pair.left, e.u, ua[a]);
        b.add(f, half);
        wm.items.push_back({"A", a, f});
    }
    for (const auto& bb : h.B) {
        Fact f = detail::moved(pair.right, e.v, vb[bb]);
        b.add(f, half);
        wm.items.push_back({"B", bb, f});
    }
    for (const auto& l : left_incident(inst, e)) {
        if (l == pair.left) continue;
        for (const auto& a : h.A) b.add(detail::moved(l, e.u, ua[a]));
        for (std::size_t k = 0; k < h.C.size(); ++k)
            for (std::size_t i = 1; i < uc[k].size(); ++i) b.add(detail::moved(l, e.u, uc[k][i]));
    }
    for (const auto& r : right_incident(inst, e)) {
        if (r == pair.right) continue;
        for (const auto& bb : h.B) b.add(detail::moved(r, e.v, vb[bb]));
        for (std::size_t k = 0; k < h.C.size(); ++k)
            for (std::size_t i = 0; i + 1 < vc[k].size(); ++i) b.add(detail::moved(r, e.v, vc[k][i]));
    }
    for (std::size_t k = 0; k < h.C.size(); ++k) {
        for (int i = 0; i < n; ++i) {
            auto si = static_cast<std::size_t>(i);
            b.add_all(detail::edge_copy(inst, e, {uc[k][si], vc[k][si]}));
            if (i + 1 < n) b.add_all(detail::edge_copy(inst, e, {uc[k][si + 1], vc[k][si]}));
        }
    }
    Coding out{b.finish(), std::move(wm)};
    detail::check_uncertain(out.tid, h.vertices());
    return out;
}

// Each edge c = {a,b} of G becomes copies of e on (u_c,v_a) and (u_c,v_b);
// the F_m copy on (u_c,v_w), w the smaller endpoint, is the uncertain fact.
// Other left-incident facts are attached to u as well as to every u_c.
inline Coding code_stcon(const Instance& inst, const DirectedEdge& e, const IncidentPair& pair, const Fact& mid,
                         const StGraph& g) {
    detail::check_rewrite_input(inst, e, "code_stcon");
    require_incident_pair(inst, e, pair);
    bool covered = inst.contains(mid) &&
                   ((mid.subject == e.u && mid.object == e.v) || (mid.subject == e.v && mid.object == e.u));
    if (!covered) throw std::invalid_argument(mid.str() + " is not a non-unary fact covered by " + e.str());
    g.validate();

    auto taken = inst.domain_set();
    std::map<std::string, Constant> vw;
    for (std::size_t i = 0; i < g.W.size(); ++i)
        vw[g.W[i]] = g.W[i] == g.t ? e.v : fresh_name(taken, e.v + "@W" + std::to_string(i + 1));
    std::vector<Constant> uc;
    for (std::size_t k = 0; k < g.C.size(); ++k) uc.push_back(fresh_name(taken, e.u + "@C" + std::to_string(k + 1)));

    detail::CodingBuilder b;
    b.add_all(inst.induced(detail::without_edge(inst, e)).facts());
    b.add(pair.left.underlying());
    b.add(pair.right.underlying());
    for (const auto& l : left_incident(inst, e)) {
        if (l == pair.left) continue;
        b.add(l.underlying());
        for (const auto& c : uc) b.add(detail::moved(l, e.u, c));
    }
    for (const auto& r : right_incident(inst, e)) {
        if (r == pair.right) continue;
        for (const auto& w : g.W) b.add(detail::moved(r, e.v, vw[w]));
    }

    // The image of F_m when e is copied onto (x,y).
    auto mid_copy = [&](const Constant& x, const Constant& y) {
        return mid.subject == e.u ? Fact(mid.relation, x, y) : Fact(mid.relation, y, x);
    };
    std::vector<Fact> uncertain;
    b.add_all(detail::edge_copy(inst, e, {e.u, vw[g.s]}));
    for (std::size_t k = 0; k < g.C.size(); ++k) {
        const auto& [a, bb] = g.C[k];
        b.add_all(detail::edge_copy(inst, e, {uc[k], vw[a]}));
        b.add_all(detail::edge_copy(inst, e, {uc[k], vw[bb]}));
        uncertain.push_back(mid_copy(uc[k], vw[std::min(a, bb)]));
    }
    WorldMap wm;
    for (std::size_t k = 0; k < g.C.size(); ++k) {
        b.probs[uncertain[k]] = Rational(1, 2);
        wm.items.push_back({"C", g.C[k].first + "-" + g.C[k].second, uncertain[k]});
    }
    Coding out{b.finish(), std::move(wm)};
    detail::check_uncertain(out.tid, g.C.size());
    return out;
}

// ---------------------------------------------------------------------------
// Verification

struct VerifyOptions {
    std::size_t spot_checks = 128;  // sampled worlds per coding
    std::uint64_t rng_seed = 0;
    std::uint64_t world_cap = default_world_cap;
    std::uint64_t budget = default_hom_budget;
};

namespace detail {

// Every world when there are at most `want` of them, otherwise a sorted
// random sample of distinct masks.
inline std::vector<std::uint64_t> sample_worlds(std::size_t bits, std::size_t want, std::uint64_t seed) {
    std::vector<std::uint64_t> out;
    if (bits < 63 && (std::uint64_t{1} << bits) <= want) {
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << bits); ++m) out.push_back(m);
        return out;
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> dist(0, bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1);
    std::set<std::uint64_t> picked;
    while (picked.size() < want) picked.insert(dist(rng));
    return {picked.begin(), picked.end()};
}

inline std::string mask_string(std::uint64_t mask, std::size_t bits) {
    std::string s;
    for (std::size_t k = 0; k < bits; ++k) s += (mask >> k & 1) ? '1' : '0';
    return s;
}

inline Json pair_json(const IncidentPair& p) { return Json{{"left", p.left.str()}, {"right", p.right.str()}}; }

inline bool hom_exists(const Instance& src, const Instance& dst, std::uint64_t budget) {
    auto r = find_homomorphism(src, dst, budget);
    if (r.status == SearchStatus::budget_exhausted) throw BudgetExhausted("spot-check homomorphism budget exhausted");
    return r.found();
}

}  // namespace detail

// Equality: #good(H) = Pr(Q) * 2^(|A|+|B|), using n = n0 - 1, checked per
// connected component; plus homomorphism spot checks on sampled worlds.
inline Json verify_pp2dnf(const Query& q, const Instance& inst, const DirectedEdge& e, const IncidentPair& pair,
                          int n0, const BipartiteGraph& h, const VerifyOptions& opt = {}) {
    h.validate();
    Json report{{"reduction", "pp2dnf"}, {"edge", e.str()}, {"pair", detail::pair_json(pair)}, {"n0", n0}};
    int n = n0 - 1;
    bool pre_ok = n >= 1;
    std::string reason = pre_ok ? "" : "n0 must be at least 2";
    Instance it_n, it_far;
    if (pre_ok) {
        it_n = iterate_edge(inst, e, pair, n);
        it_far = iterate_edge(inst, e, pair, 3 * n - 1);
        bool sat_n = eval_query(q, it_n, opt.budget);
        bool sat_far = eval_query(q, it_far, opt.budget);
        report["iterate_n_satisfies"] = sat_n;
        report["iterate_3n_minus_1_satisfies"] = sat_far;
        if (!sat_n) reason = "iterate(n0-1) does not satisfy the query";
        else if (sat_far) reason = "iterate(3(n0-1)-1) satisfies the query";
        pre_ok = sat_n && !sat_far;
    }
    report["prerequisites_ok"] = pre_ok;
    if (!pre_ok) {
        report["reason"] = reason;
        report["equal"] = nullptr;
        report["ok"] = false;
        return report;
    }

    bool all_equal = true, all_gfomc = true;
    std::size_t checked = 0, passed = 0;
    Json failures = Json::array();
    Json comps = Json::array();
    BigInt bad_product = 1;
    std::uint64_t salt = 0;
    for (const auto& idx : h.components()) {
        BipartiteGraph part = h.induced(idx);
        Json cj{{"graph", part}};
        if (part.C.empty()) {
            // An isolated vertex contributes two bad worlds and no coding.
            bad_product *= 2;
            cj["count"] = 0;
            cj["coded"] = false;
            comps.push_back(cj);
            continue;
        }
        Coding coding = code_pp2dnf(inst, e, pair, n, part);
        BigInt count = count_pp2dnf(part);
        Rational pr = pqe_exact(q, coding.tid, opt.world_cap, opt.budget);
        std::size_t m = part.vertices();
        Rational scaled = pr * Rational(BigInt(1) << m, BigInt(1));
        bool equal = scaled == Rational(count, BigInt(1));
        bool gfomc = is_gfomc(coding.tid);
        all_equal = all_equal && equal;
        all_gfomc = all_gfomc && gfomc;
        bad_product *= (BigInt(1) << m) - count;
        cj["count"] = count.str();
        cj["probability"] = pr.str();
        cj["uncertain_facts"] = coding.tid.uncertain_indices().size();
        cj["tid_facts"] = coding.tid.size();
        cj["gfomc"] = gfomc;
        cj["equal"] = equal;

        // Spot checks: good worlds receive iterate(n), bad worlds map into
        // iterate(3n-1).
        std::size_t na = part.A.size();
        for (auto mask : detail::sample_worlds(m, opt.spot_checks, opt.rng_seed + salt++)) {
            bool good = false;
            std::map<std::string, std::size_t> pos;
            for (std::size_t i = 0; i < part.A.size(); ++i) pos[part.A[i]] = i;
            for (std::size_t j = 0; j < part.B.size(); ++j) pos[part.B[j]] = na + j;
            for (const auto& [a, b] : part.C)
                if ((mask >> pos[a] & 1) && (mask >> pos[b] & 1)) good = true;
            Instance world = coding.worlds.to_tid_world(coding.tid, mask);
            bool round_trip = coding.worlds.from_tid_world(world) == mask;
            bool hom = good ? detail::hom_exists(it_n, world, opt.budget) : detail::hom_exists(world, it_far, opt.budget);
            ++checked;
            if (hom && round_trip) ++passed;
            else
                failures.push_back({{"component", comps.size()}, {"world", detail::mask_string(mask, m)},
                                    {"good", good}, {"homomorphism", hom}, {"round_trip", round_trip}});
        }
        comps.push_back(cj);
    }
    BigInt total = count_pp2dnf(h);
    BigInt combined = (BigInt(1) << h.vertices()) - bad_product;
    all_equal = all_equal && combined == total;

    report["components"] = comps;
    report["count"] = total.str();
    report["combined_count"] = combined.str();
    report["equal"] = all_equal;
    report["gfomc"] = all_gfomc;
    report["spot_checks"] = {{"checked", checked}, {"passed", passed}, {"failures", failures}};
    report["ok"] = all_equal && all_gfomc && checked == passed;
    return report;
}

// Equality: #good(G) = Pr(Q) * 2^|C|, after checking that the fine
// dissociation violates Q and iterates up to |W| satisfy it.
inline Json verify_stcon(const Query& q, const TightPattern& pattern, const IncidentPair& pair, const Fact& mid,
                         const StGraph& g, const VerifyOptions& opt = {}) {
    g.validate();
    const auto& inst = pattern.instance;
    const auto& e = pattern.edge;
    Json report{{"reduction", "stcon"}, {"edge", e.str()}, {"pair", detail::pair_json(pair)}, {"mid", mid.str()}};
    Instance fine = fine_dissociate(inst, e, pair, mid);
    bool fine_violates = !eval_query(q, fine, opt.budget);
    report["fine_dissociation_violates"] = fine_violates;
    std::vector<Instance> iterates{Instance{}};  // iterates[n], n >= 1
    int failing = 0;
    for (int n = 1; n <= static_cast<int>(g.W.size()); ++n) {
        iterates.push_back(iterate_edge(inst, e, pair, n));
        if (!failing && !eval_query(q, iterates.back(), opt.budget)) failing = n;
    }
    report["iterates_checked_up_to"] = g.W.size();
    bool pre_ok = fine_violates && failing == 0;
    report["prerequisites_ok"] = pre_ok;
    if (!pre_ok) {
        report["reason"] = !fine_violates ? "the fine dissociation satisfies the query"
                                          : "iterate(" + std::to_string(failing) + ") violates the query";
        report["equal"] = nullptr;
        report["ok"] = false;
        return report;
    }

    Coding coding = code_stcon(inst, e, pair, mid, g);
    BigInt count = count_stcon(g);
    Rational pr = pqe_exact(q, coding.tid, opt.world_cap, opt.budget);
    std::size_t m = g.C.size();
    bool equal = pr * Rational(BigInt(1) << m, BigInt(1)) == Rational(count, BigInt(1));
    bool gfomc = is_gfomc(coding.tid);

    std::size_t checked = 0, passed = 0;
    Json failures = Json::array();
    for (auto mask : detail::sample_worlds(m, opt.spot_checks, opt.rng_seed)) {
        auto path = g.path(mask);
        Instance world = coding.worlds.to_tid_world(coding.tid, mask);
        bool round_trip = coding.worlds.from_tid_world(world) == mask;
        bool hom = path ? detail::hom_exists(iterates.at(path->size() + 1), world, opt.budget)
                        : detail::hom_exists(world, fine, opt.budget);
        ++checked;
        if (hom && round_trip) ++passed;
        else
            failures.push_back({{"world", detail::mask_string(mask, m)}, {"good", path.has_value()},
                                {"homomorphism", hom}, {"round_trip", round_trip}});
    }
    report["count"] = count.str();
    report["probability"] = pr.str();
    report["uncertain_facts"] = coding.tid.uncertain_indices().size();
    report["tid_facts"] = coding.tid.size();
    report["equal"] = equal;
    report["gfomc"] = gfomc;
    report["spot_checks"] = {{"checked", checked}, {"passed", passed}, {"failures", failures}};
    report["ok"] = equal && gfomc && checked == passed;
    return report;
}

// ---------------------------------------------------------------------------
// Classification

struct PipelineBounds {
    int n_max = default_n_max;
    SeedBounds seeds;
    std::uint64_t budget = default_hom_budget;
};

struct Classification {
    std::string route;  // "pp2dnf", "stcon" or "inconclusive"
    std::optional<Instance> model;
    std::optional<DirectedEdge> edge;
    std::optional<IncidentPair> pair;
    std::optional<IterabilityVerdict> verdict;
    std::optional<TightPattern> pattern;
    std::size_t seeds = 0;

    Json json() const {
        Json j{{"route", route}, {"seeds", seeds}};
        if (model) j["model"] = model->str();
        if (edge) j["edge"] = edge->str();
        if (pair) j["pair"] = detail::pair_json(*pair);
        if (verdict) {
            j["verdict"] = verdict->str();
            j["n_max"] = verdict->n_max;
            if (verdict->non_iterable) j["n0"] = verdict->n0;
        }
        if (pattern)
            j["metrics"] = {{"weight", pattern->metrics.weight}, {"side_weight", pattern->metrics.side_weight}};
        return j;
    }
};

// A non-iterable edge in some minimized seed gives the PP2DNF route;
// otherwise a tight pattern whose edge is iterable for some pair gives the
// ST-CON route. Without seeds, minimal models are enumerated.
inline Classification hardness_pipeline(const Query& q, std::vector<Instance> seeds, const PipelineBounds& bounds = {}) {
    if (seeds.empty()) seeds = enumerate_minimal_models(q, bounds.seeds, bounds.budget);
    Classification out;
    out.seeds = seeds.size();
    std::vector<Instance> models;
    for (const auto& s : seeds) {
        Instance m = minimize_model(q, s, bounds.budget);
        if (std::find(models.begin(), models.end(), m) == models.end()) models.push_back(m);
    }
    for (const auto& m : models) {
        for (const auto& [a, b] : non_leaf_edges(m)) {
            DirectedEdge e{a, b};
            for (const auto& p : incident_pairs(m, e)) {
                auto v = probe_iterability(q, m, e, p, bounds.n_max, bounds.budget);
                if (v.non_iterable) {
                    out.route = "pp2dnf";
                    out.model = m;
                    out.edge = e;
                    out.pair = p;
                    out.verdict = v;
                    return out;
                }
            }
        }
    }
    auto search = find_minimal_tight_pattern(q, models, bounds.budget);
    if (search.best) {
        const auto& tp = *search.best;
        for (const auto& p : incident_pairs(tp.instance, tp.edge)) {
            auto v = probe_iterability(q, tp.instance, tp.edge, p, bounds.n_max, bounds.budget);
            if (!v.non_iterable) {
                out.route = "stcon";
                out.model = tp.instance;
                out.edge = tp.edge;
                out.pair = p;
                out.verdict = v;
                out.pattern = tp;
                return out;
            }
        }
    }
    out.route = "inconclusive";
    if (search.best) out.pattern = search.best;
    return out;
}

}  // namespace tidg
