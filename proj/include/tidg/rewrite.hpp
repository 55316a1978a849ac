#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "homomorphism.hpp"
#include "instance.hpp"
#include "query.hpp"
#include "tid.hpp"

namespace tidg {

namespace detail {

// Facts obtained by copying the edge src of `inst` onto dst, optionally
// skipping the image of one covered fact.
inline std::vector<Fact> edge_copy(const Instance& inst, const DirectedEdge& src, const DirectedEdge& dst,
                                   const Fact* skip = nullptr) {
    std::vector<Fact> out;
    for (const auto& f : inst) {
        if (skip && f == *skip) continue;
        if (f.subject == src.u && f.object == src.v) out.emplace_back(f.relation, dst.u, dst.v);
        else if (f.subject == src.v && f.object == src.u) out.emplace_back(f.relation, dst.v, dst.u);
        else if (f.subject == src.u && f.object == src.u) out.emplace_back(f.relation, dst.u, dst.u);
        else if (f.subject == src.v && f.object == src.v) out.emplace_back(f.relation, dst.v, dst.v);
    }
    return out;
}

// The oriented fact `f` with its endpoint `from` renamed to `to`.
inline Fact moved(const OrientedFact& f, const Constant& from, const Constant& to) {
    OrientedFact g = f;
    if (g.source == from) g.source = to;
    if (g.target == from) g.target = to;
    return g.underlying();
}

inline void check_rewrite_input(const Instance& inst, const DirectedEdge& e, const char* what) {
    require_binary(inst, what);
    require_non_leaf(inst, e);
}

inline std::set<Constant> without_edge(const Instance& inst, const DirectedEdge& e) {
    auto keep = inst.domain_set();
    keep.erase(e.u);
    keep.erase(e.v);
    return keep;
}

}  // namespace detail

// n-th iterate of e relative to the incident pair: a back-and-forth path of
// 2n-1 copies of e, with F_l only at u_1 = u and F_r only at v_n = v.
inline Instance iterate_edge(const Instance& inst, const DirectedEdge& e, const IncidentPair& pair, int n) {
    if (n < 1) throw std::invalid_argument("iterate_edge needs n >= 1");
    detail::check_rewrite_input(inst, e, "iterate_edge");
    require_incident_pair(inst, e, pair);

    auto taken = inst.domain_set();
    std::vector<Constant> us{e.u}, vs;
    for (int i = 2; i <= n; ++i) us.push_back(fresh_name(taken, e.u + "#" + std::to_string(i)));
    for (int i = 1; i <= n - 1; ++i) vs.push_back(fresh_name(taken, e.v + "#" + std::to_string(i)));
    vs.push_back(e.v);

    std::vector<Fact> facts = inst.induced(detail::without_edge(inst, e)).facts();
    facts.push_back(pair.left.underlying());
    facts.push_back(pair.right.underlying());
    for (const auto& l : left_incident(inst, e))
        if (l != pair.left)
            for (const auto& ui : us) facts.push_back(detail::moved(l, e.u, ui));
    for (const auto& r : right_incident(inst, e))
        if (r != pair.right)
            for (const auto& vi : vs) facts.push_back(detail::moved(r, e.v, vi));
    for (int i = 0; i < n; ++i) {
        auto c = detail::edge_copy(inst, e, {us[static_cast<std::size_t>(i)], vs[static_cast<std::size_t>(i)]});
        facts.insert(facts.end(), c.begin(), c.end());
        if (i + 1 < n) {
            c = detail::edge_copy(inst, e, {us[static_cast<std::size_t>(i + 1)], vs[static_cast<std::size_t>(i)]});
            facts.insert(facts.end(), c.begin(), c.end());
        }
    }
    return Instance(std::move(facts));
}

// Copies e onto (u,v') and (u',v), then drops the non-unary facts covered by e.
inline Instance dissociate_edge(const Instance& inst, const DirectedEdge& e) {
    detail::check_rewrite_input(inst, e, "dissociate_edge");
    auto taken = inst.domain_set();
    Constant u2 = fresh_name(taken, e.u + "#d");
    Constant v2 = fresh_name(taken, e.v + "#d");
    std::vector<Fact> facts;
    for (const auto& f : inst) {
        bool covered_binary = (f.subject == e.u && f.object == e.v) || (f.subject == e.v && f.object == e.u);
        if (!covered_binary) facts.push_back(f);
    }
    auto a = detail::edge_copy(inst, e, {e.u, v2});
    auto b = detail::edge_copy(inst, e, {u2, e.v});
    facts.insert(facts.end(), a.begin(), a.end());
    facts.insert(facts.end(), b.begin(), b.end());
    return Instance(std::move(facts));
}

// Four copies of e: full ones on (u,v') and (u',v), ones without F_m on (u,v)
// and (u',v'). F_l stays at u and F_r at v only; the other incident facts are
// kept at u, v and copied to u', v'.
inline Instance fine_dissociate(const Instance& inst, const DirectedEdge& e, const IncidentPair& pair, const Fact& mid) {
    detail::check_rewrite_input(inst, e, "fine_dissociate");
    require_incident_pair(inst, e, pair);
    bool covered = inst.contains(mid) &&
                   ((mid.subject == e.u && mid.object == e.v) || (mid.subject == e.v && mid.object == e.u));
    if (!covered) throw std::invalid_argument(mid.str() + " is not a non-unary fact covered by " + e.str());

    auto taken = inst.domain_set();
    Constant u2 = fresh_name(taken, e.u + "#f");
    Constant v2 = fresh_name(taken, e.v + "#f");

    std::vector<Fact> facts = inst.induced(detail::without_edge(inst, e)).facts();
    facts.push_back(pair.left.underlying());
    facts.push_back(pair.right.underlying());
    for (const auto& l : left_incident(inst, e)) {
        if (l == pair.left) continue;
        facts.push_back(l.underlying());
        facts.push_back(detail::moved(l, e.u, u2));
    }
    for (const auto& r : right_incident(inst, e)) {
        if (r == pair.right) continue;
        facts.push_back(r.underlying());
        facts.push_back(detail::moved(r, e.v, v2));
    }
    for (const auto& [dst, skip] : std::vector<std::pair<DirectedEdge, const Fact*>>{
             {{e.u, v2}, nullptr}, {{u2, e.v}, nullptr}, {{e.u, e.v}, &mid}, {{u2, v2}, &mid}}) {
        auto c = detail::edge_copy(inst, e, dst, skip);
        facts.insert(facts.end(), c.begin(), c.end());
    }
    return Instance(std::move(facts));
}

struct CollapseResult {
    Instance instance;
    Homomorphism hom;
    // The bound k_sigma is never computed, only reported as a note.
    std::string size_bound_note;
};

// For instances without non-leaf edges: merges leaves of a star that carry the
// same facts, then keeps one representative per isomorphism class of
// components. Ties go to the lexicographically smallest name or serialization.
inline CollapseResult collapse_stars(const Instance& inst) {
    require_binary(inst, "collapse_stars");
    if (!non_leaf_edges(inst).empty()) throw std::invalid_argument("collapse_stars needs an instance without non-leaf edges");

    Homomorphism h = identity_map(inst);
    auto adj = gaifman(inst);

    // Star step: a centre has at least two neighbours, all of them leaves.
    std::set<Constant> dropped;
    for (const auto& [centre, nbrs] : adj) {
        if (nbrs.size() < 2) continue;
        std::map<std::vector<std::pair<std::string, int>>, Constant> rep;
        for (const auto& leaf : nbrs) {
            // Facts of the leaf edge with the leaf abstracted: 0 = centre->leaf,
            // 1 = leaf->centre, 2 = loop on the leaf.
            std::vector<std::pair<std::string, int>> key;
            for (const auto& f : inst) {
                if (f.subject == centre && f.object == leaf) key.emplace_back(f.relation, 0);
                else if (f.subject == leaf && f.object == centre) key.emplace_back(f.relation, 1);
                else if (f.subject == leaf && f.object == leaf) key.emplace_back(f.relation, 2);
            }
            std::sort(key.begin(), key.end());
            auto [it, fresh] = rep.emplace(key, leaf);
            if (!fresh) {
                h[leaf] = it->second;  // neighbours iterate in order, so the representative is the minimum
                dropped.insert(leaf);
            }
        }
    }
    auto keep = inst.domain_set();
    for (const auto& d : dropped) keep.erase(d);
    Instance merged = inst.induced(keep);

    // Component step.
    std::vector<Instance> comps;
    for (const auto& comp : components(merged)) comps.push_back(merged.induced({comp.begin(), comp.end()}));
    std::sort(comps.begin(), comps.end(), [](const Instance& a, const Instance& b) { return a.str() < b.str(); });
    std::vector<Instance> kept;
    std::vector<Fact> out;
    for (const auto& c : comps) {
        bool absorbed = false;
        for (const auto& k : kept) {
            auto iso = find_isomorphism(c, k);
            if (iso.status == SearchStatus::budget_exhausted) throw BudgetExhausted("component isomorphism budget exhausted");
            if (iso.found()) {
                for (auto& [from, to] : h)
                    if (auto it = iso.mapping.find(to); it != iso.mapping.end()) to = it->second;
                absorbed = true;
                break;
            }
        }
        if (!absorbed) {
            kept.push_back(c);
            out.insert(out.end(), c.begin(), c.end());
        }
    }
    Instance result(std::move(out));
    if (!is_homomorphism(h, inst, result)) throw std::logic_error("collapse_stars produced an invalid homomorphism");
    std::string note = "size " + std::to_string(result.size()) + " of " + std::to_string(inst.size()) +
                       " facts; the loose bound k_sigma is not evaluated";
    return {std::move(result), std::move(h), std::move(note)};
}

// ---------------------------------------------------------------------------
// Arity-one relations R become arity-two relations R@2 with R(a) -> R@2(a,a).

inline std::string binary_name(const std::string& relation) { return relation + "@2"; }

namespace detail {

inline void check_clash(const std::set<std::string>& unary, const std::set<std::string>& binary) {
    for (const auto& r : unary)
        if (binary.count(binary_name(r)))
            throw std::invalid_argument("relation " + binary_name(r) + " already exists in the signature");
}

inline Fact fact_to_binary(const Fact& f) {
    if (f.arity != 1) return f;
    return Fact(binary_name(f.relation), f.subject, f.subject);
}

inline void atom_to_binary(Atom& a) {
    if (a.args.size() != 1) return;
    a.predicate = binary_name(a.predicate);
    a.args.push_back(a.args.front());
}

}  // namespace detail

inline Instance unary_to_binary(const Instance& inst) {
    std::set<std::string> unary, binary;
    for (const auto& f : inst) (f.arity == 1 ? unary : binary).insert(f.relation);
    detail::check_clash(unary, binary);
    std::vector<Fact> out;
    for (const auto& f : inst) out.push_back(detail::fact_to_binary(f));
    return Instance(std::move(out));
}

inline TID unary_to_binary(const TID& t) {
    std::set<std::string> unary, binary;
    for (const auto& f : t.instance()) (f.arity == 1 ? unary : binary).insert(f.relation);
    detail::check_clash(unary, binary);
    std::vector<std::pair<Fact, Rational>> out;
    for (const auto& [f, p] : t.entries()) out.emplace_back(detail::fact_to_binary(f), p);
    return TID(out);
}

inline Query unary_to_binary(const Query& q) {
    if (auto* u = std::get_if<UCQ>(&q.body)) {
        std::set<std::string> unary, binary;
        for (const auto& cq : u->disjuncts)
            for (const auto& a : cq.atoms) (a.args.size() == 1 ? unary : binary).insert(a.predicate);
        detail::check_clash(unary, binary);
        UCQ out = *u;
        for (auto& cq : out.disjuncts)
            for (auto& a : cq.atoms) detail::atom_to_binary(a);
        return out;
    }
    if (std::holds_alternative<RPQ2>(q.body)) return q;
    const auto& p = std::get<DatalogProgram>(q.body);
    auto idb = p.intensional();
    std::set<std::string> unary, binary;
    for (const auto& r : p.rules)
        for (const auto& a : r.body)
            if (!idb.count(a.predicate)) (a.args.size() == 1 ? unary : binary).insert(a.predicate);
    detail::check_clash(unary, binary);
    for (const auto& r : unary)
        if (idb.count(binary_name(r))) throw std::invalid_argument("predicate " + binary_name(r) + " already exists");
    DatalogProgram out = p;
    for (auto& r : out.rules)
        for (auto& a : r.body)
            if (!idb.count(a.predicate)) detail::atom_to_binary(a);
    return out;
}

}  // namespace tidg
