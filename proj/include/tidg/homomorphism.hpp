#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "instance.hpp"

namespace tidg {

using Homomorphism = std::map<Constant, Constant>;

inline constexpr std::uint64_t default_hom_budget = 10'000'000;

enum class SearchStatus { found, none, budget_exhausted };

struct HomSearchResult {
    SearchStatus status = SearchStatus::none;
    Homomorphism mapping;
    std::uint64_t steps = 0;

    bool found() const { return status == SearchStatus::found; }
};

class BudgetExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

struct IndexedFact {
    int rel;
    int a;
    int b;
};

// Dense ids for strings; relations are keyed by name and arity.
class SymbolTable {
public:
    int intern(const std::string& s) {
        auto [it, fresh] = ids_.emplace(s, static_cast<int>(names_.size()));
        if (fresh) names_.push_back(s);
        return it->second;
    }
    int find(const std::string& s) const {
        auto it = ids_.find(s);
        return it == ids_.end() ? -1 : it->second;
    }
    const std::string& name(int id) const { return names_[static_cast<std::size_t>(id)]; }
    int size() const { return static_cast<int>(names_.size()); }

private:
    std::unordered_map<std::string, int> ids_;
    std::vector<std::string> names_;
};

inline std::string relation_key(const Fact& f) { return f.arity == 1 ? f.relation + "/1" : f.relation; }

class Bits {
public:
    Bits() = default;
    Bits(int n, bool fill) : n_(n), words_(static_cast<std::size_t>((n + 63) / 64), fill ? ~0ULL : 0ULL) {
        if (fill && n % 64) words_.back() = (1ULL << (n % 64)) - 1;
    }
    void set(int i) { words_[static_cast<std::size_t>(i / 64)] |= 1ULL << (i % 64); }
    void reset(int i) { words_[static_cast<std::size_t>(i / 64)] &= ~(1ULL << (i % 64)); }
    bool test(int i) const { return words_[static_cast<std::size_t>(i / 64)] >> (i % 64) & 1ULL; }
    Bits& operator&=(const Bits& o) {
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
        return *this;
    }
    int count() const {
        int c = 0;
        for (auto w : words_) c += std::popcount(w);
        return c;
    }
    bool none() const {
        for (auto w : words_)
            if (w) return false;
        return true;
    }
    template <class F>
    void for_each(F&& f) const {
        for (std::size_t k = 0; k < words_.size(); ++k) {
            auto w = words_[k];
            while (w) {
                int bit = std::countr_zero(w);
                f(static_cast<int>(k * 64) + bit);
                w &= w - 1;
            }
        }
    }

private:
    int n_ = 0;
    std::vector<std::uint64_t> words_;
};

// Adjacency of a target structure, per relation.
class TargetIndex {
public:
    TargetIndex(int num_relations, int num_elements, const std::vector<IndexedFact>& facts)
        : nr_(num_relations), ne_(num_elements),
          out_(static_cast<std::size_t>(nr_ * ne_), Bits(ne_, false)),
          in_(static_cast<std::size_t>(nr_ * ne_), Bits(ne_, false)),
          loop_(static_cast<std::size_t>(nr_), Bits(ne_, false)),
          has_out_(static_cast<std::size_t>(nr_), Bits(ne_, false)),
          has_in_(static_cast<std::size_t>(nr_), Bits(ne_, false)) {
        for (const auto& f : facts) {
            out_[slot(f.rel, f.a)].set(f.b);
            in_[slot(f.rel, f.b)].set(f.a);
            has_out_[static_cast<std::size_t>(f.rel)].set(f.a);
            has_in_[static_cast<std::size_t>(f.rel)].set(f.b);
            if (f.a == f.b) loop_[static_cast<std::size_t>(f.rel)].set(f.a);
        }
    }
    int elements() const { return ne_; }
    const Bits& out(int rel, int t) const { return out_[slot(rel, t)]; }
    const Bits& in(int rel, int t) const { return in_[slot(rel, t)]; }
    const Bits& loops(int rel) const { return loop_[static_cast<std::size_t>(rel)]; }
    const Bits& has_out(int rel) const { return has_out_[static_cast<std::size_t>(rel)]; }
    const Bits& has_in(int rel) const { return has_in_[static_cast<std::size_t>(rel)]; }

private:
    std::size_t slot(int rel, int t) const { return static_cast<std::size_t>(rel * ne_ + t); }
    int nr_, ne_;
    std::vector<Bits> out_, in_, loop_, has_out_, has_in_;
};

struct IndexedHomResult {
    SearchStatus status = SearchStatus::none;
    std::vector<int> mapping;
    std::uint64_t steps = 0;
};

// Backtracking with forward checking and smallest-domain-first variable order.
// Source facts whose relation id is negative can never be matched.
class HomSolver {
public:
    HomSolver(int num_src, const std::vector<IndexedFact>& src, const TargetIndex& tgt, bool injective,
              std::uint64_t budget)
        : ns_(num_src), tgt_(tgt), injective_(injective), budget_(budget),
          constraints_(static_cast<std::size_t>(num_src)) {
        domains_.assign(static_cast<std::size_t>(ns_), Bits(tgt_.elements(), true));
        for (const auto& f : src) {
            if (f.rel < 0) {
                impossible_ = true;
                continue;
            }
            if (f.a == f.b) {
                domains_[static_cast<std::size_t>(f.a)] &= tgt_.loops(f.rel);
            } else {
                domains_[static_cast<std::size_t>(f.a)] &= tgt_.has_out(f.rel);
                domains_[static_cast<std::size_t>(f.b)] &= tgt_.has_in(f.rel);
                constraints_[static_cast<std::size_t>(f.a)].push_back({f.rel, f.b, true});
                constraints_[static_cast<std::size_t>(f.b)].push_back({f.rel, f.a, false});
            }
        }
        if (injective_ && ns_ > tgt_.elements()) impossible_ = true;
    }

    IndexedHomResult solve() {
        IndexedHomResult res;
        if (impossible_) return res;
        for (const auto& d : domains_)
            if (d.none()) return res;
        assignment_.assign(static_cast<std::size_t>(ns_), -1);
        bool ok = search(0);
        res.steps = steps_;
        if (exhausted_) {
            res.status = SearchStatus::budget_exhausted;
        } else if (ok) {
            res.status = SearchStatus::found;
            res.mapping = assignment_;
        }
        return res;
    }

private:
    struct Constraint {
        int rel;
        int other;
        bool outgoing;  // rel(self, other) when true, rel(other, self) otherwise
    };

    bool search(int assigned) {
        if (assigned == ns_) return true;
        int pick = -1, best = 0;
        for (int x = 0; x < ns_; ++x) {
            if (assignment_[static_cast<std::size_t>(x)] >= 0) continue;
            int c = domains_[static_cast<std::size_t>(x)].count();
            if (pick < 0 || c < best ||
                (c == best && constraints_[static_cast<std::size_t>(x)].size() >
                                  constraints_[static_cast<std::size_t>(pick)].size())) {
                pick = x;
                best = c;
            }
        }
        std::vector<int> candidates;
        domains_[static_cast<std::size_t>(pick)].for_each([&](int t) { candidates.push_back(t); });
        for (int t : candidates) {
            if (++steps_ > budget_) {
                exhausted_ = true;
                return false;
            }
            auto saved = domains_;
            assignment_[static_cast<std::size_t>(pick)] = t;
            if (propagate(pick, t) && search(assigned + 1)) return true;
            assignment_[static_cast<std::size_t>(pick)] = -1;
            domains_ = std::move(saved);
            if (exhausted_) return false;
        }
        return false;
    }

    bool propagate(int x, int t) {
        for (const auto& c : constraints_[static_cast<std::size_t>(x)]) {
            int y = assignment_[static_cast<std::size_t>(c.other)];
            if (y >= 0) {
                bool ok = c.outgoing ? tgt_.out(c.rel, t).test(y) : tgt_.in(c.rel, t).test(y);
                if (!ok) return false;
                continue;
            }
            auto& d = domains_[static_cast<std::size_t>(c.other)];
            d &= c.outgoing ? tgt_.out(c.rel, t) : tgt_.in(c.rel, t);
            if (d.none()) return false;
        }
        if (injective_) {
            for (int z = 0; z < ns_; ++z) {
                if (assignment_[static_cast<std::size_t>(z)] >= 0) continue;
                auto& d = domains_[static_cast<std::size_t>(z)];
                d.reset(t);
                if (d.none()) return false;
            }
        }
        return true;
    }

    int ns_;
    const TargetIndex& tgt_;
    bool injective_;
    std::uint64_t budget_;
    std::vector<std::vector<Constraint>> constraints_;
    std::vector<Bits> domains_;
    std::vector<int> assignment_;
    std::uint64_t steps_ = 0;
    bool exhausted_ = false;
    bool impossible_ = false;
};

inline HomSearchResult search_homomorphism(const Instance& src, const Instance& dst, std::uint64_t budget,
                                           bool injective) {
    SymbolTable rels, src_consts, dst_consts;
    std::vector<IndexedFact> tgt_facts, src_facts;
    for (const auto& f : dst)
        tgt_facts.push_back({rels.intern(relation_key(f)), dst_consts.intern(f.subject), dst_consts.intern(f.object)});
    for (const auto& f : src)
        src_facts.push_back({rels.find(relation_key(f)), src_consts.intern(f.subject), src_consts.intern(f.object)});
    TargetIndex index(rels.size(), dst_consts.size(), tgt_facts);
    HomSolver solver(src_consts.size(), src_facts, index, injective, budget);
    auto raw = solver.solve();
    HomSearchResult res;
    res.status = raw.status;
    res.steps = raw.steps;
    if (raw.status == SearchStatus::found)
        for (int x = 0; x < src_consts.size(); ++x)
            res.mapping[src_consts.name(x)] = dst_consts.name(raw.mapping[static_cast<std::size_t>(x)]);
    return res;
}

}  // namespace detail

// Searches for h with R(h(a),h(b)) in dst for every R(a,b) in src. A result of
// `none` is only reported when the search space was exhausted within budget.
inline HomSearchResult find_homomorphism(const Instance& src, const Instance& dst,
                                         std::uint64_t budget = default_hom_budget) {
    return detail::search_homomorphism(src, dst, budget, false);
}

inline HomSearchResult find_injective_homomorphism(const Instance& src, const Instance& dst,
                                                   std::uint64_t budget = default_hom_budget) {
    return detail::search_homomorphism(src, dst, budget, true);
}

// Checks the homomorphism condition directly; h must be total on dom(src).
inline bool is_homomorphism(const Homomorphism& h, const Instance& src, const Instance& dst) {
    for (const auto& f : src) {
        auto a = h.find(f.subject);
        auto b = h.find(f.object);
        if (a == h.end() || b == h.end()) return false;
        Fact image = f;
        image.subject = a->second;
        image.object = b->second;
        if (!dst.contains(image)) return false;
    }
    return true;
}

// g after h.
inline Homomorphism compose(const Homomorphism& h, const Homomorphism& g) {
    Homomorphism out;
    for (const auto& [x, y] : h) {
        auto it = g.find(y);
        if (it == g.end()) throw std::invalid_argument("composition undefined at " + y);
        out[x] = it->second;
    }
    return out;
}

inline Instance image(const Homomorphism& h, const Instance& src) {
    std::vector<Fact> out;
    for (auto f : src) {
        f.subject = h.at(f.subject);
        f.object = h.at(f.object);
        out.push_back(std::move(f));
    }
    return Instance(std::move(out));
}

inline Homomorphism identity_map(const Instance& inst) {
    Homomorphism h;
    for (const auto& c : inst.domain()) h[c] = c;
    return h;
}

// An injective homomorphism between instances with equally many elements and
// facts maps facts onto facts, so its inverse is a homomorphism too.
inline HomSearchResult find_isomorphism(const Instance& a, const Instance& b,
                                        std::uint64_t budget = default_hom_budget) {
    if (a.size() != b.size() || a.domain().size() != b.domain().size()) return {};
    return find_injective_homomorphism(a, b, budget);
}

inline bool is_isomorphic(const Instance& a, const Instance& b, std::uint64_t budget = default_hom_budget) {
    auto r = find_isomorphism(a, b, budget);
    if (r.status == SearchStatus::budget_exhausted) throw BudgetExhausted("isomorphism search budget exhausted");
    return r.found();
}

}  // namespace tidg
