#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "instance.hpp"
#include "query.hpp"
#include "rational.hpp"

namespace tidg {

// Instance with an independent keep-probability per fact.
class TID {
public:
    TID() = default;
    explicit TID(const std::vector<std::pair<Fact, Rational>>& entries) {
        std::map<Fact, Rational> merged;
        for (const auto& [f, p] : entries) {
            if (p < Rational(0) || p > Rational(1)) throw std::invalid_argument("probability outside [0,1] for " + f.str());
            auto [it, fresh] = merged.emplace(f, p);
            if (!fresh && it->second != p) throw std::invalid_argument("conflicting probabilities for " + f.str());
        }
        std::vector<Fact> facts;
        for (const auto& [f, p] : merged) {
            facts.push_back(f);
            probs_.push_back(p);
        }
        instance_ = Instance(std::move(facts));
    }
    // Every fact certain.
    explicit TID(const Instance& inst) : instance_(inst), probs_(inst.size(), Rational(1)) {}

    const Instance& instance() const { return instance_; }
    // Parallel to instance().facts().
    const std::vector<Rational>& probabilities() const { return probs_; }
    std::size_t size() const { return probs_.size(); }

    const Rational& prob(const Fact& f) const {
        auto it = std::lower_bound(instance_.begin(), instance_.end(), f);
        if (it == instance_.end() || !(*it == f)) throw std::invalid_argument(f.str() + " is not in the TID");
        return probs_[static_cast<std::size_t>(it - instance_.begin())];
    }

    std::vector<std::size_t> uncertain_indices() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < probs_.size(); ++i)
            if (!probs_[i].is_zero() && !probs_[i].is_one()) out.push_back(i);
        return out;
    }
    std::vector<Fact> uncertain_facts() const {
        std::vector<Fact> out;
        for (auto i : uncertain_indices()) out.push_back(instance_.facts()[i]);
        return out;
    }

    std::vector<std::pair<Fact, Rational>> entries() const {
        std::vector<std::pair<Fact, Rational>> out;
        for (std::size_t i = 0; i < probs_.size(); ++i) out.emplace_back(instance_.facts()[i], probs_[i]);
        return out;
    }

    // `R(a,b) : p/q.`; certain facts are written without a probability.
    std::string str() const {
        std::string out;
        for (std::size_t i = 0; i < probs_.size(); ++i) {
            out += instance_.facts()[i].str();
            if (!probs_[i].is_one()) out += " : " + probs_[i].str();
            out += ".\n";
        }
        return out;
    }

    friend bool operator==(const TID&, const TID&) = default;

private:
    Instance instance_;
    std::vector<Rational> probs_;
};

inline TID parse_tid(std::string_view text, bool allow_monadic = false) {
    auto body = detail::strip_comments(text);
    detail::Cursor cur(body);
    std::vector<std::pair<Fact, Rational>> entries;
    std::map<std::string, int> arity;
    std::map<Fact, Rational> seen;
    while (!cur.done()) {
        Fact f = detail::parse_fact_at(cur, allow_monadic);
        auto [it, fresh] = arity.emplace(f.relation, f.arity);
        if (!fresh && it->second != f.arity) throw ParseError("relation " + f.relation + " used with two arities");
        Rational p(1);
        if (cur.accept(':')) {
            // The probability may itself contain '.'; the last dot of the
            // token terminates the fact.
            std::string tok = cur.number();
            if (tok.empty() || tok.back() != '.') cur.fail("expected '.' after probability");
            tok.pop_back();
            try {
                p = Rational::parse(tok);
            } catch (const std::exception& ex) {
                cur.fail(ex.what());
            }
        } else {
            cur.expect('.');
        }
        if (p < Rational(0) || p > Rational(1)) cur.fail("probability outside [0,1]");
        auto [prev, first] = seen.emplace(f, p);
        if (!first && prev->second != p) cur.fail("conflicting probabilities for " + f.str());
        entries.emplace_back(std::move(f), p);
    }
    return TID(entries);
}

// Product formula; `world` must be a subset of the TID's facts.
inline Rational world_probability(const TID& t, const Instance& world) {
    if (!world.subset_of(t.instance())) throw std::invalid_argument("world is not a subinstance of the TID");
    Rational p(1);
    const auto& facts = t.instance().facts();
    for (std::size_t i = 0; i < facts.size(); ++i)
        p *= world.contains(facts[i]) ? t.probabilities()[i] : Rational(1) - t.probabilities()[i];
    return p;
}

inline constexpr std::uint64_t default_world_cap = std::uint64_t{1} << 24;

class WorldCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exact Pr(Q) by enumerating subsets of the uncertain facts. Facts with
// probability 0 or 1 are pinned out or in.
inline Rational pqe_exact(const Query& q, const TID& t, std::uint64_t world_cap = default_world_cap,
                          std::uint64_t budget = default_hom_budget) {
    auto uncertain = t.uncertain_indices();
    if (uncertain.size() >= 63 || (std::uint64_t{1} << uncertain.size()) > world_cap)
        throw WorldCapExceeded(std::to_string(uncertain.size()) + " uncertain facts exceed the world cap of " +
                               std::to_string(world_cap));
    detail::IndexedInstance idx(t.instance());
    detail::CompiledQuery cq(q, idx.relations);
    const auto& probs = t.probabilities();

    std::vector<detail::IndexedFact> pinned;
    for (std::size_t i = 0; i < probs.size(); ++i)
        if (probs[i].is_one()) pinned.push_back(idx.facts[i]);

    // All GFOMC inputs share one weight per world; skip the products then.
    bool uniform_half = std::all_of(uncertain.begin(), uncertain.end(), [&](std::size_t i) { return probs[i] == Rational(1, 2); });

    std::size_t m = uncertain.size();
    std::uint64_t worlds = std::uint64_t{1} << m;
    BigInt satisfied = 0;
    Rational total(0);
    std::vector<detail::IndexedFact> facts;
    for (std::uint64_t mask = 0; mask < worlds; ++mask) {
        facts = pinned;
        for (std::size_t k = 0; k < m; ++k)
            if (mask >> k & 1) facts.push_back(idx.facts[uncertain[k]]);
        if (!cq.eval(idx.relations.size(), idx.constants.size(), facts, budget)) continue;
        if (uniform_half) {
            ++satisfied;
            continue;
        }
        Rational w(1);
        for (std::size_t k = 0; k < m; ++k) w *= (mask >> k & 1) ? probs[uncertain[k]] : Rational(1) - probs[uncertain[k]];
        total += w;
    }
    if (uniform_half) return Rational(satisfied, BigInt(1) << m);
    return total;
}

inline bool is_gfomc(const TID& t) {
    for (const auto& p : t.probabilities())
        if (!p.is_zero() && !p.is_one() && p != Rational(1, 2)) return false;
    return true;
}

}  // namespace tidg
