#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace tidg {

using Constant = std::string;

// A fact R(a,b). Arity-1 facts R(a) only appear in mixed-arity inputs and are
// stored with object == subject.
struct Fact {
    std::string relation;
    Constant subject;
    Constant object;
    int arity = 2;

    Fact() = default;
    Fact(std::string r, Constant a, Constant b) : relation(std::move(r)), subject(std::move(a)), object(std::move(b)) {}
    static Fact monadic(std::string r, Constant a) {
        Fact f(std::move(r), a, a);
        f.arity = 1;
        return f;
    }

    // Unary in the arity-two sense: both positions hold the same constant.
    bool is_unary() const { return subject == object; }

    std::string str() const {
        if (arity == 1) return relation + "(" + subject + ")";
        return relation + "(" + subject + "," + object + ")";
    }

    friend auto operator<=>(const Fact&, const Fact&) = default;
    friend bool operator==(const Fact&, const Fact&) = default;
};

// A fact over the signature with inverses: R-(b,a) is the same fact as R(a,b).
struct OrientedFact {
    std::string relation;
    bool inverse = false;
    Constant source;
    Constant target;

    Fact underlying() const {
        return inverse ? Fact(relation, target, source) : Fact(relation, source, target);
    }
    OrientedFact reversed() const { return {relation, !inverse, target, source}; }

    std::string label() const { return inverse ? relation + "-" : relation; }
    std::string str() const { return label() + "(" + source + "," + target + ")"; }

    friend auto operator<=>(const OrientedFact&, const OrientedFact&) = default;
    friend bool operator==(const OrientedFact&, const OrientedFact&) = default;
};

inline OrientedFact forward_view(const Fact& f) { return {f.relation, false, f.subject, f.object}; }
inline OrientedFact backward_view(const Fact& f) { return {f.relation, true, f.object, f.subject}; }

struct DirectedEdge {
    Constant u;
    Constant v;

    DirectedEdge reversed() const { return {v, u}; }
    std::string str() const { return "(" + u + "," + v + ")"; }
    friend auto operator<=>(const DirectedEdge&, const DirectedEdge&) = default;
    friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

struct IncidentPair {
    OrientedFact left;   // R_l(l,u)
    OrientedFact right;  // R_r(v,r)

    friend auto operator<=>(const IncidentPair&, const IncidentPair&) = default;
    friend bool operator==(const IncidentPair&, const IncidentPair&) = default;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Finite set of facts; the domain is derived.
class Instance {
public:
    Instance() = default;
    explicit Instance(std::vector<Fact> facts) : facts_(std::move(facts)) {
        std::sort(facts_.begin(), facts_.end());
        facts_.erase(std::unique(facts_.begin(), facts_.end()), facts_.end());
    }
    Instance(std::initializer_list<Fact> facts) : Instance(std::vector<Fact>(facts)) {}

    const std::vector<Fact>& facts() const { return facts_; }
    std::size_t size() const { return facts_.size(); }
    bool empty() const { return facts_.empty(); }
    auto begin() const { return facts_.begin(); }
    auto end() const { return facts_.end(); }

    bool contains(const Fact& f) const { return std::binary_search(facts_.begin(), facts_.end(), f); }

    std::vector<Constant> domain() const {
        std::set<Constant> d;
        for (const auto& f : facts_) {
            d.insert(f.subject);
            d.insert(f.object);
        }
        return {d.begin(), d.end()};
    }
    std::set<Constant> domain_set() const {
        auto d = domain();
        return {d.begin(), d.end()};
    }

    bool has_monadic_facts() const {
        return std::any_of(facts_.begin(), facts_.end(), [](const Fact& f) { return f.arity == 1; });
    }

    Instance with(const std::vector<Fact>& more) const {
        auto all = facts_;
        all.insert(all.end(), more.begin(), more.end());
        return Instance(std::move(all));
    }
    Instance without(const Fact& f) const {
        std::vector<Fact> rest;
        rest.reserve(facts_.size());
        for (const auto& g : facts_)
            if (!(g == f)) rest.push_back(g);
        return Instance(std::move(rest));
    }

    // Subinstance induced by a set of elements.
    Instance induced(const std::set<Constant>& keep) const {
        std::vector<Fact> out;
        for (const auto& f : facts_)
            if (keep.count(f.subject) && keep.count(f.object)) out.push_back(f);
        return Instance(std::move(out));
    }

    bool subset_of(const Instance& other) const {
        return std::includes(other.facts_.begin(), other.facts_.end(), facts_.begin(), facts_.end());
    }

    // One fact per line in the text format; also the tie-breaking key.
    std::string str() const {
        std::string out;
        for (const auto& f : facts_) out += f.str() + ".\n";
        return out;
    }

    friend bool operator==(const Instance&, const Instance&) = default;

private:
    std::vector<Fact> facts_;
};

// ---------------------------------------------------------------------------
// Text format

namespace detail {

inline bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#' || c == '@';
}

inline std::string upper(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

inline std::string strip_comments(std::string_view text) {
    std::string out;
    bool in_comment = false;
    for (char c : text) {
        if (c == '%') in_comment = true;
        if (c == '\n') in_comment = false;
        if (!in_comment) out.push_back(c);
    }
    return out;
}

// Minimal cursor over whitespace-insensitive input.
class Cursor {
public:
    explicit Cursor(std::string_view s) : s_(s) {}

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool done() {
        skip_ws();
        return pos_ >= s_.size();
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    bool accept(std::string_view tok) {
        skip_ws();
        if (s_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }
    std::string name() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() && is_name_char(s_[pos_])) ++pos_;
        if (start == pos_) fail("expected a name");
        return std::string(s_.substr(start, pos_ - start));
    }
    // Longest run of digits, '/' and '.', e.g. "1/2." or "0.25.".
    std::string number() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '/' || s_[pos_] == '.'))
            ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }
    [[noreturn]] void fail(const std::string& what) const {
        std::size_t line = 1 + static_cast<std::size_t>(std::count(s_.begin(), s_.begin() + static_cast<long>(pos_), '\n'));
        throw ParseError(what + " at line " + std::to_string(line));
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

inline Fact parse_fact_at(Cursor& cur, bool allow_monadic) {
    std::string rel = upper(cur.name());
    cur.expect('(');
    std::string a = cur.name();
    if (cur.accept(')')) {
        if (!allow_monadic) cur.fail("arity-1 fact " + rel + "(" + a + ") outside mixed-arity mode");
        return Fact::monadic(rel, a);
    }
    cur.expect(',');
    std::string b = cur.name();
    cur.expect(')');
    return Fact(rel, a, b);
}

}  // namespace detail

// Parses `R(a,b).` facts; `%` starts a comment. Relation names are upper-cased.
inline Instance parse_instance(std::string_view text, bool allow_monadic = false) {
    auto body = detail::strip_comments(text);
    detail::Cursor cur(body);
    std::vector<Fact> facts;
    std::map<std::string, int> arity;
    while (!cur.done()) {
        Fact f = detail::parse_fact_at(cur, allow_monadic);
        cur.expect('.');
        auto [it, fresh] = arity.emplace(f.relation, f.arity);
        if (!fresh && it->second != f.arity) throw ParseError("relation " + f.relation + " used with two arities");
        facts.push_back(std::move(f));
    }
    return Instance(std::move(facts));
}

inline Fact parse_fact(std::string_view text, bool allow_monadic = false) {
    detail::Cursor cur(text);
    Fact f = detail::parse_fact_at(cur, allow_monadic);
    cur.accept('.');
    if (!cur.done()) cur.fail("trailing input after fact");
    return f;
}

// `R(a,b)` or `R-(b,a)`.
inline OrientedFact parse_oriented_fact(std::string_view text) {
    detail::Cursor cur(text);
    std::string rel = detail::upper(cur.name());
    bool inverse = cur.accept('-');
    cur.expect('(');
    std::string a = cur.name();
    cur.expect(',');
    std::string b = cur.name();
    cur.expect(')');
    if (!cur.done()) cur.fail("trailing input after oriented fact");
    return {rel, inverse, a, b};
}

inline DirectedEdge parse_edge(std::string_view text) {
    auto comma = text.find(',');
    if (comma == std::string_view::npos) throw ParseError("edge must be written u,v");
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return std::string(s);
    };
    DirectedEdge e{trim(text.substr(0, comma)), trim(text.substr(comma + 1))};
    if (e.u.empty() || e.v.empty()) throw ParseError("edge must be written u,v");
    return e;
}

// ---------------------------------------------------------------------------
// Fresh names

// Returns `stem` if unused, otherwise stem@2, stem@3, ... The chosen name is
// added to `taken`.
inline Constant fresh_name(std::set<Constant>& taken, const std::string& stem) {
    Constant candidate = stem;
    for (int k = 2; taken.count(candidate); ++k) candidate = stem + "@" + std::to_string(k);
    taken.insert(candidate);
    return candidate;
}

// ---------------------------------------------------------------------------
// Gaifman graph and edges

inline void require_binary(const Instance& inst, const char* what) {
    if (inst.has_monadic_facts())
        throw std::invalid_argument(std::string(what) + " requires an arity-two instance");
}

// Neighbours in the Gaifman graph.
inline std::map<Constant, std::set<Constant>> gaifman(const Instance& inst) {
    std::map<Constant, std::set<Constant>> adj;
    for (const auto& f : inst) {
        adj[f.subject];
        adj[f.object];
        if (f.subject != f.object) {
            adj[f.subject].insert(f.object);
            adj[f.object].insert(f.subject);
        }
    }
    return adj;
}

// Undirected edges as (u,v) with u < v, sorted.
inline std::vector<std::pair<Constant, Constant>> undirected_edges(const Instance& inst) {
    std::set<std::pair<Constant, Constant>> out;
    for (const auto& f : inst)
        if (f.subject != f.object) out.insert(std::minmax(f.subject, f.object));
    return {out.begin(), out.end()};
}

inline bool is_edge(const Instance& inst, const DirectedEdge& e) {
    if (e.u == e.v) return false;
    return std::any_of(inst.begin(), inst.end(), [&](const Fact& f) {
        return (f.subject == e.u && f.object == e.v) || (f.subject == e.v && f.object == e.u);
    });
}

inline void require_edge(const Instance& inst, const DirectedEdge& e) {
    if (!is_edge(inst, e)) throw std::invalid_argument(e.str() + " is not an edge of the instance");
}

// Facts of the instance covered by e, in oriented form: S(u,u), S(v,v),
// S(u,v) and S-(u,v) for S(v,u). Ordered by kind, then relation.
inline std::vector<OrientedFact> covered_facts(const Instance& inst, const DirectedEdge& e) {
    require_edge(inst, e);
    std::vector<OrientedFact> uu, vv, fwd, bwd;
    for (const auto& f : inst) {
        if (f.subject == e.u && f.object == e.u) uu.push_back(forward_view(f));
        else if (f.subject == e.v && f.object == e.v) vv.push_back(forward_view(f));
        else if (f.subject == e.u && f.object == e.v) fwd.push_back(forward_view(f));
        else if (f.subject == e.v && f.object == e.u) bwd.push_back(backward_view(f));
    }
    std::vector<OrientedFact> out;
    for (auto* part : {&uu, &vv, &fwd, &bwd}) {
        std::sort(part->begin(), part->end());
        out.insert(out.end(), part->begin(), part->end());
    }
    return out;
}

// The underlying facts whose domain lies within {u,v}.
inline std::vector<Fact> covered_sigma_facts(const Instance& inst, const DirectedEdge& e) {
    std::vector<Fact> out;
    for (const auto& f : inst) {
        bool in_u = f.subject == e.u || f.subject == e.v;
        bool in_v = f.object == e.u || f.object == e.v;
        if (in_u && in_v) out.push_back(f);
    }
    return out;
}

// Copies the facts covered by src onto the pair dst.
inline Instance copy_edge(const Instance& inst, const DirectedEdge& src, const DirectedEdge& dst) {
    require_edge(inst, src);
    std::vector<Fact> added;
    for (const auto& f : inst) {
        if (f.subject == src.u && f.object == src.v) added.emplace_back(f.relation, dst.u, dst.v);
        else if (f.subject == src.v && f.object == src.u) added.emplace_back(f.relation, dst.v, dst.u);
        else if (f.subject == src.u && f.object == src.u) added.emplace_back(f.relation, dst.u, dst.u);
        else if (f.subject == src.v && f.object == src.v) added.emplace_back(f.relation, dst.v, dst.v);
    }
    return inst.with(added);
}

// Number of undirected edges each element occurs in.
inline std::map<Constant, std::size_t> edge_degrees(const Instance& inst) {
    std::map<Constant, std::size_t> deg;
    for (const auto& [c, nbrs] : gaifman(inst)) deg[c] = nbrs.size();
    return deg;
}

inline bool is_non_leaf_edge(const Instance& inst, const DirectedEdge& e) {
    if (!is_edge(inst, e)) return false;
    auto deg = edge_degrees(inst);
    return deg[e.u] >= 2 && deg[e.v] >= 2;
}

inline std::vector<std::pair<Constant, Constant>> non_leaf_edges(const Instance& inst) {
    auto deg = edge_degrees(inst);
    std::vector<std::pair<Constant, Constant>> out;
    for (auto& [a, b] : undirected_edges(inst))
        if (deg[a] >= 2 && deg[b] >= 2) out.emplace_back(a, b);
    return out;
}

inline void require_non_leaf(const Instance& inst, const DirectedEdge& e) {
    require_edge(inst, e);
    if (!is_non_leaf_edge(inst, e)) throw std::invalid_argument(e.str() + " is a leaf edge");
}

// Oriented facts R(l,u) with l outside {u,v}.
inline std::vector<OrientedFact> left_incident(const Instance& inst, const DirectedEdge& e) {
    std::vector<OrientedFact> out;
    for (const auto& f : inst) {
        if (f.object == e.u && f.subject != e.u && f.subject != e.v) out.push_back(forward_view(f));
        if (f.subject == e.u && f.object != e.u && f.object != e.v) out.push_back(backward_view(f));
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Oriented facts R(v,r) with r outside {u,v}.
inline std::vector<OrientedFact> right_incident(const Instance& inst, const DirectedEdge& e) {
    std::vector<OrientedFact> out;
    for (const auto& f : inst) {
        if (f.subject == e.v && f.object != e.u && f.object != e.v) out.push_back(forward_view(f));
        if (f.object == e.v && f.subject != e.u && f.subject != e.v) out.push_back(backward_view(f));
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<IncidentPair> incident_pairs(const Instance& inst, const DirectedEdge& e) {
    require_non_leaf(inst, e);
    std::vector<IncidentPair> out;
    for (const auto& l : left_incident(inst, e))
        for (const auto& r : right_incident(inst, e)) out.push_back({l, r});
    return out;
}

inline void require_incident_pair(const Instance& inst, const DirectedEdge& e, const IncidentPair& pair) {
    auto lefts = left_incident(inst, e);
    auto rights = right_incident(inst, e);
    if (!std::binary_search(lefts.begin(), lefts.end(), pair.left))
        throw std::invalid_argument(pair.left.str() + " is not left-incident to " + e.str());
    if (!std::binary_search(rights.begin(), rights.end(), pair.right))
        throw std::invalid_argument(pair.right.str() + " is not right-incident to " + e.str());
}

// Connected components of the Gaifman graph, each as a sorted element list.
inline std::vector<std::vector<Constant>> components(const Instance& inst) {
    auto adj = gaifman(inst);
    std::set<Constant> seen;
    std::vector<std::vector<Constant>> out;
    for (const auto& [start, _] : adj) {
        if (seen.count(start)) continue;
        std::vector<Constant> comp, stack{start};
        seen.insert(start);
        while (!stack.empty()) {
            auto c = stack.back();
            stack.pop_back();
            comp.push_back(c);
            for (const auto& n : adj[c])
                if (seen.insert(n).second) stack.push_back(n);
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    return out;
}

inline std::ostream& operator<<(std::ostream& os, const Fact& f) { return os << f.str(); }
inline std::ostream& operator<<(std::ostream& os, const OrientedFact& f) { return os << f.str(); }
inline std::ostream& operator<<(std::ostream& os, const Instance& i) { return os << i.str(); }

}  // namespace tidg
