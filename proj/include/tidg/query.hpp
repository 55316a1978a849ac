#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <deque>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "homomorphism.hpp"
#include "instance.hpp"

namespace tidg {

// ---------------------------------------------------------------------------
// Query types

// Atom over variables; arity 0 (intensional Goal), 1 or 2.
struct Atom {
    std::string predicate;
    std::vector<std::string> args;

    std::string str() const {
        std::string out = predicate;
        if (args.empty()) return out;
        out += "(";
        for (std::size_t i = 0; i < args.size(); ++i) out += (i ? "," : "") + args[i];
        return out + ")";
    }
    friend bool operator==(const Atom&, const Atom&) = default;
};

struct CQ {
    std::vector<Atom> atoms;
};

struct UCQ {
    std::vector<CQ> disjuncts;
};

// Regular expression over relations and their inverses.
struct Regex {
    enum class Kind { symbol, concat, alternation, star, plus };
    Kind kind = Kind::symbol;
    std::string relation;
    bool inverse = false;
    std::vector<Regex> children;
};

struct RPQ2 {
    Regex expr;
    std::string text;
};

struct Rule {
    Atom head;
    std::vector<Atom> body;
};

struct DatalogProgram {
    std::vector<Rule> rules;

    static constexpr const char* goal = "GOAL";

    std::map<std::string, std::size_t> intensional() const {
        std::map<std::string, std::size_t> out;
        for (const auto& r : rules) out[r.head.predicate] = r.head.args.size();
        return out;
    }
};

// One of the three homomorphism-closed classes.
struct Query {
    std::variant<UCQ, RPQ2, DatalogProgram> body;

    Query() = default;
    Query(UCQ q) : body(std::move(q)) {}
    Query(RPQ2 q) : body(std::move(q)) {}
    Query(DatalogProgram q) : body(std::move(q)) {}

    std::string kind() const {
        switch (body.index()) {
            case 0: return "ucq";
            case 1: return "rpq";
            default: return "datalog";
        }
    }
};

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline bool is_variable(const std::string& s) { return !s.empty() && std::isupper(static_cast<unsigned char>(s[0])); }

inline Atom parse_atom(Cursor& cur, bool allow_monadic) {
    Atom a;
    a.predicate = upper(cur.name());
    if (cur.accept('(')) {
        do {
            std::string arg = cur.name();
            if (!is_variable(arg)) cur.fail("argument '" + arg + "' must be a variable (upper-case initial)");
            a.args.push_back(arg);
        } while (cur.accept(','));
        cur.expect(')');
    }
    if (a.args.size() > 2) cur.fail("atom " + a.predicate + " has arity above two");
    if (a.args.size() == 1 && !allow_monadic) {
        // Arity-1 atoms are fine for intensional predicates; extensional ones
        // are checked by the caller once heads are known.
    }
    return a;
}

struct RawRule {
    Atom head;
    std::vector<Atom> body;
};

inline std::vector<RawRule> parse_rules(std::string_view text, bool allow_monadic) {
    auto stripped = strip_comments(text);
    Cursor cur(stripped);
    std::vector<RawRule> rules;
    while (!cur.done()) {
        RawRule r;
        r.head = parse_atom(cur, allow_monadic);
        if (!cur.accept(":-")) cur.fail("expected ':-'");
        do r.body.push_back(parse_atom(cur, allow_monadic));
        while (cur.accept(','));
        cur.expect('.');
        rules.push_back(std::move(r));
    }
    return rules;
}

inline void check_extensional_arity(const Atom& a, bool allow_monadic) {
    if (a.args.size() == 0) throw ParseError("extensional atom " + a.predicate + " has arity 0");
    if (a.args.size() == 1 && !allow_monadic)
        throw ParseError("arity-1 extensional atom " + a.str() + " outside mixed-arity mode");
}

}  // namespace detail

// `q :- r(W,X), s(X,Y).`, one CQ per line.
inline UCQ parse_ucq(std::string_view text, bool allow_monadic = false) {
    UCQ q;
    for (auto& r : detail::parse_rules(text, allow_monadic)) {
        if (!r.head.args.empty()) throw ParseError("UCQ heads must be nullary, got " + r.head.str());
        for (const auto& a : r.body) detail::check_extensional_arity(a, allow_monadic);
        q.disjuncts.push_back({std::move(r.body)});
    }
    if (q.disjuncts.empty()) throw ParseError("UCQ without disjuncts");
    return q;
}

inline DatalogProgram parse_datalog(std::string_view text, bool allow_monadic = false) {
    DatalogProgram p;
    for (auto& r : detail::parse_rules(text, allow_monadic)) p.rules.push_back({std::move(r.head), std::move(r.body)});
    auto idb = p.intensional();
    bool has_goal = false;
    for (const auto& r : p.rules) {
        auto it = idb.find(r.head.predicate);
        if (it->second != r.head.args.size())
            throw ParseError("intensional predicate " + r.head.predicate + " used with two arities");
        if (r.head.predicate == DatalogProgram::goal) {
            has_goal = true;
            if (!r.head.args.empty()) throw ParseError("Goal must be nullary");
        }
        std::set<std::string> body_vars;
        for (const auto& a : r.body) {
            auto ii = idb.find(a.predicate);
            if (ii != idb.end()) {
                if (ii->second != a.args.size())
                    throw ParseError("intensional predicate " + a.predicate + " used with two arities");
            } else {
                detail::check_extensional_arity(a, allow_monadic);
            }
            body_vars.insert(a.args.begin(), a.args.end());
        }
        for (const auto& v : r.head.args)
            if (!body_vars.count(v)) throw ParseError("rule for " + r.head.str() + " is not range-restricted");
    }
    if (!has_goal) throw ParseError("program never derives Goal");
    return p;
}

namespace detail {

class RegexParser {
public:
    explicit RegexParser(std::string_view s) : cur_(s) {}

    Regex parse() {
        Regex r = alternation();
        if (!cur_.done()) cur_.fail("unexpected character in RPQ");
        return r;
    }

private:
    bool starts_item() {
        char c = cur_.peek();
        return c == '(' || is_name_char(c);
    }
    Regex alternation() {
        Regex first = concat();
        if (cur_.peek() != '|') return first;
        Regex alt{Regex::Kind::alternation, {}, false, {std::move(first)}};
        while (cur_.accept('|')) alt.children.push_back(concat());
        return alt;
    }
    Regex concat() {
        if (!starts_item()) cur_.fail("expected a relation or '('");
        Regex first = postfix();
        if (!starts_item()) return first;
        Regex cat{Regex::Kind::concat, {}, false, {std::move(first)}};
        while (starts_item()) cat.children.push_back(postfix());
        return cat;
    }
    Regex postfix() {
        Regex r = item();
        for (;;) {
            if (cur_.accept('*')) r = Regex{Regex::Kind::star, {}, false, {std::move(r)}};
            else if (cur_.accept('+')) r = Regex{Regex::Kind::plus, {}, false, {std::move(r)}};
            else return r;
        }
    }
    Regex item() {
        if (cur_.accept('(')) {
            Regex r = alternation();
            cur_.expect(')');
            return r;
        }
        Regex sym;
        sym.relation = upper(cur_.name());
        sym.inverse = cur_.accept('-');
        return sym;
    }
    Cursor cur_;
};

inline std::string trim_line(std::string_view s) {
    std::string out(s);
    while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
    std::size_t i = 0;
    while (i < out.size() && std::isspace(static_cast<unsigned char>(out[i]))) ++i;
    return out.substr(i);
}

}  // namespace detail

// Tokens are relation names with optional '-' suffix; operators * + | ( ).
inline RPQ2 parse_rpq(std::string_view text) {
    auto stripped = detail::trim_line(detail::strip_comments(text));
    return RPQ2{detail::RegexParser(stripped).parse(), stripped};
}

enum class QueryFormat { ucq, rpq, datalog, sniff };

inline Query parse_query(std::string_view text, QueryFormat format = QueryFormat::sniff, bool allow_monadic = false) {
    if (format == QueryFormat::sniff) {
        auto stripped = detail::strip_comments(text);
        if (stripped.find(":-") == std::string::npos) {
            format = QueryFormat::rpq;
        } else {
            auto rules = detail::parse_rules(stripped, true);
            bool all_q = std::all_of(rules.begin(), rules.end(),
                                     [](const auto& r) { return r.head.args.empty() && r.head.predicate == "Q"; });
            format = all_q ? QueryFormat::ucq : QueryFormat::datalog;
        }
    }
    switch (format) {
        case QueryFormat::ucq: return parse_ucq(text, allow_monadic);
        case QueryFormat::rpq: return parse_rpq(text);
        default: return parse_datalog(text, allow_monadic);
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Query load_query(const std::string& path, bool allow_monadic = false) {
    auto ends_with = [&](std::string_view suffix) {
        return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    QueryFormat f = QueryFormat::sniff;
    if (ends_with(".ucq")) f = QueryFormat::ucq;
    else if (ends_with(".rpq")) f = QueryFormat::rpq;
    else if (ends_with(".dl") || ends_with(".datalog")) f = QueryFormat::datalog;
    return parse_query(read_file(path), f, allow_monadic);
}

inline std::string to_text(const Query& q) {
    std::string out;
    if (auto* u = std::get_if<UCQ>(&q.body)) {
        for (const auto& cq : u->disjuncts) {
            out += "q :- ";
            for (std::size_t i = 0; i < cq.atoms.size(); ++i) out += (i ? ", " : "") + cq.atoms[i].str();
            out += ".\n";
        }
    } else if (auto* r = std::get_if<RPQ2>(&q.body)) {
        out = r->text + "\n";
    } else {
        for (const auto& rule : std::get<DatalogProgram>(q.body).rules) {
            out += rule.head.str() + " :- ";
            for (std::size_t i = 0; i < rule.body.size(); ++i) out += (i ? ", " : "") + rule.body[i].str();
            out += ".\n";
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Automata

struct SymbolLabel {
    std::string relation;
    bool inverse = false;
    friend auto operator<=>(const SymbolLabel&, const SymbolLabel&) = default;
    friend bool operator==(const SymbolLabel&, const SymbolLabel&) = default;
};

// Thompson automaton: one start and one accepting state.
struct Nfa {
    struct Transition {
        SymbolLabel label;
        int target;
    };
    int start = 0;
    int accept = 0;
    std::vector<std::vector<Transition>> transitions;
    std::vector<std::vector<int>> epsilon;

    int states() const { return static_cast<int>(transitions.size()); }

    int add_state() {
        transitions.emplace_back();
        epsilon.emplace_back();
        return states() - 1;
    }

    std::vector<int> closure(std::vector<int> from) const {
        std::vector<bool> seen(static_cast<std::size_t>(states()), false);
        std::vector<int> out;
        while (!from.empty()) {
            int s = from.back();
            from.pop_back();
            if (seen[static_cast<std::size_t>(s)]) continue;
            seen[static_cast<std::size_t>(s)] = true;
            out.push_back(s);
            for (int t : epsilon[static_cast<std::size_t>(s)]) from.push_back(t);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    bool accepts(const std::vector<SymbolLabel>& word) const {
        auto current = closure({start});
        for (const auto& sym : word) {
            std::vector<int> next;
            for (int s : current)
                for (const auto& t : transitions[static_cast<std::size_t>(s)])
                    if (t.label == sym) next.push_back(t.target);
            current = closure(std::move(next));
        }
        return std::binary_search(current.begin(), current.end(), accept);
    }
};

namespace detail {

inline std::pair<int, int> thompson(Nfa& nfa, const Regex& r) {
    switch (r.kind) {
        case Regex::Kind::symbol: {
            int s = nfa.add_state(), f = nfa.add_state();
            nfa.transitions[static_cast<std::size_t>(s)].push_back({{r.relation, r.inverse}, f});
            return {s, f};
        }
        case Regex::Kind::concat: {
            auto [s, f] = thompson(nfa, r.children.front());
            for (std::size_t i = 1; i < r.children.size(); ++i) {
                auto [s2, f2] = thompson(nfa, r.children[i]);
                nfa.epsilon[static_cast<std::size_t>(f)].push_back(s2);
                f = f2;
            }
            return {s, f};
        }
        case Regex::Kind::alternation: {
            int s = nfa.add_state(), f = nfa.add_state();
            for (const auto& c : r.children) {
                auto [cs, cf] = thompson(nfa, c);
                nfa.epsilon[static_cast<std::size_t>(s)].push_back(cs);
                nfa.epsilon[static_cast<std::size_t>(cf)].push_back(f);
            }
            return {s, f};
        }
        case Regex::Kind::star:
        case Regex::Kind::plus: {
            int s = nfa.add_state(), f = nfa.add_state();
            auto [cs, cf] = thompson(nfa, r.children.front());
            nfa.epsilon[static_cast<std::size_t>(s)].push_back(cs);
            nfa.epsilon[static_cast<std::size_t>(cf)].push_back(f);
            nfa.epsilon[static_cast<std::size_t>(cf)].push_back(cs);
            if (r.kind == Regex::Kind::star) nfa.epsilon[static_cast<std::size_t>(s)].push_back(f);
            return {s, f};
        }
    }
    return {0, 0};
}

}  // namespace detail

inline Nfa rpq_to_nfa(const RPQ2& q) {
    Nfa nfa;
    auto [s, f] = detail::thompson(nfa, q.expr);
    nfa.start = s;
    nfa.accept = f;
    return nfa;
}

// ---------------------------------------------------------------------------
// Evaluation

struct IntensionalFact {
    std::string predicate;
    std::vector<Constant> args;

    std::string str() const {
        std::string out = predicate + "(";
        for (std::size_t i = 0; i < args.size(); ++i) out += (i ? "," : "") + args[i];
        return out + ")";
    }
    friend auto operator<=>(const IntensionalFact&, const IntensionalFact&) = default;
    friend bool operator==(const IntensionalFact&, const IntensionalFact&) = default;
};

namespace detail {

// Facts of one structure indexed for joins.
struct FactIndex {
    int nr = 0, nc = 0;
    std::vector<std::vector<std::pair<int, int>>> by_rel;
    std::vector<std::vector<int>> out, in;  // slot rel * nc + constant

    FactIndex(int num_relations, int num_constants, const std::vector<IndexedFact>& facts)
        : nr(num_relations), nc(num_constants), by_rel(static_cast<std::size_t>(num_relations)),
          out(static_cast<std::size_t>(num_relations * num_constants)),
          in(static_cast<std::size_t>(num_relations * num_constants)) {
        for (const auto& f : facts) {
            by_rel[static_cast<std::size_t>(f.rel)].push_back({f.a, f.b});
            out[slot(f.rel, f.a)].push_back(f.b);
            in[slot(f.rel, f.b)].push_back(f.a);
        }
    }
    std::size_t slot(int rel, int c) const { return static_cast<std::size_t>(rel * nc + c); }
};

class DatalogEngine {
public:
    // Relations of extensional atoms are resolved against `relations`; unknown
    // ones get id -1 and never match.
    DatalogEngine(const DatalogProgram& p, const SymbolTable& relations) {
        auto idb = p.intensional();
        for (const auto& [name, arity] : idb) {
            pred_ids_[name] = static_cast<int>(preds_.size());
            preds_.push_back({name, arity});
        }
        goal_ = pred_ids_.count(DatalogProgram::goal) ? pred_ids_[DatalogProgram::goal] : -1;
        for (const auto& r : p.rules) {
            CompiledRule cr;
            std::map<std::string, int> vars;
            auto var_id = [&](const std::string& v) {
                auto [it, fresh] = vars.emplace(v, static_cast<int>(vars.size()));
                return it->second;
            };
            for (const auto& a : r.body) {
                BodyAtom ba;
                ba.arity = static_cast<int>(a.args.size());
                for (std::size_t i = 0; i < a.args.size(); ++i) ba.vars[i] = var_id(a.args[i]);
                if (auto it = pred_ids_.find(a.predicate); it != pred_ids_.end()) {
                    ba.intensional = true;
                    ba.id = it->second;
                } else {
                    Fact probe(a.predicate, "x", "x");
                    if (a.args.size() == 1) probe.arity = 1;
                    ba.id = relations.find(relation_key(probe));
                }
                cr.body.push_back(ba);
            }
            cr.head_pred = pred_ids_[r.head.predicate];
            cr.head_arity = static_cast<int>(r.head.args.size());
            for (std::size_t i = 0; i < r.head.args.size(); ++i) cr.head_vars[i] = vars.at(r.head.args[i]);
            cr.num_vars = static_cast<int>(vars.size());
            rules_.push_back(std::move(cr));
        }
    }

    // Semi-naive least fixpoint. Returns per-predicate tuple sets; stops early
    // once Goal is derived when `stop_at_goal`.
    std::vector<std::set<std::pair<int, int>>> run(const FactIndex& edb, bool stop_at_goal) const {
        std::size_t np = preds_.size();
        std::vector<std::set<std::pair<int, int>>> total(np), delta(np);
        std::vector<std::vector<std::pair<int, int>>> total_list(np), delta_list(np);

        auto absorb = [&](std::vector<std::set<std::pair<int, int>>>& fresh) {
            bool any = false;
            for (std::size_t p = 0; p < np; ++p) {
                delta[p].clear();
                delta_list[p].clear();
                for (const auto& t : fresh[p]) {
                    if (total[p].insert(t).second) {
                        total_list[p].push_back(t);
                        delta[p].insert(t);
                        delta_list[p].push_back(t);
                        any = true;
                    }
                }
            }
            return any;
        };

        std::vector<std::set<std::pair<int, int>>> fresh(np);
        for (const auto& r : rules_) fire(r, -1, edb, total_list, delta_list, fresh);
        bool changed = absorb(fresh);
        while (changed) {
            if (stop_at_goal && goal_ >= 0 && !total[static_cast<std::size_t>(goal_)].empty()) break;
            for (auto& f : fresh) f.clear();
            for (const auto& r : rules_)
                for (std::size_t i = 0; i < r.body.size(); ++i)
                    if (r.body[i].intensional && !delta_list[static_cast<std::size_t>(r.body[i].id)].empty())
                        fire(r, static_cast<int>(i), edb, total_list, delta_list, fresh);
            changed = absorb(fresh);
        }
        return total;
    }

    bool goal_derived(const std::vector<std::set<std::pair<int, int>>>& result) const {
        return goal_ >= 0 && !result[static_cast<std::size_t>(goal_)].empty();
    }

    const std::string& predicate_name(std::size_t p) const { return preds_[p].first; }
    std::size_t predicate_arity(std::size_t p) const { return preds_[p].second; }
    std::size_t predicates() const { return preds_.size(); }

private:
    struct BodyAtom {
        bool intensional = false;
        int id = -1;
        int arity = 0;
        int vars[2] = {-1, -1};
    };
    struct CompiledRule {
        std::vector<BodyAtom> body;
        int head_pred = -1;
        int head_arity = 0;
        int head_vars[2] = {-1, -1};
        int num_vars = 0;
    };

    using TupleLists = std::vector<std::vector<std::pair<int, int>>>;

    // Joins the body with atom `delta_pos` (if any) restricted to the delta.
    void fire(const CompiledRule& r, int delta_pos, const FactIndex& edb, const TupleLists& total,
              const TupleLists& delta, std::vector<std::set<std::pair<int, int>>>& out) const {
        std::vector<int> order;
        std::vector<bool> used(r.body.size(), false);
        std::vector<bool> bound(static_cast<std::size_t>(r.num_vars), false);
        auto mark = [&](std::size_t i) {
            used[i] = true;
            order.push_back(static_cast<int>(i));
            for (int k = 0; k < r.body[i].arity; ++k) bound[static_cast<std::size_t>(r.body[i].vars[k])] = true;
        };
        if (delta_pos >= 0) mark(static_cast<std::size_t>(delta_pos));
        while (order.size() < r.body.size()) {
            int best = -1, best_score = -1;
            for (std::size_t i = 0; i < r.body.size(); ++i) {
                if (used[i]) continue;
                int score = 0;
                for (int k = 0; k < r.body[i].arity; ++k) score += bound[static_cast<std::size_t>(r.body[i].vars[k])] ? 2 : 0;
                if (!r.body[i].intensional) score += 1;
                if (score > best_score) {
                    best_score = score;
                    best = static_cast<int>(i);
                }
            }
            mark(static_cast<std::size_t>(best));
        }
        for (const auto& a : r.body)
            if (!a.intensional && a.id < 0) return;
        std::vector<int> binding(static_cast<std::size_t>(r.num_vars), -1);
        join(r, order, 0, delta_pos, edb, total, delta, binding, out);
    }

    void join(const CompiledRule& r, const std::vector<int>& order, std::size_t depth, int delta_pos,
              const FactIndex& edb, const TupleLists& total, const TupleLists& delta, std::vector<int>& binding,
              std::vector<std::set<std::pair<int, int>>>& out) const {
        if (depth == order.size()) {
            std::pair<int, int> t{-1, -1};
            if (r.head_arity >= 1) t.first = binding[static_cast<std::size_t>(r.head_vars[0])];
            if (r.head_arity == 2) t.second = binding[static_cast<std::size_t>(r.head_vars[1])];
            out[static_cast<std::size_t>(r.head_pred)].insert(t);
            return;
        }
        int pos = order[depth];
        const auto& a = r.body[static_cast<std::size_t>(pos)];

        auto try_tuple = [&](int x, int y) {
            int saved[2] = {-1, -1};
            bool fresh[2] = {false, false};
            int vals[2] = {x, y};
            for (int k = 0; k < a.arity; ++k) {
                auto& slot = binding[static_cast<std::size_t>(a.vars[k])];
                if (slot >= 0) {
                    if (slot != vals[k]) {
                        for (int j = 0; j < k; ++j)
                            if (fresh[j]) binding[static_cast<std::size_t>(a.vars[j])] = saved[j];
                        return;
                    }
                } else {
                    saved[k] = slot;
                    slot = vals[k];
                    fresh[k] = true;
                }
            }
            join(r, order, depth + 1, delta_pos, edb, total, delta, binding, out);
            for (int k = 0; k < a.arity; ++k)
                if (fresh[k]) binding[static_cast<std::size_t>(a.vars[k])] = saved[k];
        };

        if (a.intensional) {
            const auto& source = pos == delta_pos ? delta[static_cast<std::size_t>(a.id)] : total[static_cast<std::size_t>(a.id)];
            for (const auto& [x, y] : source) try_tuple(x, y);
            return;
        }
        if (a.arity == 1) {
            int b0 = binding[static_cast<std::size_t>(a.vars[0])];
            if (b0 >= 0) {
                for (int y : edb.out[edb.slot(a.id, b0)])
                    if (y == b0) try_tuple(b0, b0);
            } else {
                for (const auto& [x, y] : edb.by_rel[static_cast<std::size_t>(a.id)]) try_tuple(x, y);
            }
            return;
        }
        int b0 = binding[static_cast<std::size_t>(a.vars[0])];
        int b1 = binding[static_cast<std::size_t>(a.vars[1])];
        if (b0 >= 0) {
            for (int y : edb.out[edb.slot(a.id, b0)]) try_tuple(b0, y);
        } else if (b1 >= 0) {
            for (int x : edb.in[edb.slot(a.id, b1)]) try_tuple(x, b1);
        } else {
            for (const auto& [x, y] : edb.by_rel[static_cast<std::size_t>(a.id)]) try_tuple(x, y);
        }
    }

    std::map<std::string, int> pred_ids_;
    std::vector<std::pair<std::string, std::size_t>> preds_;
    std::vector<CompiledRule> rules_;
    int goal_ = -1;
};

// A query bound to a relation table, evaluated on indexed fact lists.
class CompiledQuery {
public:
    CompiledQuery(const Query& q, const SymbolTable& relations) : kind_(q.body.index()) {
        if (auto* u = std::get_if<UCQ>(&q.body)) {
            for (const auto& cq : u->disjuncts) {
                SymbolTable vars;
                std::vector<IndexedFact> facts;
                for (const auto& a : cq.atoms) {
                    Fact probe(a.predicate, "x", "x");
                    if (a.args.size() == 1) probe.arity = 1;
                    int x = vars.intern(a.args[0]);
                    int y = a.args.size() == 2 ? vars.intern(a.args[1]) : x;
                    facts.push_back({relations.find(relation_key(probe)), x, y});
                }
                disjuncts_.push_back({vars.size(), std::move(facts)});
            }
        } else if (auto* r = std::get_if<RPQ2>(&q.body)) {
            Nfa nfa = rpq_to_nfa(*r);
            start_ = nfa.closure({nfa.start});
            accept_ = nfa.accept;
            int ns = nfa.states();
            closures_.resize(static_cast<std::size_t>(ns));
            steps_.resize(static_cast<std::size_t>(ns));
            for (int s = 0; s < ns; ++s) {
                for (const auto& t : nfa.transitions[static_cast<std::size_t>(s)]) {
                    int rel = relations.find(t.label.relation);
                    if (rel >= 0) steps_[static_cast<std::size_t>(s)].push_back({rel * 2 + (t.label.inverse ? 1 : 0), t.target});
                }
            }
            for (int s = 0; s < ns; ++s) closures_[static_cast<std::size_t>(s)] = nfa.closure({s});
            nfa_states_ = ns;
        } else {
            engine_ = std::make_shared<DatalogEngine>(std::get<DatalogProgram>(q.body), relations);
        }
    }

    // Throws BudgetExhausted if a homomorphism search runs out of budget.
    bool eval(int num_relations, int num_constants, const std::vector<IndexedFact>& facts,
              std::uint64_t budget = default_hom_budget) const {
        switch (kind_) {
            case 0: return eval_ucq(num_relations, num_constants, facts, budget);
            case 1: return eval_rpq(num_constants, facts);
            default: {
                FactIndex index(num_relations, num_constants, facts);
                return engine_->goal_derived(engine_->run(index, true));
            }
        }
    }

    const DatalogEngine* engine() const { return engine_.get(); }

private:
    bool eval_ucq(int nr, int nc, const std::vector<IndexedFact>& facts, std::uint64_t budget) const {
        TargetIndex index(nr, nc, facts);
        for (const auto& [nv, atoms] : disjuncts_) {
            HomSolver solver(nv, atoms, index, false, budget);
            auto r = solver.solve();
            if (r.status == SearchStatus::budget_exhausted) throw BudgetExhausted("CQ match budget exhausted");
            if (r.status == SearchStatus::found) return true;
        }
        return false;
    }

    bool eval_rpq(int nc, const std::vector<IndexedFact>& facts) const {
        // Oriented adjacency: label id (rel*2 + inverse) and target constant.
        std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(nc));
        for (const auto& f : facts) {
            adj[static_cast<std::size_t>(f.a)].push_back({f.rel * 2, f.b});
            adj[static_cast<std::size_t>(f.b)].push_back({f.rel * 2 + 1, f.a});
        }
        std::vector<bool> seen(static_cast<std::size_t>(nc * nfa_states_), false);
        std::vector<std::pair<int, int>> queue;
        std::vector<bool> present(static_cast<std::size_t>(nc), false);
        for (const auto& f : facts) present[static_cast<std::size_t>(f.a)] = present[static_cast<std::size_t>(f.b)] = true;
        auto push = [&](int c, int s) {
            auto k = static_cast<std::size_t>(c * nfa_states_ + s);
            if (!seen[k]) {
                seen[k] = true;
                queue.push_back({c, s});
            }
        };
        for (int c = 0; c < nc; ++c)
            if (present[static_cast<std::size_t>(c)])
                for (int s : start_) push(c, s);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            auto [c, s] = queue[head];
            if (s == accept_) return true;
            for (const auto& [label, next_state] : steps_[static_cast<std::size_t>(s)])
                for (const auto& [l2, d] : adj[static_cast<std::size_t>(c)])
                    if (l2 == label)
                        for (int s2 : closures_[static_cast<std::size_t>(next_state)]) push(d, s2);
        }
        return false;
    }

    std::size_t kind_;
    std::vector<std::pair<int, std::vector<IndexedFact>>> disjuncts_;
    std::vector<int> start_;
    int accept_ = -1;
    int nfa_states_ = 0;
    std::vector<std::vector<int>> closures_;
    std::vector<std::vector<std::pair<int, int>>> steps_;
    std::shared_ptr<DatalogEngine> engine_;
};

// An instance interned once, so many sub-instances can be evaluated cheaply.
struct IndexedInstance {
    SymbolTable relations;
    SymbolTable constants;
    std::vector<IndexedFact> facts;  // parallel to Instance::facts()

    explicit IndexedInstance(const Instance& inst) {
        for (const auto& f : inst)
            facts.push_back({relations.intern(relation_key(f)), constants.intern(f.subject), constants.intern(f.object)});
    }
};

}  // namespace detail

inline bool eval_query(const Query& q, const Instance& inst, std::uint64_t budget = default_hom_budget) {
    detail::IndexedInstance idx(inst);
    detail::CompiledQuery cq(q, idx.relations);
    return cq.eval(idx.relations.size(), idx.constants.size(), idx.facts, budget);
}

inline std::set<IntensionalFact> datalog_fixpoint(const DatalogProgram& p, const Instance& inst) {
    detail::IndexedInstance idx(inst);
    detail::DatalogEngine engine(p, idx.relations);
    detail::FactIndex index(idx.relations.size(), idx.constants.size(), idx.facts);
    auto result = engine.run(index, false);
    std::set<IntensionalFact> out;
    for (std::size_t p_id = 0; p_id < engine.predicates(); ++p_id) {
        for (const auto& [x, y] : result[p_id]) {
            IntensionalFact f{engine.predicate_name(p_id), {}};
            if (engine.predicate_arity(p_id) >= 1) f.args.push_back(idx.constants.name(x));
            if (engine.predicate_arity(p_id) == 2) f.args.push_back(idx.constants.name(y));
            out.insert(std::move(f));
        }
    }
    return out;
}

}  // namespace tidg
