#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tidg.hpp"

namespace tidg::cli {

// Exit codes: 0 success or equality, 1 a checked property failed, 2 usage,
// input or limit error.
inline constexpr int exit_ok = 0;
inline constexpr int exit_failed = 1;
inline constexpr int exit_usage = 2;

inline const char* formats_help = R"txt(Formats:
  instance   one fact per line, '%' starts a comment      R(a,b). S(b,c).
  TID        fact with optional probability (default 1)   R(a,b) : 1/2.   S(b,c) : 0.5.
  UCQ        one CQ per line, lines are disjuncts         q :- r(W,X), s(X,Y), t(Y,Z).
  RPQ        one line, '-' marks an inverse               R S* T
  Datalog    one rule per line, 0-ary goal                u(X) :- r(X,Y).  goal :- u(X), t(X,Y).
  H.json     bipartite graph                              {"A":["a"],"B":["b"],"C":[["a","b"]]}
  G.json     st-graph                                     {"W":["s","t"],"C":[["s","t"]],"s":"s","t":"t"}
  edge       --edge u,v    incident facts  --left "R(l,u)" --right "T-(v,r)"    covered fact  --mid "S(u,v)"
Exit codes: 0 success/equality, 1 checked property failed, 2 usage or limit error.)txt";

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

struct Options {
    std::string query, instance, tid, src, dst, graph, out_prefix;
    std::string edge, left, right, mid;
    std::vector<std::string> seeds;
    int n = 1, n0 = 0, n_max = default_n_max, domain_bound = 4, max_facts = 4;
    std::uint64_t max_worlds = default_world_cap, budget = default_hom_budget, rng_seed = 0;
    std::size_t spot_checks = 128;
    bool mixed = false;
};

inline Instance load_instance(const std::string& path, bool mixed = false) {
    return parse_instance(read_file(path), mixed);
}

inline Json load_json(const std::string& path) {
    try {
        return Json::parse(read_file(path));
    } catch (const Json::parse_error& ex) {
        throw ParseError(path + ": " + ex.what());
    }
}

inline std::vector<Instance> load_seeds(const Options& o) {
    std::vector<Instance> out;
    for (const auto& p : o.seeds) out.push_back(load_instance(p));
    return out;
}

inline DirectedEdge edge_of(const Options& o) {
    if (o.edge.empty()) throw UsageError("--edge u,v is required");
    return parse_edge(o.edge);
}

// The incident pair from --left/--right, defaulting to the first pair.
inline IncidentPair pair_of(const Options& o, const Instance& inst, const DirectedEdge& e) {
    auto pairs = incident_pairs(inst, e);
    IncidentPair p = pairs.front();
    if (!o.left.empty()) p.left = parse_oriented_fact(o.left);
    if (!o.right.empty()) p.right = parse_oriented_fact(o.right);
    require_incident_pair(inst, e, p);
    return p;
}

// --mid, defaulting to the first non-unary covered fact.
inline Fact mid_of(const Options& o, const Instance& inst, const DirectedEdge& e) {
    if (!o.mid.empty()) return parse_fact(o.mid);
    for (const auto& f : covered_sigma_facts(inst, e))
        if (!f.is_unary()) return f;
    throw std::invalid_argument("edge covers no non-unary fact");
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

inline Json hom_json(const Homomorphism& h) {
    Json j = Json::object();
    for (const auto& [a, b] : h) j[a] = b;
    return j;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Probabilistic query evaluation on tuple-independent graphs", "tidg"};
    app.footer(formats_help);
    app.require_subcommand(1, 1);
    detail::Options o;

    auto add_query = [&](CLI::App* c) { c->add_option("-q,--query", o.query, "query file (.ucq, .rpq, .dl)")->required(); };
    auto add_instance = [&](CLI::App* c) { c->add_option("-i,--instance", o.instance, "instance file")->required(); };
    auto add_edge = [&](CLI::App* c) {
        c->add_option("--edge", o.edge, "directed edge u,v")->required();
    };
    auto add_pair = [&](CLI::App* c) {
        c->add_option("--left", o.left, "left-incident fact, e.g. R(l,u) or R-(l,u)");
        c->add_option("--right", o.right, "right-incident fact, e.g. T(v,r) or T-(v,r)");
    };
    auto add_budget = [&](CLI::App* c) { c->add_option("--budget", o.budget, "homomorphism search step budget"); };
    auto add_graph = [&](CLI::App* c, const char* what) { c->add_option("-g,--graph", o.graph, what)->required(); };
    auto add_seeds = [&](CLI::App* c) {
        c->add_option("--seeds,--seed-file", o.seeds, "seed model files (default: enumerate minimal models)");
        c->add_option("--domain-bound", o.domain_bound, "domain size for enumerated seeds");
        c->add_option("--max-facts", o.max_facts, "fact bound for enumerated seeds");
        c->add_option("--n-max", o.n_max, "iterability probe bound");
    };
    auto add_verify = [&](CLI::App* c) {
        c->add_option("--spot-checks", o.spot_checks, "sampled worlds for homomorphism checks");
        c->add_option("--rng-seed", o.rng_seed, "seed for world sampling");
        c->add_option("--max-worlds", o.max_worlds, "world enumeration cap");
    };

    auto* eval = app.add_subcommand("eval", "evaluate a query on an instance");
    add_query(eval);
    add_instance(eval);
    add_budget(eval);

    auto* pqe = app.add_subcommand("pqe", "exact query probability on a TID");
    add_query(pqe);
    pqe->add_option("-t,--tid", o.tid, "TID file")->required();
    pqe->add_option("--max-worlds", o.max_worlds, "world enumeration cap");
    add_budget(pqe);

    auto* hom = app.add_subcommand("hom", "search a homomorphism");
    hom->add_option("-s,--src", o.src, "source instance")->required();
    hom->add_option("-d,--dst", o.dst, "target instance")->required();
    add_budget(hom);

    auto* iterate = app.add_subcommand("iterate", "n-th iterate of an edge");
    add_instance(iterate);
    add_edge(iterate);
    add_pair(iterate);
    iterate->add_option("-n", o.n, "iterate index")->required();

    auto* dissociate = app.add_subcommand("dissociate", "dissociate a non-leaf edge");
    add_instance(dissociate);
    add_edge(dissociate);

    auto* fine = app.add_subcommand("fine-dissociate", "fine dissociation of an edge");
    add_instance(fine);
    add_edge(fine);
    add_pair(fine);
    fine->add_option("--mid", o.mid, "covered non-unary fact F_m");

    auto* metrics = app.add_subcommand("metrics", "weight and side weight of an edge");
    add_instance(metrics);
    add_edge(metrics);

    auto* probe = app.add_subcommand("probe-iterability", "probe iterates 2..n-max");
    add_query(probe);
    add_instance(probe);
    add_edge(probe);
    add_pair(probe);
    probe->add_option("--n-max", o.n_max, "probe bound");
    add_budget(probe);

    auto* tight = app.add_subcommand("tight-pattern", "search a minimal tight pattern");
    add_query(tight);
    add_seeds(tight);
    add_budget(tight);

    auto* collapse = app.add_subcommand("collapse-stars", "collapse an instance without non-leaf edges");
    add_instance(collapse);

    auto* binary = app.add_subcommand("to-binary", "replace arity-1 relations R by R@2");
    binary->add_option("-i,--instance", o.instance, "mixed-arity instance");
    binary->add_option("-t,--tid", o.tid, "mixed-arity TID");
    binary->add_option("-q,--query", o.query, "mixed-arity query");

    auto* count_pp = app.add_subcommand("count-pp2dnf", "count good worlds of a bipartite graph");
    add_graph(count_pp, "H.json");
    auto* count_st = app.add_subcommand("count-stcon", "count connecting edge subsets of an st-graph");
    add_graph(count_st, "G.json");

    auto* code_pp = app.add_subcommand("code-pp2dnf", "code a bipartite graph as a TID");
    add_instance(code_pp);
    add_edge(code_pp);
    add_pair(code_pp);
    code_pp->add_option("-n", o.n, "iterate length")->required();
    add_graph(code_pp, "H.json");
    code_pp->add_option("-o,--out", o.out_prefix, "write PREFIX.tid and PREFIX.map.json");

    auto* code_st = app.add_subcommand("code-stcon", "code an st-graph as a TID");
    add_instance(code_st);
    add_edge(code_st);
    add_pair(code_st);
    code_st->add_option("--mid", o.mid, "covered non-unary fact F_m");
    add_graph(code_st, "G.json");
    code_st->add_option("-o,--out", o.out_prefix, "write PREFIX.tid and PREFIX.map.json");

    auto* verify_pp = app.add_subcommand("verify-pp2dnf", "check #good(H) = Pr(Q) * 2^(|A|+|B|)");
    add_query(verify_pp);
    add_instance(verify_pp);
    add_edge(verify_pp);
    add_pair(verify_pp);
    verify_pp->add_option("--n0", o.n0, "first failing iterate (default: probed)");
    verify_pp->add_option("--n-max", o.n_max, "probe bound when --n0 is absent");
    add_graph(verify_pp, "H.json");
    add_verify(verify_pp);
    add_budget(verify_pp);

    auto* verify_st = app.add_subcommand("verify-stcon", "check #good(G) = Pr(Q) * 2^|C|");
    add_query(verify_st);
    verify_st->add_option("-i,--instance", o.instance, "tight pattern instance (default: searched)");
    verify_st->add_option("--edge", o.edge, "tight edge u,v");
    add_pair(verify_st);
    verify_st->add_option("--mid", o.mid, "covered non-unary fact F_m");
    add_seeds(verify_st);
    add_graph(verify_st, "G.json");
    add_verify(verify_st);
    add_budget(verify_st);

    auto* classify = app.add_subcommand("classify", "find the applicable hardness route");
    add_query(classify);
    add_seeds(classify);
    add_budget(classify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        err << "\n" << app.help();
        return exit_usage;
    }

    auto seed_bounds = [&] {
        SeedBounds b;
        b.domain_bound = o.domain_bound;
        b.max_facts = o.max_facts;
        return b;
    };
    auto verify_options = [&] {
        VerifyOptions v;
        v.spot_checks = o.spot_checks;
        v.rng_seed = o.rng_seed;
        v.world_cap = o.max_worlds;
        v.budget = o.budget;
        return v;
    };

    try {
        if (eval->parsed()) {
            out << (eval_query(load_query(o.query), detail::load_instance(o.instance), o.budget) ? "true" : "false") << "\n";
            return exit_ok;
        }
        if (pqe->parsed()) {
            out << pqe_exact(load_query(o.query), parse_tid(read_file(o.tid)), o.max_worlds, o.budget) << "\n";
            return exit_ok;
        }
        if (hom->parsed()) {
            auto r = find_homomorphism(detail::load_instance(o.src), detail::load_instance(o.dst), o.budget);
            if (r.status == SearchStatus::budget_exhausted) {
                err << "budget exhausted after " << r.steps << " steps\n";
                return exit_usage;
            }
            Json j{{"found", r.found()}, {"steps", r.steps}};
            if (r.found()) j["mapping"] = detail::hom_json(r.mapping);
            out << j.dump(2) << "\n";
            return r.found() ? exit_ok : exit_failed;
        }
        if (iterate->parsed()) {
            auto inst = detail::load_instance(o.instance);
            auto e = detail::edge_of(o);
            out << iterate_edge(inst, e, detail::pair_of(o, inst, e), o.n);
            return exit_ok;
        }
        if (dissociate->parsed()) {
            out << dissociate_edge(detail::load_instance(o.instance), detail::edge_of(o));
            return exit_ok;
        }
        if (fine->parsed()) {
            auto inst = detail::load_instance(o.instance);
            auto e = detail::edge_of(o);
            out << fine_dissociate(inst, e, detail::pair_of(o, inst, e), detail::mid_of(o, inst, e));
            return exit_ok;
        }
        if (metrics->parsed()) {
            auto m = edge_metrics(detail::load_instance(o.instance), detail::edge_of(o));
            out << Json{{"weight", m.weight}, {"side_weight", m.side_weight}}.dump(2) << "\n";
            return exit_ok;
        }
        if (probe->parsed()) {
            auto q = load_query(o.query);
            auto inst = detail::load_instance(o.instance);
            auto e = detail::edge_of(o);
            auto p = detail::pair_of(o, inst, e);
            auto v = probe_iterability(q, inst, e, p, o.n_max, o.budget);
            Json j{{"verdict", v.non_iterable ? "non-iterable" : "iterable-up-to"}, {"n_max", v.n_max}};
            if (v.non_iterable) {
                j["n0"] = v.n0;
                j["failing_iterate"] = iterate_edge(inst, e, p, v.n0).str();
            }
            out << j.dump(2) << "\n";
            return exit_ok;
        }
        if (tight->parsed()) {
            auto q = load_query(o.query);
            auto seeds = detail::load_seeds(o);
            if (seeds.empty()) seeds = enumerate_minimal_models(q, seed_bounds(), o.budget);
            auto r = find_minimal_tight_pattern(q, seeds, o.budget);
            Json j{{"found", r.best.has_value()}, {"seeds", r.seeds}, {"candidates", r.candidates.size()}};
            if (r.best) {
                j["instance"] = r.best->instance.str();
                j["edge"] = r.best->edge.str();
                j["weight"] = r.best->metrics.weight;
                j["side_weight"] = r.best->metrics.side_weight;
                j["dissociation"] = dissociate_edge(r.best->instance, r.best->edge).str();
            }
            out << j.dump(2) << "\n";
            return r.best ? exit_ok : exit_failed;
        }
        if (collapse->parsed()) {
            auto r = collapse_stars(detail::load_instance(o.instance));
            out << "% " << r.size_bound_note << "\n";
            for (const auto& [a, b] : r.hom)
                if (a != b) out << "% " << a << " -> " << b << "\n";
            out << r.instance;
            return exit_ok;
        }
        if (binary->parsed()) {
            int given = !o.instance.empty() + !o.tid.empty() + !o.query.empty();
            if (given != 1) throw UsageError("to-binary takes exactly one of -i, -t, -q");
            if (!o.instance.empty()) out << unary_to_binary(detail::load_instance(o.instance, true));
            else if (!o.tid.empty()) out << unary_to_binary(parse_tid(read_file(o.tid), true)).str();
            else out << to_text(unary_to_binary(load_query(o.query, true)));
            return exit_ok;
        }
        if (count_pp->parsed()) {
            out << count_pp2dnf(detail::load_json(o.graph).get<BipartiteGraph>()) << "\n";
            return exit_ok;
        }
        if (count_st->parsed()) {
            out << count_stcon(detail::load_json(o.graph).get<StGraph>()) << "\n";
            return exit_ok;
        }
        if (code_pp->parsed() || code_st->parsed()) {
            auto inst = detail::load_instance(o.instance);
            auto e = detail::edge_of(o);
            auto p = detail::pair_of(o, inst, e);
            Coding c = code_pp->parsed()
                           ? code_pp2dnf(inst, e, p, o.n, detail::load_json(o.graph).get<BipartiteGraph>())
                           : code_stcon(inst, e, p, detail::mid_of(o, inst, e), detail::load_json(o.graph).get<StGraph>());
            if (o.out_prefix.empty()) {
                out << c.tid.str();
            } else {
                detail::write_file(o.out_prefix + ".tid", c.tid.str());
                detail::write_file(o.out_prefix + ".map.json", Json(c.worlds).dump(2) + "\n");
                out << o.out_prefix << ".tid\n" << o.out_prefix << ".map.json\n";
            }
            return exit_ok;
        }
        if (verify_pp->parsed()) {
            auto q = load_query(o.query);
            auto inst = detail::load_instance(o.instance);
            auto e = detail::edge_of(o);
            auto p = detail::pair_of(o, inst, e);
            int n0 = o.n0;
            if (n0 == 0) {
                auto v = probe_iterability(q, inst, e, p, o.n_max, o.budget);
                if (!v.non_iterable) {
                    out << Json{{"reduction", "pp2dnf"}, {"prerequisites_ok", false},
                                {"reason", v.str()}, {"equal", nullptr}, {"ok", false}}.dump(2) << "\n";
                    return exit_failed;
                }
                n0 = v.n0;
            }
            auto report = verify_pp2dnf(q, inst, e, p, n0, detail::load_json(o.graph).get<BipartiteGraph>(), verify_options());
            out << report.dump(2) << "\n";
            return report["ok"].get<bool>() ? exit_ok : exit_failed;
        }
        if (verify_st->parsed()) {
            auto q = load_query(o.query);
            auto g = detail::load_json(o.graph).get<StGraph>();
            std::optional<TightPattern> pattern;
            if (!o.instance.empty()) {
                auto inst = detail::load_instance(o.instance);
                auto e = detail::edge_of(o);
                pattern = TightPattern{inst, e, edge_metrics(inst, e)};
            } else {
                auto seeds = detail::load_seeds(o);
                if (seeds.empty()) seeds = enumerate_minimal_models(q, seed_bounds(), o.budget);
                pattern = find_minimal_tight_pattern(q, seeds, o.budget).best;
                if (!pattern) {
                    out << Json{{"reduction", "stcon"}, {"prerequisites_ok", false},
                                {"reason", "no tight pattern found"}, {"equal", nullptr}, {"ok", false}}.dump(2) << "\n";
                    return exit_failed;
                }
            }
            auto p = detail::pair_of(o, pattern->instance, pattern->edge);
            auto mid = detail::mid_of(o, pattern->instance, pattern->edge);
            auto report = verify_stcon(q, *pattern, p, mid, g, verify_options());
            report["pattern"] = pattern->instance.str();
            out << report.dump(2) << "\n";
            return report["ok"].get<bool>() ? exit_ok : exit_failed;
        }
        if (classify->parsed()) {
            auto q = load_query(o.query);
            PipelineBounds b;
            b.n_max = o.n_max;
            b.seeds = seed_bounds();
            b.budget = o.budget;
            auto c = hardness_pipeline(q, detail::load_seeds(o), b);
            out << c.json().dump(2) << "\n";
            return exit_ok;
        }
    } catch (const UsageError& ex) {
        err << "usage error: " << ex.what() << "\n";
        return exit_usage;
    } catch (const BudgetExhausted& ex) {
        err << "limit: " << ex.what() << "\n";
        return exit_usage;
    } catch (const WorldCapExceeded& ex) {
        err << "limit: " << ex.what() << "\n";
        return exit_usage;
    } catch (const CountCapExceeded& ex) {
        err << "limit: " << ex.what() << "\n";
        return exit_usage;
    } catch (const NotAModel& ex) {
        err << "error: " << ex.what() << "\n";
        return exit_failed;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}

}  // namespace tidg::cli
