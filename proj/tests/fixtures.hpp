#pragma once

#include <string>

#include "tidg/tidg.hpp"

namespace fixtures {

inline tidg::Instance inst(const char* text) { return tidg::parse_instance(text); }

inline std::string data(const std::string& name) { return std::string(TIDG_DATA_DIR) + "/" + name; }

// R(a,b), S(b,c), T(c,d): the R S* T model with a non-iterable middle edge.
inline tidg::Instance rst_path() { return inst("R(a,b). S(b,c). T(c,d)."); }
inline tidg::Instance rst_path_iterate2() { return inst("R(a,b). S(b,c2). S(b2,c2). S(b2,c). T(c,d)."); }

inline tidg::Instance incident_example() { return inst("R(a,b). T(b,b). S(c,b). R(d,c)."); }

inline tidg::Instance dissociation_input() {
    return inst("R(a,b). S(b,a). T(b,a). R(a,c). S(c,b). S(d,b). U(a,a). U(b,b).");
}
inline tidg::Instance dissociation_expected() {
    return inst(
        "R(a,b2). S(b2,a). T(b2,a). R(a2,b). S(b,a2). T(b,a2). R(a,c). S(c,b). S(d,b). U(a,a). U(a2,a2). U(b,b). "
        "U(b2,b2).");
}

// Two extra facts per side: l and l1 attached to u, r and r1 to v.
inline tidg::Instance fine_input() { return inst("L(l,u). K(l1,u). E(u,v). F(v,u). R(v,r). P(v,r1)."); }

inline tidg::Query rst() { return tidg::parse_rpq("R S* T"); }
inline tidg::Query rinv_st() { return tidg::parse_rpq("R- S* T"); }
inline tidg::Query chain() {
    return tidg::parse_datalog("u(X) :- r(X,Y). u(Y) :- u(X), s(X,Y). goal :- u(X), t(X,Y).");
}
inline tidg::Query zigzag() {
    return tidg::parse_datalog("a(Y) :- r(X,Y). b(Y) :- a(X), s(X,Y). a(Y) :- b(X), s(Y,X). goal :- b(X), t(X,Y).");
}
inline tidg::Query q0() { return tidg::parse_ucq("q :- r(W,X), s(X,Y), t(Y,Z)."); }
inline tidg::Query q0_prime() { return tidg::parse_ucq("q :- r(X,X), s(X,Y), t(Y,Y)."); }
inline tidg::Query q1() { return tidg::parse_ucq("q :- r(W,X), s(X,Y).\nq :- s(X,Y), t(Y,Z)."); }

inline tidg::BipartiteGraph houses_h() {
    return {{"α", "β", "γ"},
            {"α'", "β'", "γ'"},
            {{"α", "α'"}, {"β", "α'"}, {"β", "β'"}, {"γ", "β'"}, {"γ", "γ'"}, {"γ", "α'"}}};
}

inline tidg::StGraph network_g() {
    return {{"s", "a", "b", "c", "d", "t"},
            {{"s", "a"}, {"s", "b"}, {"a", "b"}, {"a", "c"}, {"b", "c"}, {"c", "d"}, {"d", "t"}, {"c", "t"}, {"b", "t"}},
            "s",
            "t"};
}

}  // namespace fixtures
