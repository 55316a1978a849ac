// Runs the classification on a few queries and prints the chosen route.
#include <iostream>

#include "tidg/tidg.hpp"

int main() {
    using namespace tidg;
    std::vector<std::pair<std::string, Query>> queries{
        {"R S* T", parse_rpq("R S* T")},
        {"zig-zag", parse_datalog("a(Y) :- r(X,Y). b(Y) :- a(X), s(X,Y). a(Y) :- b(X), s(Y,X). goal :- b(X), t(X,Y).")},
        {"R(x,x) S(x,y) T(y,y)", parse_ucq("q :- r(X,X), s(X,Y), t(Y,Y).")},
    };
    for (const auto& [name, q] : queries) std::cout << name << ": " << hardness_pipeline(q, {}).json().dump() << "\n";
}
