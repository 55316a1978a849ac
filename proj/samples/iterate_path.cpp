// Iterates the middle edge of R(a,b), S(b,c), T(c,d) and evaluates R S* T on
// each iterate: only the first one satisfies the query.
#include <iostream>

#include "tidg/tidg.hpp"

int main() {
    using namespace tidg;
    Instance path = parse_instance("R(a,b). S(b,c). T(c,d).");
    Query q = parse_rpq("R S* T");
    DirectedEdge e{"b", "c"};
    IncidentPair pair = incident_pairs(path, e).front();

    for (int n = 1; n <= 3; ++n) {
        Instance it = iterate_edge(path, e, pair, n);
        std::cout << "n = " << n << ": " << (eval_query(q, it) ? "satisfies" : "violates") << "\n" << it;
    }

    // The coding of a single edge a-b: one good world out of four.
    BipartiteGraph h{{"a"}, {"b"}, {{"a", "b"}}};
    Coding c = code_pp2dnf(path, e, pair, 1, h);
    std::cout << "Pr = " << pqe_exact(q, c.tid) << ", #good = " << count_pp2dnf(h) << "\n";
}
