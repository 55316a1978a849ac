#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace tidg;
using fixtures::inst;

TEST(Homomorphism, SubsetGivesIdentity) {
    auto src = inst("R(a,b). S(b,c).");
    auto dst = inst("R(a,b). S(b,c). T(c,d).");
    auto r = find_homomorphism(src, dst);
    ASSERT_TRUE(r.found());
    EXPECT_TRUE(is_homomorphism(r.mapping, src, dst));
    EXPECT_TRUE(is_homomorphism(identity_map(src), src, dst));
}

TEST(Homomorphism, RelationMismatch) {
    auto r = find_homomorphism(inst("R(a,b)."), inst("S(a,b)."));
    EXPECT_EQ(r.status, SearchStatus::none);
}

TEST(Homomorphism, LongerIterateFoldsOntoShorter) {
    auto i = fixtures::rst_path();
    DirectedEdge e{"b", "c"};
    auto pair = incident_pairs(i, e).front();
    auto i3 = iterate_edge(i, e, pair, 3);
    auto i2 = iterate_edge(i, e, pair, 2);
    auto r = find_homomorphism(i3, i2);
    ASSERT_TRUE(r.found());
    EXPECT_TRUE(is_homomorphism(r.mapping, i3, i2));
    // The map is onto the smaller domain: two copies of u and v are merged.
    std::set<Constant> img;
    for (const auto& [x, y] : r.mapping) img.insert(y);
    EXPECT_EQ(img.size(), i2.domain().size());
}

TEST(Homomorphism, EmptySource) {
    EXPECT_TRUE(find_homomorphism(Instance{}, inst("R(a,b).")).found());
    EXPECT_TRUE(find_homomorphism(Instance{}, Instance{}).found());
    EXPECT_FALSE(find_homomorphism(inst("R(a,b)."), Instance{}).found());
}

TEST(Homomorphism, MonadicFactsOnlyMatchMonadic) {
    auto a = parse_instance("A(x).", true);
    auto b = parse_instance("A(y,y).", false);
    EXPECT_FALSE(find_homomorphism(a, b).found());
    EXPECT_TRUE(find_homomorphism(a, parse_instance("A(y). R(y,z).", true)).found());
}

TEST(Homomorphism, BudgetExhaustionIsDistinct) {
    // A 5-clique of S-facts into a 4-clique needs a full search to refute.
    std::vector<Fact> k5, k4;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            if (i != j) k5.emplace_back("S", "x" + std::to_string(i), "x" + std::to_string(j));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j) k4.emplace_back("S", "y" + std::to_string(i), "y" + std::to_string(j));
    auto tight = find_homomorphism(Instance(k5), Instance(k4), 3);
    EXPECT_EQ(tight.status, SearchStatus::budget_exhausted);
    EXPECT_FALSE(tight.found());
    auto full = find_homomorphism(Instance(k5), Instance(k4));
    EXPECT_EQ(full.status, SearchStatus::none);
    EXPECT_THROW(is_isomorphic(Instance(k4), Instance(k4), 1), BudgetExhausted);
}

TEST(Homomorphism, AgreesWithBruteForce) {
    std::mt19937_64 rng(17);
    int positives = 0;
    for (int k = 0; k < 1500; ++k) {
        auto a = oracle::random_instance(rng, 4, 4, {"R", "S"});
        auto b = oracle::random_instance(rng, 6, 5, {"R", "S"});
        auto r = find_homomorphism(a, b);
        ASSERT_NE(r.status, SearchStatus::budget_exhausted);
        bool expected = oracle::hom_exists(a, b);
        ASSERT_EQ(r.found(), expected) << a.str() << " -> " << b.str();
        if (r.found()) {
            ++positives;
            EXPECT_TRUE(is_homomorphism(r.mapping, a, b));
        }
    }
    EXPECT_GT(positives, 100);
}

TEST(Homomorphism, ClosedUnderComposition) {
    std::mt19937_64 rng(19);
    int composed = 0;
    for (int k = 0; k < 2000 && composed < 100; ++k) {
        auto a = oracle::random_instance(rng, 3, 3, {"R", "S"});
        auto b = oracle::random_instance(rng, 5, 4, {"R", "S"});
        auto c = oracle::random_instance(rng, 6, 4, {"R", "S"});
        auto h = find_homomorphism(a, b);
        auto g = find_homomorphism(b, c);
        if (!h.found() || !g.found()) continue;
        ++composed;
        EXPECT_TRUE(is_homomorphism(compose(h.mapping, g.mapping), a, c));
    }
    EXPECT_GT(composed, 10);
}

TEST(Isomorphism, AgreesWithBruteForce) {
    std::mt19937_64 rng(23);
    for (int k = 0; k < 400; ++k) {
        auto a = oracle::random_instance(rng, 4, 4, {"R", "S"});
        // Rename a to get guaranteed isomorphic partners half of the time.
        Instance b;
        if (k % 2) {
            std::map<Constant, Constant> ren;
            auto dom = a.domain();
            std::vector<Constant> names;
            for (std::size_t i = 0; i < dom.size(); ++i) names.push_back("z" + std::to_string(i));
            std::shuffle(names.begin(), names.end(), rng);
            for (std::size_t i = 0; i < dom.size(); ++i) ren[dom[i]] = names[i];
            b = image(ren, a);
        } else {
            b = oracle::random_instance(rng, 4, 4, {"R", "S"});
        }
        EXPECT_EQ(is_isomorphic(a, b), oracle::isomorphic(a, b)) << a.str() << " vs " << b.str();
    }
}
