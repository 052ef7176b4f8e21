#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "doobdec/conditional.hpp"
#include "doobdec/rng.hpp"
#include "support/testutil.hpp"

using namespace doobdec;
using testutil::close;

TEST_CASE("conditional expectation matches the leaf-sum oracle") {
    testutil::D1 d;
    std::vector<double> f2 = {0.8, 1.0, 0.9, 1.0};

    auto e1 = cond_exp(d.family.vertex(0), f2, 1);
    CHECK(close(e1[0], 0.9));
    CHECK(close(e1[1], 0.95));

    auto e2 = cond_exp(d.family.vertex(1), f2, 1);
    CHECK(close(e2[0], 0.88));
    CHECK(close(e2[1], 0.94));

    // worked indicator example: xi = chi_{C1} under the tilted measure
    auto ind = cond_exp(d.family.vertex(1), {1, 0, 0, 0}, 1);
    CHECK(close(ind[0], 0.6));
    CHECK(close(ind[1], 0.0));

    Rng rng(11);
    for (int t = 0; t < 25; ++t) {
        std::vector<double> xi(4);
        for (auto& x : xi) x = rng.uniform(-1.0, 1.0);
        for (int i = 0; i < 2; ++i)
            for (int n = 0; n <= 2; ++n) {
                auto got = cond_exp(d.family.vertex(i), xi, n);
                auto want = testutil::oracle_cond_exp(d.family.tree(),
                                                      d.family.leaf_row(i), xi, n);
                REQUIRE(got.size() == want.size());
                for (std::size_t s = 0; s < got.size(); ++s) CHECK(close(got[s], want[s]));
            }
    }
}

TEST_CASE("constants are fixed points at every level") {
    testutil::D1 d;
    for (int n = 0; n <= 2; ++n) {
        auto e = cond_exp(d.family.vertex(1), {3.5, 3.5, 3.5, 3.5}, n);
        for (double v : e) CHECK(close(v, 3.5));
    }
}

TEST_CASE("conditioning on the finest level returns the variable itself") {
    testutil::D1 d;
    std::vector<double> xi = {0.1, -2.0, 3.0, 0.7};
    auto e = cond_exp(d.family.vertex(0), xi, 2);
    for (int j = 0; j < 4; ++j) CHECK(close(e[j], xi[j]));
}

TEST_CASE("mixture expectation agrees with the mixed measure and the density formula") {
    testutil::D1 d;
    auto e0 = cond_exp_mixture(d.family, {0.5, 0.5}, {1, 0, 0, 0}, 0);
    REQUIRE(e0.size() == 1);
    CHECK(close(e0[0], 0.275));

    // vertex weights collapse to the vertex measure
    std::vector<double> xi = {0.8, 1.0, 0.9, 1.0};
    auto ev = cond_exp_mixture(d.family, {0.0, 1.0}, xi, 1);
    CHECK(close(ev[0], 0.88));
    CHECK(close(ev[1], 0.94));

    // random mixtures against a direct mixed-leaf-row computation
    Rng rng(7);
    for (int t = 0; t < 25; ++t) {
        auto w = rng.simplex(2);
        std::vector<double> eta(4);
        for (auto& x : eta) x = rng.uniform(-2.0, 2.0);
        for (int n = 0; n <= 2; ++n) {
            auto got = cond_exp_mixture(d.family, w, eta, n);
            auto q = mixture(d.family, w);
            auto want = testutil::oracle_cond_exp(d.family.tree(), q.leaf_probs, eta, n);
            for (std::size_t s = 0; s < got.size(); ++s) CHECK(close(got[s], want[s]));
        }
    }
}

TEST_CASE("family sup is the atomwise vertex max") {
    testutil::D1 d;
    auto s0 = sup_cond_exp(d.family, {1, 0, 0, 0}, 0);
    CHECK(close(s0[0], 0.3));
    auto s1 = sup_cond_exp(d.family, {1, 0, 0, 0}, 1);
    CHECK(close(s1[0], 0.6));
    CHECK(close(s1[1], 0.0));

    // dominates every sampled mixture, with equality at some vertex
    Rng rng(23);
    std::vector<double> xi = {0.4, 1.7, 0.0, 0.9};
    for (int n = 0; n <= 2; ++n) {
        auto sup = sup_cond_exp(d.family, xi, n);
        for (int t = 0; t < 50; ++t) {
            auto em = cond_exp_mixture(d.family, rng.simplex(2), xi, n);
            for (std::size_t s = 0; s < sup.size(); ++s)
                CHECK(em[s] <= sup[s] + 1e-12);
        }
        for (std::size_t s = 0; s < sup.size(); ++s) {
            double best = -1e300;
            for (int i = 0; i < 2; ++i)
                best = std::max(best, cond_exp(d.family.vertex(i), xi, n)[s]);
            CHECK(close(sup[s], best));
        }
    }
}

TEST_CASE("measure-change kernel carries expectations across measures") {
    testutil::D1 d;
    auto phi = measure_change_kernel(d.family, 1, 0, 1);
    CHECK(close(phi[0], 1.2));
    CHECK(close(phi[1], 0.8));
    CHECK(close(phi[2], 1.2));
    CHECK(close(phi[3], 0.8));

    // identity density when target == base, and at the finest level
    auto same = measure_change_kernel(d.family, 0, 0, 1);
    for (double v : same) CHECK(close(v, 1.0));
    auto fine = measure_change_kernel(d.family, 1, 0, 2);
    for (double v : fine) CHECK(close(v, 1.0));

    // E^{P_l}{phi | F_n} = 1 atomwise, and the change-of-measure identity
    Rng rng(99);
    for (int i = 0; i < 2; ++i)
        for (int l = 0; l < 2; ++l)
            for (int n = 0; n <= 2; ++n) {
                auto ker = measure_change_kernel(d.family, i, l, n);
                auto unit = cond_exp(d.family.vertex(l), ker, n);
                for (double v : unit) CHECK(close(v, 1.0));

                std::vector<double> eta(4);
                for (auto& x : eta) x = rng.uniform(-1.0, 1.0);
                std::vector<double> prod(4);
                for (int e = 0; e < 4; ++e) prod[e] = eta[e] * ker[e];
                auto lhs = cond_exp(d.family.vertex(i), eta, n);
                auto rhs = cond_exp(d.family.vertex(l), prod, n);
                for (std::size_t s = 0; s < lhs.size(); ++s) CHECK(close(lhs[s], rhs[s]));
            }
}

TEST_CASE("mixture self-check rejects mismatched route lengths upstream") {
    testutil::D1 d;
    CHECK_THROWS_AS(cond_exp_mixture(d.family, {0.5, 0.5}, {1.0, 2.0}, 1), StructureError);
}
