#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "doobdec/power_density.hpp"
#include "support/testutil.hpp"

using namespace doobdec;
using testutil::close;

TEST_CASE("half-split instance reproduces the analytic atom masses") {
    PowerDensitySpec spec;
    spec.k = 2;
    spec.points = {0.0, 0.5};
    spec.depth = 2;
    auto inst = build_power_density(spec);

    CHECK(inst.tree->depth() == 2);
    CHECK(inst.tree->atom_count(1) == 2);
    CHECK(inst.tree->leaf_count() == 4);

    REQUIRE(inst.leaf_intervals.size() == 4);
    CHECK(close(inst.leaf_intervals[2].first, 0.5));
    CHECK(close(inst.leaf_intervals[2].second, 0.75));
    CHECK(close(inst.leaf_intervals[3].second, 1.0));

    // P_2([0, 1/2)) = 1/4 at level 1; P_2([1/2, 3/4)) = 9/16 - 4/16
    CHECK(close(inst.family.atom_prob(1, 1, 0), 0.25));
    CHECK(close(inst.family.atom_prob(1, 2, 2), 0.3125));

    // the tail makes the cover all of [0,1): no renormalization in effect
    for (double m : inst.cover_mass) CHECK(close(m, 1.0));
    for (double r : inst.renormalization) CHECK(close(r, 1.0));
}

TEST_CASE("first measure is Lebesgue: interval lengths") {
    PowerDensitySpec spec;
    spec.k = 1;
    spec.points = {0.0, 0.25, 0.5, 0.75};
    spec.depth = 1;
    auto inst = build_power_density(spec);
    for (int j = 0; j < 4; ++j) CHECK(close(inst.family.leaf_prob(0, j), 0.25));
}

TEST_CASE("cubic exponent on the first half-interval") {
    PowerDensitySpec spec;
    spec.k = 3;
    spec.points = {0.0, 0.5};
    spec.depth = 1;
    auto inst = build_power_density(spec);
    CHECK(close(inst.family.leaf_prob(2, 0), 0.125));  // (1/2)^3
    CHECK(close(inst.family.leaf_prob(2, 1), 0.875));
}

TEST_CASE("interval endpoints tile [0,1) at every depth") {
    PowerDensitySpec spec;
    spec.k = 2;
    spec.points = {0.0, 0.3, 0.8};
    spec.depth = 3;
    auto inst = build_power_density(spec);
    REQUIRE(static_cast<int>(inst.leaf_intervals.size()) == inst.tree->leaf_count());
    CHECK(close(inst.leaf_intervals.front().first, 0.0));
    CHECK(close(inst.leaf_intervals.back().second, 1.0));
    for (std::size_t j = 1; j < inst.leaf_intervals.size(); ++j)
        CHECK(close(inst.leaf_intervals[j].first, inst.leaf_intervals[j - 1].second));

    // probabilities stay consistent with the closed-form atom masses
    for (int i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < inst.leaf_intervals.size(); ++j) {
            const auto [a, b] = inst.leaf_intervals[j];
            const double want = std::pow(b, i + 1) - std::pow(a, i + 1);
            CHECK(close(inst.family.leaf_prob(i, static_cast<int>(j)), want));
        }
}

TEST_CASE("equivalence bounds exist and the transition report is well-formed") {
    PowerDensitySpec spec;
    spec.k = 2;
    spec.points = {0.0, 0.25, 0.5, 0.75};
    spec.depth = 2;
    auto inst = build_power_density(spec);
    auto b = equivalence_bounds(inst.family);
    CHECK(b.l > 0.0);
    CHECK(b.l <= 1.0);
    CHECK(b.L >= 1.0);
    CHECK(close(b.l * b.L, 1.0));

    // midpoint halving shifts mass toward the right half under x^2, so the
    // literal dominating-transition condition fails here; the report carries
    // the violating triples rather than throwing
    auto rep = check_condition_b(inst.family);
    CHECK(rep.candidates.size() == 2);
    CHECK(!rep.pass());
    for (const auto& cand : rep.candidates) CHECK(!cand.violations.empty());
}

TEST_CASE("invalid partitions are rejected") {
    PowerDensitySpec spec;
    spec.k = 2;
    spec.depth = 2;
    spec.points = {};
    CHECK_THROWS_AS(build_power_density(spec), ValueError);
    spec.points = {0.1, 0.5};
    CHECK_THROWS_AS(build_power_density(spec), ValueError);
    spec.points = {0.0, 0.5, 0.5};
    CHECK_THROWS_AS(build_power_density(spec), ValueError);
    spec.points = {0.0, 1.0};
    CHECK_THROWS_AS(build_power_density(spec), ValueError);
    spec.points = {0.0, 0.5};
    spec.depth = 0;
    CHECK_THROWS_AS(build_power_density(spec), ValueError);
    spec.depth = 2;
    spec.k = 0;
    CHECK_THROWS_AS(build_power_density(spec), ValueError);
}
