#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "doobdec/measures.hpp"

namespace doobdec {

// Family of k measures on [0,1) with P_i([a,b)) = b^i - a^i (densities
// i * x^(i-1); the first measure is Lebesgue). Level-1 atoms are the
// intervals between consecutive partition points, the last one running to 1
// (the infinitely many remaining atoms of the idealized partition are lumped
// into that tail); deeper levels halve each interval at its midpoint.
struct PowerDensitySpec {
    int k = 2;
    std::vector<double> points;  // increasing, in [0,1), points[0] == 0
    int depth = 2;               // tree depth; level n has #points * 2^(n-1) atoms
};

struct PowerDensityInstance {
    std::shared_ptr<const FiltrationTree> tree;
    MeasureFamily family;
    // [left, right) per leaf, in leaf order.
    std::vector<std::pair<double, double>> leaf_intervals;
    // Mass of the covered region per measure before rescaling; with the tail
    // atom the cover is all of [0,1) and these are exactly 1.
    std::vector<double> cover_mass;
    std::vector<double> renormalization;  // 1/cover_mass
};

// Throws ValueError on: k < 1, fewer than one point, points[0] != 0,
// non-increasing points, any point outside [0,1), depth < 1, or a partition
// so unbalanced that a leaf probability underflows the positivity tolerance.
PowerDensityInstance build_power_density(const PowerDensitySpec& spec);

}  // namespace doobdec
