#include "doobdec/power_density.hpp"

#include <cmath>
#include <string>

namespace doobdec {

PowerDensityInstance build_power_density(const PowerDensitySpec& spec) {
    if (spec.k < 1) throw ValueError("need at least one measure");
    if (spec.points.empty()) throw ValueError("need at least one partition point");
    if (spec.points[0] != 0.0)
        throw ValueError("partition must start at 0, got " + std::to_string(spec.points[0]));
    for (std::size_t s = 0; s < spec.points.size(); ++s) {
        if (spec.points[s] < 0.0 || spec.points[s] >= 1.0)
            throw ValueError("partition point " + std::to_string(spec.points[s]) +
                             " outside [0,1)");
        if (s > 0 && spec.points[s] <= spec.points[s - 1])
            throw ValueError("partition points must increase strictly");
    }
    if (spec.depth < 1) throw ValueError("depth must be >= 1");

    // Level 1: the intervals between consecutive points, the last running to
    // 1 so the idealized partition's remaining atoms are lumped into a tail.
    // Deeper levels halve every interval at its midpoint.
    const int S = static_cast<int>(spec.points.size());
    std::vector<std::pair<double, double>> intervals;
    for (int s = 0; s < S; ++s) {
        const double right = (s + 1 < S) ? spec.points[s + 1] : 1.0;
        intervals.emplace_back(spec.points[s], right);
    }
    for (int n = 2; n <= spec.depth; ++n) {
        std::vector<std::pair<double, double>> finer;
        finer.reserve(intervals.size() * 2);
        for (const auto& [a, b] : intervals) {
            const double mid = 0.5 * (a + b);
            finer.emplace_back(a, mid);
            finer.emplace_back(mid, b);
        }
        intervals = std::move(finer);
    }

    std::vector<int> branching(spec.depth, 2);
    branching[0] = S;
    auto tree = std::make_shared<const FiltrationTree>(FiltrationTree::build(branching));

    // P_i([a,b)) = b^i - a^i, the measure with density i x^(i-1); i = 1 is
    // Lebesgue. With the tail atom the cover is [0,1) and each measure has
    // full mass; the renormalization constants are recorded anyway.
    std::vector<std::vector<double>> rows(spec.k);
    std::vector<double> cover_mass, renorm;
    for (int i = 1; i <= spec.k; ++i) {
        auto& row = rows[i - 1];
        row.reserve(intervals.size());
        double mass = 0.0;
        for (const auto& [a, b] : intervals) {
            const double p = std::pow(b, i) - std::pow(a, i);
            if (!(p > 0.0))
                throw ValueError("leaf [" + std::to_string(a) + "," + std::to_string(b) +
                                 ") has nonpositive mass under exponent " + std::to_string(i) +
                                 "; partition too unbalanced");
            row.push_back(p);
            mass += p;
        }
        cover_mass.push_back(mass);
        renorm.push_back(1.0 / mass);
        for (double& p : row) p /= mass;
    }
    return PowerDensityInstance{tree, MeasureFamily::create(tree, std::move(rows)),
                                std::move(intervals), std::move(cover_mass),
                                std::move(renorm)};
}

}  // namespace doobdec
