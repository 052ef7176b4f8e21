#include "doobdec/processes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "doobdec/conditional.hpp"
#include "doobdec/rng.hpp"

namespace doobdec {

void require_adapted(const FiltrationTree& tree, const AdaptedProcess& f) {
    if (f.depth() != tree.depth())
        throw StructureError("process has " + std::to_string(f.slices.size()) +
                             " slices, tree depth is " + std::to_string(tree.depth()));
    for (int n = 0; n <= tree.depth(); ++n)
        if (static_cast<int>(f.slices[n].size()) != tree.atom_count(n))
            throw StructureError("slice " + std::to_string(n) + " has " +
                                 std::to_string(f.slices[n].size()) + " values, level has " +
                                 std::to_string(tree.atom_count(n)) + " atoms");
}

std::vector<double> lift_to_leaves(const FiltrationTree& tree,
                                   const std::vector<double>& level_values, int n) {
    if (static_cast<int>(level_values.size()) != tree.atom_count(n))
        throw StructureError("level " + std::to_string(n) + " has " +
                             std::to_string(tree.atom_count(n)) + " atoms, got " +
                             std::to_string(level_values.size()) + " values");
    std::vector<double> out(tree.leaf_count(), 0.0);
    for (int s = 0; s < tree.atom_count(n); ++s)
        for (int e : tree.leaves_under(n, s)) out[e] = level_values[s];
    return out;
}

ClassifyResult classify(const MeasureFamily& family, const AdaptedProcess& f,
                        double tol) {
    const auto& tree = family.tree();
    require_adapted(tree, f);
    const int N = tree.depth();
    const int k = family.size();

    bool martingale = true;
    for (int m = 1; m <= N; ++m)
        for (int s = 0; s < tree.atom_count(m - 1); ++s)
            for (int i = 0; i < k; ++i) {
                // one-step conditional expectation over the children of s
                double lhs = 0.0;
                for (int c : tree.children(m - 1, s))
                    lhs += family.child_prob(i, m - 1, s, c) * f.at(m, c);
                const double rhs = f.at(m - 1, s);
                if (lhs > rhs + tol)
                    return {ProcessClass::neither, ClassifyWitness{i, m, s, lhs, rhs}};
                if (std::abs(lhs - rhs) > tol) martingale = false;
            }
    return {martingale ? ProcessClass::martingale : ProcessClass::supermartingale,
            std::nullopt};
}

AdaptedProcess stop(const FiltrationTree& tree, const AdaptedProcess& f, int k) {
    require_adapted(tree, f);
    if (k < 0 || k > tree.depth())
        throw StructureError("stopping level " + std::to_string(k) + " out of range");
    AdaptedProcess out = f;
    for (int m = k + 1; m <= tree.depth(); ++m)
        for (int j = 0; j < tree.atom_count(m); ++j) {
            // walk up to the level-k ancestor
            int level = m, idx = j;
            while (level > k) {
                idx = tree.parent(level, idx);
                --level;
            }
            out.slices[m][j] = f.at(k, idx);
        }
    return out;
}

Theorem1Report theorem1_bound_check(const MeasureFamily& family,
                                    const AdaptedProcess& f, int m0,
                                    const std::vector<double>& phi,
                                    int trials, std::uint64_t seed, double tol) {
    const auto& tree = family.tree();
    require_adapted(tree, f);
    if (m0 < 1 || m0 > tree.depth())
        throw StructureError("step " + std::to_string(m0) + " out of range");
    if (static_cast<int>(phi.size()) != tree.atom_count(m0 - 1))
        throw StructureError("phi must live on level " + std::to_string(m0 - 1));

    Theorem1Report rep;
    rep.trials = trials;
    const auto bounds = equivalence_bounds(family);
    rep.factor = bounds.theorem1_factor;

    // Hypothesis: family supermartingale, and the first measure's one-step
    // deficit at m0 dominates phi.
    const auto cls = classify(family, f, tol);
    rep.hypothesis_ok = cls.cls != ProcessClass::neither;
    rep.hypothesis_witness = cls.witness;
    if (rep.hypothesis_ok)
        for (int s = 0; s < tree.atom_count(m0 - 1); ++s) {
            if (phi[s] < -tol) rep.hypothesis_ok = false;
            double lhs = 0.0;
            for (int c : tree.children(m0 - 1, s))
                lhs += family.child_prob(0, m0 - 1, s, c) * f.at(m0, c);
            if (f.at(m0 - 1, s) - lhs < phi[s] - tol) rep.hypothesis_ok = false;
        }
    if (!rep.hypothesis_ok) return rep;

    // Sample Q = (1-alpha) P_1 + alpha R with R any mixture and alpha <= eps0;
    // every such Q keeps the one-step deficit above factor * phi.
    Rng rng(seed);
    const int k = family.size();
    rep.bound_ok = true;
    rep.min_margin = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        const double alpha = rng.uniform(0.0, bounds.eps0);
        const auto r_weights = rng.simplex(k);
        std::vector<double> w(k, 0.0);
        w[0] = 1.0 - alpha;
        for (int i = 0; i < k; ++i) w[i] += alpha * r_weights[i];
        const Measure q = mixture(family, w);

        const auto xi = f.slices[m0];  // level-m0 values as a random variable
        for (int s = 0; s < tree.atom_count(m0 - 1); ++s) {
            double mass = 0.0, acc = 0.0;
            for (int c : tree.children(m0 - 1, s)) {
                const double pc = q.atom_prob(m0, c);
                mass += pc;
                acc += pc * xi[c];
            }
            const double deficit = f.at(m0 - 1, s) - acc / mass;
            const double margin = deficit - rep.factor * phi[s];
            rep.min_margin = std::min(rep.min_margin, margin);
            if (margin < -tol) rep.bound_ok = false;
        }
    }
    return rep;
}

}  // namespace doobdec
