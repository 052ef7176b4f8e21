#include "doobdec/conditional.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace doobdec {

namespace {

bool close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

void require_leaf_values(const FiltrationTree& tree, const std::vector<double>& xi) {
    if (static_cast<int>(xi.size()) != tree.leaf_count())
        throw StructureError("random variable has " + std::to_string(xi.size()) +
                             " values, tree has " + std::to_string(tree.leaf_count()) +
                             " leaves");
}

}  // namespace

std::vector<double> cond_exp(const Measure& P, const std::vector<double>& xi, int n) {
    require_leaf_values(*P.tree, xi);
    const int atoms = P.tree->atom_count(n);
    std::vector<double> out(atoms, 0.0);
    for (int s = 0; s < atoms; ++s) {
        double mass = 0.0, acc = 0.0;
        for (int e : P.tree->leaves_under(n, s)) {
            mass += P.leaf_probs[e];
            acc += P.leaf_probs[e] * xi[e];
        }
        if (!(mass > 0.0))
            throw ValueError("conditioning atom " + to_string({n, s}) + " has zero mass");
        out[s] = acc / mass;
    }
    return out;
}

std::vector<double> cond_exp_mixture(const MeasureFamily& family,
                                     const std::vector<double>& weights,
                                     const std::vector<double>& xi, int n) {
    const Measure q = mixture(family, weights);
    std::vector<double> direct = cond_exp(q, xi, n);

    // Independent route through the normalized conditional densities against
    // the first measure: on each atom A,
    //   E^Q{xi|A} = sum_i w_i (P_i(A)/P_1(A)) E^{P_i}{xi|A} / sum_i w_i (P_i(A)/P_1(A)).
    const int k = family.size();
    const int atoms = family.tree().atom_count(n);
    std::vector<std::vector<double>> vertex_ce(k);
    std::vector<std::vector<double>> dens(k);
    for (int i = 0; i < k; ++i) {
        vertex_ce[i] = cond_exp(family.vertex(i), xi, n);
        dens[i] = rn_conditional(family, i, 0, n);
    }
    for (int s = 0; s < atoms; ++s) {
        double num = 0.0, den = 0.0;
        for (int i = 0; i < k; ++i) {
            num += weights[i] * dens[i][s] * vertex_ce[i][s];
            den += weights[i] * dens[i][s];
        }
        const double via_formula = num / den;
        if (!close(direct[s], via_formula, 1e-12))
            throw ValueError("mixture conditional expectation self-check failed on atom " +
                             to_string({n, s}) + ": direct " + std::to_string(direct[s]) +
                             " vs formula " + std::to_string(via_formula));
    }
    return direct;
}

std::vector<double> sup_cond_exp(const MeasureFamily& family,
                                 const std::vector<double>& xi, int n) {
    const int k = family.size();
    std::vector<double> out = cond_exp(family.vertex(0), xi, n);
    for (int i = 1; i < k; ++i) {
        const auto vi = cond_exp(family.vertex(i), xi, n);
        for (std::size_t s = 0; s < out.size(); ++s) out[s] = std::max(out[s], vi[s]);
    }
    return out;
}

std::vector<double> measure_change_kernel(const MeasureFamily& family,
                                          int i, int l, int n) {
    const auto& tree = family.tree();
    const int leaves = tree.leaf_count();
    // dP_i/dP_l on leaves, divided by its conditional expectation at level n
    // (the level-n density ratio, lifted).
    const auto level_ratio = rn_conditional(family, i, l, n);
    std::vector<double> out(leaves);
    for (int s = 0; s < tree.atom_count(n); ++s)
        for (int e : tree.leaves_under(n, s)) {
            const double leaf_ratio = family.leaf_prob(i, e) / family.leaf_prob(l, e);
            out[e] = leaf_ratio / level_ratio[s];
        }
    return out;
}

}  // namespace doobdec
