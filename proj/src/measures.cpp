#include "doobdec/measures.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace doobdec {

double Measure::atom_prob(int level, int index) const {
    const auto& leaves = tree->leaves_under(level, index);
    double p = 0.0;
    for (int e : leaves) p += leaf_probs.at(e);
    return p;
}

MeasureFamily MeasureFamily::create(std::shared_ptr<const FiltrationTree> tree,
                                    std::vector<std::vector<double>> rows,
                                    double tol) {
    if (!tree) throw StructureError("measure family needs a tree");
    if (rows.empty()) throw ValueError("measure family needs at least one measure");
    const int leaves = tree->leaf_count();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (static_cast<int>(rows[i].size()) != leaves)
            throw StructureError("measure " + std::to_string(i) + " has " +
                                 std::to_string(rows[i].size()) + " leaf probabilities, tree has " +
                                 std::to_string(leaves) + " leaves");
        double sum = 0.0;
        for (int e = 0; e < leaves; ++e) {
            const double p = rows[i][e];
            if (!(p > 0.0) || !std::isfinite(p))
                throw ValueError("measure " + std::to_string(i) + " is not strictly positive at leaf " +
                                 std::to_string(e) + " (p=" + std::to_string(p) +
                                 "); equivalence requires joint positivity");
            sum += p;
        }
        if (std::abs(sum - 1.0) > tol)
            throw ValueError("measure " + std::to_string(i) + " sums to " +
                             std::to_string(sum) + ", expected 1 within " + std::to_string(tol));
    }

    MeasureFamily fam;
    fam.tree_ = std::move(tree);
    fam.rows_ = std::move(rows);
    const int N = fam.tree_->depth();
    const int k = static_cast<int>(fam.rows_.size());
    fam.atom_probs_.resize(N + 1);
    for (int n = 0; n <= N; ++n) {
        fam.atom_probs_[n].assign(k, std::vector<double>(fam.tree_->atom_count(n), 0.0));
        for (int i = 0; i < k; ++i)
            for (int s = 0; s < fam.tree_->atom_count(n); ++s) {
                double p = 0.0;
                for (int e : fam.tree_->leaves_under(n, s)) p += fam.rows_[i][e];
                fam.atom_probs_[n][i][s] = p;
            }
    }
    return fam;
}

double MeasureFamily::atom_prob(int measure, int level, int index) const {
    return atom_probs_.at(level).at(measure).at(index);
}

double MeasureFamily::child_prob(int measure, int parent_level, int parent_index,
                                 int child_index) const {
    return atom_prob(measure, parent_level + 1, child_index) /
           atom_prob(measure, parent_level, parent_index);
}

Measure MeasureFamily::vertex(int measure) const {
    return Measure{tree_, rows_.at(measure)};
}

EquivalenceBounds equivalence_bounds(const MeasureFamily& family) {
    EquivalenceBounds b;
    b.l = 1.0;
    b.L = 1.0;
    const int k = family.size();
    const int leaves = family.tree().leaf_count();
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            if (i == j) continue;
            for (int e = 0; e < leaves; ++e) {
                const double num = family.leaf_prob(i, e);
                const double den = family.leaf_prob(j, e);
                if (!(num > 0.0) || !(den > 0.0))
                    throw ValueError("nonpositive leaf probability at leaf " + std::to_string(e) +
                                     "; family is not an equivalent family");
                const double r = num / den;
                if (r < b.l) {
                    b.l = r;
                    b.arg_min_pair[0] = i;
                    b.arg_min_pair[1] = j;
                    b.arg_min_leaf = e;
                }
                if (r > b.L) {
                    b.L = r;
                    b.arg_max_pair[0] = i;
                    b.arg_max_pair[1] = j;
                    b.arg_max_leaf = e;
                }
            }
        }
    b.eps0 = b.L / (1.0 + b.L);
    b.theorem1_factor = b.l / (1.0 + b.L);
    return b;
}

ConditionBReport check_condition_b(const MeasureFamily& family, double tol) {
    ConditionBReport rep;
    const int k = family.size();
    const int N = family.tree().depth();
    const auto& tree = family.tree();

    for (int i0 = 0; i0 < k; ++i0) {
        ConditionBCandidate cand;
        cand.i0 = i0;
        // Transitions out of level-0 are not constrained: the definition
        // quantifies over atoms of the nontrivial algebras only.
        for (int n = 1; n < N; ++n)
            for (int s = 0; s < tree.atom_count(n); ++s)
                for (int c : tree.children(n, s)) {
                    const double r0 = family.child_prob(i0, n, s, c);
                    for (int i = 0; i < k; ++i) {
                        if (i == i0) continue;
                        const double ri = family.child_prob(i, n, s, c);
                        if (ri > r0 + tol)
                            cand.violations.push_back({i, {n, s}, {n + 1, c}, ri, r0});
                    }
                }
        if (cand.violations.empty() && !rep.passing_i0) rep.passing_i0 = i0;
        rep.candidates.push_back(std::move(cand));
    }
    return rep;
}

Measure mixture(const MeasureFamily& family, const std::vector<double>& weights,
                double tol) {
    const int k = family.size();
    if (static_cast<int>(weights.size()) != k)
        throw ValueError("mixture needs " + std::to_string(k) + " weights, got " +
                         std::to_string(weights.size()));
    double sum = 0.0;
    for (double w : weights) {
        if (w < -tol || !std::isfinite(w))
            throw ValueError("mixture weight " + std::to_string(w) + " is negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > tol)
        throw ValueError("mixture weights sum to " + std::to_string(sum) + ", expected 1");

    Measure q{family.tree_ptr(), std::vector<double>(family.tree().leaf_count(), 0.0)};
    for (int i = 0; i < k; ++i)
        for (int e = 0; e < family.tree().leaf_count(); ++e)
            q.leaf_probs[e] += weights[i] * family.leaf_prob(i, e);
    return q;
}

std::vector<double> rn_conditional(const MeasureFamily& family, int i, int l, int n) {
    const int atoms = family.tree().atom_count(n);
    std::vector<double> out(atoms);
    for (int s = 0; s < atoms; ++s)
        out[s] = family.atom_prob(i, n, s) / family.atom_prob(l, n, s);
    return out;
}

}  // namespace doobdec
