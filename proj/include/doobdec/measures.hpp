#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "doobdec/errors.hpp"
#include "doobdec/filtration.hpp"

namespace doobdec {

// A single probability measure on the leaves of a tree.
struct Measure {
    std::shared_ptr<const FiltrationTree> tree;
    std::vector<double> leaf_probs;

    double atom_prob(int level, int index) const;
};

// Finitely many equivalent measures on one tree, stored as strictly positive
// leaf probabilities (one row per measure, rows sum to 1). Equivalence on a
// finite space is exactly joint strict positivity, which create() enforces.
class MeasureFamily {
public:
    static MeasureFamily create(std::shared_ptr<const FiltrationTree> tree,
                                std::vector<std::vector<double>> rows,
                                double tol = 1e-9);

    int size() const { return static_cast<int>(rows_.size()); }  // number of measures k
    const FiltrationTree& tree() const { return *tree_; }
    std::shared_ptr<const FiltrationTree> tree_ptr() const { return tree_; }

    double leaf_prob(int measure, int leaf) const { return rows_.at(measure).at(leaf); }
    const std::vector<double>& leaf_row(int measure) const { return rows_.at(measure); }
    double atom_prob(int measure, int level, int index) const;
    // Conditional probability of a child atom given its parent, measure i.
    double child_prob(int measure, int parent_level, int parent_index, int child_index) const;

    Measure vertex(int measure) const;

private:
    MeasureFamily() = default;
    std::shared_ptr<const FiltrationTree> tree_;
    std::vector<std::vector<double>> rows_;
    // atom_probs_[level][measure][index], precomputed by leaf summation.
    std::vector<std::vector<std::vector<double>>> atom_probs_;
};

// Tight atomwise Radon-Nikodym bounds over all ordered measure pairs and all
// leaves: l = min ratio, L = max ratio. Always 0 < l <= 1 <= L (the ratio set
// is closed under reciprocals). eps0 = L/(1+L) bounds the admissible mixing
// weight; theorem1_factor = l/(1+L) is the uniform deficit-preservation factor.
struct EquivalenceBounds {
    double l = 1.0;
    double L = 1.0;
    double eps0 = 0.5;
    double theorem1_factor = 0.5;
    int arg_min_pair[2] = {0, 0};  // (numerator measure, denominator measure) attaining l
    int arg_min_leaf = 0;
    int arg_max_pair[2] = {0, 0};
    int arg_max_leaf = 0;
};

EquivalenceBounds equivalence_bounds(const MeasureFamily& family);

// Literal dominating-transition check: is there a candidate measure i0 whose
// conditional transition ratios dominate every other measure's, over all
// parent atoms of levels >= 1 (the trivial level-0 algebra is excluded by the
// definition)? Since each measure's ratios over the children of one parent
// sum to 1, domination forces equality there, so violations are the normal
// outcome for genuinely different families; they are reported, not thrown.
struct ConditionBViolation {
    int measure = 0;       // the i whose ratio exceeds the candidate's
    AtomId parent;         // A_s^n, n >= 1
    AtomId child;          // A_j^{n+1}
    double ratio = 0.0;    // P_i(child)/P_i(parent)
    double ratio_i0 = 0.0; // P_i0(child)/P_i0(parent)
};

struct ConditionBCandidate {
    int i0 = 0;
    std::vector<ConditionBViolation> violations;
};

struct ConditionBReport {
    std::vector<ConditionBCandidate> candidates;  // one per measure, in order
    std::optional<int> passing_i0;                // first candidate with no violations
    bool pass() const { return passing_i0.has_value(); }
};

ConditionBReport check_condition_b(const MeasureFamily& family, double tol = 1e-9);

// Convex combination sum_i w_i P_i. Weights must be nonnegative and sum to 1
// within tol; otherwise ValueError.
Measure mixture(const MeasureFamily& family, const std::vector<double>& weights,
                double tol = 1e-9);

// Conditional Radon-Nikodym derivative d P_i / d P_l restricted to level n:
// one value per level-n atom, P_i(A)/P_l(A).
std::vector<double> rn_conditional(const MeasureFamily& family, int i, int l, int n);

}  // namespace doobdec
