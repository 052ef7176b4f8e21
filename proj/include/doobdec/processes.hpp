#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "doobdec/measures.hpp"

namespace doobdec {

// An adapted process: slices[m] has one value per level-m atom, m = 0..depth.
struct AdaptedProcess {
    std::vector<std::vector<double>> slices;

    int depth() const { return static_cast<int>(slices.size()) - 1; }
    double at(int level, int index) const { return slices.at(level).at(index); }
};

// Throws StructureError unless every slice length matches the tree's level sizes.
void require_adapted(const FiltrationTree& tree, const AdaptedProcess& f);

// Spreads level-n atom values to the leaves under each atom.
std::vector<double> lift_to_leaves(const FiltrationTree& tree,
                                   const std::vector<double>& level_values, int n);

enum class ProcessClass { martingale, supermartingale, neither };

struct ClassifyWitness {
    int measure = 0;
    int level = 0;   // the m of the violated one-step inequality
    int parent = 0;  // level m-1 atom
    double lhs = 0.0;  // E^{P_i}{f_m | parent}
    double rhs = 0.0;  // f_{m-1}(parent)
};

struct ClassifyResult {
    ProcessClass cls = ProcessClass::martingale;
    std::optional<ClassifyWitness> witness;  // first violation when cls == neither
};

// One-step classification relative to the whole family: supermartingale iff
// E^{P_i}{f_m|F_{m-1}} <= f_{m-1} + tol atomwise for every vertex measure
// (mixtures follow), martingale iff equality throughout.
ClassifyResult classify(const MeasureFamily& family, const AdaptedProcess& f,
                        double tol = 1e-9);

// Stopped process: slices above level k repeat each atom's level-k ancestor value.
AdaptedProcess stop(const FiltrationTree& tree, const AdaptedProcess& f, int k);

// Deficit preservation under admissible mixtures. Hypothesis: at step m0 the
// one-step deficit under the first measure dominates phi >= 0 atomwise
// (phi lives on level m0-1). Checks that for `trials` sampled mixtures
// Q = (1-alpha) P_1 + alpha R, alpha in [0, eps0], R a random mixture, the
// deficit under Q stays >= factor * phi - tol atomwise, factor = l/(1+L).
struct Theorem1Report {
    bool hypothesis_ok = false;   // P_1 deficit >= phi and f is a family supermartingale
    bool bound_ok = false;
    double factor = 0.0;
    double min_margin = 0.0;      // min over atoms/trials of deficit_Q - factor*phi
    int trials = 0;
    std::optional<ClassifyWitness> hypothesis_witness;
};

Theorem1Report theorem1_bound_check(const MeasureFamily& family,
                                    const AdaptedProcess& f, int m0,
                                    const std::vector<double>& phi,
                                    int trials, std::uint64_t seed,
                                    double tol = 1e-9);

}  // namespace doobdec
