#pragma once

#include <vector>

#include "doobdec/measures.hpp"

namespace doobdec {

// E^P{xi | F_n}: one value per level-n atom, computed as the P-weighted
// average of xi over the leaves of each atom. xi has one value per leaf.
std::vector<double> cond_exp(const Measure& P, const std::vector<double>& xi, int n);

// Same under the mixture Q = sum_i w_i P_i. Computed two ways: directly from
// the mixed leaf probabilities, and through the normalized-density formula
//   E^Q{xi|F_n} = sum_i w_i r_i E^{P_i}{xi|F_n} / sum_i w_i r_i,
// r_i = the conditional density of P_i against the first measure. The two
// routes must agree to 1e-12 (abs-or-rel); disagreement throws ValueError,
// it would mean the calculus itself is broken.
std::vector<double> cond_exp_mixture(const MeasureFamily& family,
                                     const std::vector<double>& weights,
                                     const std::vector<double>& xi, int n);

// sup over the whole convex family of E^Q{xi|F_n}. On each atom the sup is
// attained at a vertex, so this is the atomwise max over the k measures.
std::vector<double> sup_cond_exp(const MeasureFamily& family,
                                 const std::vector<double>& xi, int n);

// The F_N-measurable kernel carrying a measure change at level n:
//   phi = (dP_i/dP_l) / E^{P_l}{dP_i/dP_l | F_n},
// one value per leaf. Satisfies E^{P_i}{xi|F_n} = E^{P_l}{xi * phi | F_n}.
std::vector<double> measure_change_kernel(const MeasureFamily& family,
                                          int i, int l, int n);

}  // namespace doobdec
