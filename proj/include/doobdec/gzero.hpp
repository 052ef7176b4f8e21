#pragma once

#include <optional>
#include <vector>

#include "doobdec/cone.hpp"
#include "doobdec/decomposition.hpp"

namespace doobdec {

// Solutions xi of the level-n moment system
//   sum_j P_i(A_j^n) xi_j = 1   for every measure i
// with xi >= 0: the F_n-measurable elements of the unit-expectation class.
// Wraps the cone solver's structured solution family; xi vectors are indexed
// by level-n atoms.
struct GZeroFamily {
    int level = 0;
    SolutionFamily cone;
    std::vector<double> xi_basic() const { return cone.z_r; }
};

GZeroFamily solve_g0(const MeasureFamily& family, int n, double tol = 1e-10);

// The candidate density process M_m = E^{P_1}{xi | F_m} for xi with unit
// expectation under every measure (checked; ValueError beyond tol). The
// process is computed under the first measure; max_cross_measure_dev records
// the worst disagreement sup_m,atom |E^{P_i}{xi|F_m} - E^{P_1}{xi|F_m}|,
// which is 0 for dominated families and generally positive otherwise.
struct CandidateMartingale {
    AdaptedProcess M;
    double max_cross_measure_dev = 0.0;
};

CandidateMartingale martingale_from_xi(const MeasureFamily& family,
                                       const std::vector<double>& xi_leaf,
                                       double tol = 1e-9);

// Product generator h_m = f_m * M_m from a pathwise-nonincreasing nonnegative
// adapted f and a unit-expectation xi. Its canonical increments are
//   (f_{m-1}(parent) - f_m(child)) * M_m(child) >= 0,
// and h + (their running sum) is the martingale f_0-scaled copy of M when M
// is measure-independent. Returns h, the increments, and the verification
// flags (drift-matching feasibility of h, martingale property of the patched
// process).
struct GeneratorResult {
    AdaptedProcess h;
    AdaptedProcess increments;
    AdaptedProcess patched;  // h + running sum of increments
    bool patched_martingale = false;
    bool h_regular = false;
    double cross_measure_dev = 0.0;
};

GeneratorResult local_regular_generator(const MeasureFamily& family,
                                        const AdaptedProcess& f,
                                        const std::vector<double>& xi_leaf,
                                        double tol = 1e-9);

// Nonnegative linear combinations of product generators stay locally regular;
// this builds sum_q c_q f^{(q)}_m M^{(q)}_m and reports the same flags.
GeneratorResult class_k_combination(const MeasureFamily& family,
                                    const std::vector<AdaptedProcess>& fs,
                                    const std::vector<std::vector<double>>& xis,
                                    const std::vector<double>& coeffs,
                                    double tol = 1e-9);

// Representation of a nonnegative locally regular supermartingale f with
// f_0 > 0 through a unit-expectation payoff:
//   xi = (f_N + g_N)/f_0,  f = f1bar + f2bar,
//   f1bar_m = f_0 * E{xi|F_m} (measure-independent),  f2bar = -g.
// Throws NotRegularError when f is not regular; ValueError when f_0 <= 0 or
// f takes negative values.
struct Representation {
    double f0 = 0.0;
    std::vector<double> xi;  // leaf values
    AdaptedProcess f1bar;
    AdaptedProcess f2bar;
    Decomposition dec;
    double reconstruction_error = 0.0;  // max |f - (f1bar + f2bar)|
    double unit_expectation_dev = 0.0;  // max_i |E^{P_i} xi - 1|
};

Representation represent_supermartingale(const MeasureFamily& family,
                                         const AdaptedProcess& f,
                                         double tol = 1e-9);

}  // namespace doobdec
