#pragma once

#include <optional>
#include <string>
#include <vector>

#include "doobdec/errors.hpp"

namespace doobdec {

struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConeMembershipError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateInputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoKernelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Vectors live in R^k; a "system" is a finite list of nonnegative, nonzero
// vectors a_1..a_m (the cone generators) plus a target a_0. Everything here
// is dense and small; tolerances follow the residual budget 1e-10 and the
// rank cutoff 1e-10 * sigma_max.

using Vec = std::vector<double>;

enum class ConeLocation { interior, boundary, outside };

struct MembershipResult {
    ConeLocation location = ConeLocation::outside;
    // Coefficients attaining the max-min value when feasible (size m).
    std::vector<double> certificate;
    double min_coefficient = 0.0;  // the max-min LP optimum
};

// Decides where a0 sits relative to the cone {sum alpha_j a_j : alpha_j >= 0}.
// Interior means some representation has every coefficient strictly positive;
// decided by maximizing the minimum coefficient (small dense simplex).
MembershipResult cone_membership(const std::vector<Vec>& a, const Vec& a0,
                                 double tol = 1e-10);

// Any nonnegative solution of sum_j a_j x_j = a0 (phase-1 simplex), or nullopt
// when none exists. residual_out, if given, receives the best attainable
// equality violation (0 when feasible).
std::optional<std::vector<double>> nonnegative_solution(const std::vector<Vec>& a,
                                                        const Vec& a0,
                                                        double tol = 1e-10,
                                                        double* residual_out = nullptr);

// Dual system of an independent set: rows f_1..f_r with <f_i, a_j> = delta_ij
// (minimal-norm when r < k), completed by an orthonormal basis f_{r+1}..f_k of
// the orthogonal complement of span(a_1..a_r). Throws SingularityError naming
// the first dependent vector if the input is not independent.
struct DualBasis {
    int r = 0;  // number of basis vectors
    int k = 0;  // ambient dimension
    std::vector<Vec> f;  // size k
};

DualBasis dual_basis(const std::vector<Vec>& basis_vectors, double tol = 1e-10);

// The structured family of nonnegative solutions of sum_j a_j x_j = a0:
//  - basis: lexicographically first full-rank column subset (size r = rank),
//  - z_r supported on the basis with coefficients <a0, f_l>,
//  - one z_i per non-basis column i, carrying y_i at position i,
//    y_i = min over {l <= r : <a_i,f_l> > 0} of <a0,f_l>/<a_i,f_l>,
//    or the default value 1 when that index set is empty (flagged).
// Preconditions: a0 nonzero, every a_j nonzero and nonnegative, and a0 strictly
// interior to the basis cone (<a0, f_l> > 0 for l <= r) -> ConeMembershipError
// otherwise; a0 = 0 or a zero column -> DegenerateInputError.
struct SolutionFamily {
    int m = 0;   // number of generators
    int r = 0;   // rank
    std::vector<int> basis;          // column indices, ascending
    std::vector<int> nonbasis;       // remaining columns, ascending
    DualBasis duals;
    std::vector<double> z_r;         // size m
    std::vector<std::vector<double>> z;  // one per non-basis column, size m each
    std::vector<double> y;               // y_i per non-basis column
    std::vector<bool> y_default_branch;  // true where the min ran over an empty set
    std::vector<double> a0;
    std::vector<Vec> a;
};

SolutionFamily solve_cone_system(const std::vector<Vec>& a, const Vec& a0,
                                 double tol = 1e-10);

// Affine combination z = gamma_0 * z_r + sum_i gamma_i * z_i. The weights
// must sum to 1 and the non-basis weights gamma_1.. must be nonnegative,
// else ValueError; the z_r weight is free in sign, since reproducing a
// strictly positive solution whose non-basis block outweighs z_r's share
// requires gamma_0 < 0. Strict positivity of z and the margin inequalities
// <a0 - sum_i gamma_i y_i a_i, f_l> > 0 (l <= r) are evaluated and reported,
// not asserted: combinations touching the boundary are legal inputs whose
// flags the caller inspects.
struct CombineResult {
    std::vector<double> z;
    bool strictly_positive = false;
    std::vector<double> margins;     // one per basis position l
    std::vector<int> violated;       // positions l with margin <= 0
    double residual = 0.0;           // |sum a_j z_j - a0|_inf, recomputed
};

CombineResult combine(const SolutionFamily& fam, const std::vector<double>& gamma,
                      double tol = 1e-10);

// Kernel direction of the generator matrix, normalized to max |u_j| = 1 with
// the first nonzero entry positive; NoKernelError when the columns are
// independent. When sum_j a_j is proportional to a0 (the probability case),
// also returns the strictly positive solution xi = (1 - t u)/c with t backed
// off from the largest feasible value by 1e-6, where c is the proportionality
// constant.
struct HomogeneousResult {
    std::vector<double> u;
    double t = 0.0;
    std::optional<std::vector<double>> xi;
    double proportionality = 0.0;  // c with sum_j a_j = c * a0, 0 if not proportional
};

HomogeneousResult homogeneous_solution(const std::vector<Vec>& a,
                                       const std::optional<Vec>& a0 = std::nullopt,
                                       double tol = 1e-10);

}  // namespace doobdec
