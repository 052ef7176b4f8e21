#include "doobdec/cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

namespace doobdec {

namespace {

constexpr double kPivEps = 1e-11;

double inf_norm(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double scale_of(const Vec& a0) { return std::max(1.0, inf_norm(a0)); }

Eigen::MatrixXd to_matrix(const std::vector<Vec>& a) {
    const int m = static_cast<int>(a.size());
    const int k = m == 0 ? 0 : static_cast<int>(a[0].size());
    Eigen::MatrixXd A(k, m);
    for (int j = 0; j < m; ++j) {
        if (static_cast<int>(a[j].size()) != k)
            throw ValueError("generator " + std::to_string(j) + " has dimension " +
                             std::to_string(a[j].size()) + ", expected " + std::to_string(k));
        for (int i = 0; i < k; ++i) A(i, j) = a[j][i];
    }
    return A;
}

// Dense two-phase simplex on min c.x, Ax = b, x >= 0, Bland's rule throughout.
struct LpOutcome {
    enum Status { optimal, infeasible, unbounded } status = optimal;
    std::vector<double> x;   // structural variables
    double objective = 0.0;  // phase-2 objective (c.x)
    double phase1 = 0.0;     // residual: min sum of artificials
};

struct Tableau {
    int m = 0, n = 0;                    // rows, total columns (structural + artificial)
    std::vector<std::vector<double>> a;  // m rows of n+1 (last = rhs)
    std::vector<int> basis;
};

void pivot(Tableau& t, std::vector<double>& z, int leave, int enter) {
    auto& row = t.a[leave];
    const double piv = row[enter];
    for (double& v : row) v /= piv;
    for (int r = 0; r < t.m; ++r) {
        if (r == leave) continue;
        const double f = t.a[r][enter];
        if (f == 0.0) continue;
        for (int j = 0; j <= t.n; ++j) t.a[r][j] -= f * row[j];
    }
    const double fz = z[enter];
    if (fz != 0.0)
        for (int j = 0; j <= t.n; ++j) z[j] -= fz * row[j];
    t.basis[leave] = enter;
}

// Optimizes the given cost over the current basis. Entering columns are
// restricted by `allowed`. Returns false on unboundedness.
bool run_simplex(Tableau& t, const std::vector<double>& cost,
                 const std::vector<char>& allowed, double* objective_out) {
    std::vector<double> z(t.n + 1, 0.0);
    for (int j = 0; j < t.n; ++j) z[j] = cost[j];
    for (int r = 0; r < t.m; ++r) {
        const double cb = cost[t.basis[r]];
        if (cb != 0.0)
            for (int j = 0; j <= t.n; ++j) z[j] -= cb * t.a[r][j];
    }
    for (int iter = 0; iter < 50000; ++iter) {
        int enter = -1;
        for (int j = 0; j < t.n; ++j)
            if (allowed[j] && z[j] < -kPivEps) {
                enter = j;
                break;
            }
        if (enter < 0) {
            *objective_out = -z[t.n];
            return true;
        }
        int leave = -1;
        double best = 0.0;
        for (int r = 0; r < t.m; ++r) {
            const double arj = t.a[r][enter];
            if (arj > kPivEps) {
                const double ratio = t.a[r][t.n] / arj;
                if (leave < 0 || ratio < best - 1e-15 ||
                    (std::abs(ratio - best) <= 1e-15 && t.basis[r] < t.basis[leave])) {
                    leave = r;
                    best = ratio;
                }
            }
        }
        if (leave < 0) return false;
        pivot(t, z, leave, enter);
    }
    throw ValueError("simplex iteration limit exceeded");
}

// A given as k x n (structural columns only).
LpOutcome solve_lp(const Eigen::MatrixXd& A, const Vec& b, const Vec& c, double feas_eps) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    Tableau t;
    t.m = m;
    t.n = n + m;
    t.a.assign(m, std::vector<double>(t.n + 1, 0.0));
    t.basis.resize(m);
    for (int r = 0; r < m; ++r) {
        const double sign = b[r] < 0.0 ? -1.0 : 1.0;
        for (int j = 0; j < n; ++j) t.a[r][j] = sign * A(r, j);
        t.a[r][n + r] = 1.0;
        t.a[r][t.n] = sign * b[r];
        t.basis[r] = n + r;
    }

    std::vector<double> phase1_cost(t.n, 0.0);
    for (int r = 0; r < m; ++r) phase1_cost[n + r] = 1.0;
    std::vector<char> all_allowed(t.n, 1);
    LpOutcome out;
    if (!run_simplex(t, phase1_cost, all_allowed, &out.phase1))
        throw ValueError("phase-1 objective unbounded; malformed system");
    if (out.phase1 > feas_eps) {
        out.status = LpOutcome::infeasible;
        out.x.assign(n, 0.0);
        for (int r = 0; r < m; ++r)
            if (t.basis[r] < n) out.x[t.basis[r]] = t.a[r][t.n];
        return out;
    }

    // Drive leftover artificials out of the basis where a structural pivot
    // exists; rows with none are redundant and their artificial stays pinned
    // at zero (blocked from re-entering below).
    for (int r = 0; r < m; ++r) {
        if (t.basis[r] < n) continue;
        int enter = -1;
        for (int j = 0; j < n; ++j)
            if (std::abs(t.a[r][j]) > kPivEps) {
                enter = j;
                break;
            }
        if (enter >= 0) {
            std::vector<double> dummy(t.n + 1, 0.0);
            pivot(t, dummy, r, enter);
        } else {
            t.a[r][t.n] = 0.0;
        }
    }

    std::vector<double> phase2_cost(t.n, 0.0);
    for (int j = 0; j < n; ++j) phase2_cost[j] = c[j];
    std::vector<char> allowed(t.n, 1);
    for (int r = 0; r < m; ++r) allowed[n + r] = 0;
    if (!run_simplex(t, phase2_cost, allowed, &out.objective)) {
        out.status = LpOutcome::unbounded;
        return out;
    }
    out.status = LpOutcome::optimal;
    out.x.assign(n, 0.0);
    for (int r = 0; r < m; ++r)
        if (t.basis[r] < n) out.x[t.basis[r]] = std::max(0.0, t.a[r][t.n]);
    return out;
}

void validate_system(const std::vector<Vec>& a, const Vec& a0) {
    if (a.empty()) throw DegenerateInputError("no generators given");
    const std::size_t k = a0.size();
    if (k == 0) throw DegenerateInputError("target vector is empty");
    for (std::size_t j = 0; j < a.size(); ++j)
        if (a[j].size() != k)
            throw ValueError("generator " + std::to_string(j) + " has dimension " +
                             std::to_string(a[j].size()) + ", target has " + std::to_string(k));
}

}  // namespace

MembershipResult cone_membership(const std::vector<Vec>& a, const Vec& a0, double tol) {
    validate_system(a, a0);
    const int m = static_cast<int>(a.size());
    const int k = static_cast<int>(a0.size());
    const double eps = tol * scale_of(a0);

    // Structural columns: one per generator (the slack above the common
    // floor), plus the floor t itself with column sum_j a_j. Maximizing t
    // maximizes the minimum coefficient alpha_j = s_j + t.
    Eigen::MatrixXd A(k, m + 1);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < k; ++i) A(i, j) = a[j][i];
    for (int i = 0; i < k; ++i) {
        double s = 0.0;
        for (int j = 0; j < m; ++j) s += a[j][i];
        A(i, m) = s;
    }
    Vec cost(m + 1, 0.0);
    cost[m] = -1.0;

    const LpOutcome lp = solve_lp(A, a0, cost, eps);
    MembershipResult res;
    if (lp.status == LpOutcome::infeasible) {
        res.location = ConeLocation::outside;
        return res;
    }
    double t = 0.0;
    if (lp.status == LpOutcome::unbounded) {
        // only possible with degenerate (zero-mass) generator sets
        t = std::numeric_limits<double>::infinity();
        res.certificate.assign(m, 1.0);
    } else {
        t = -lp.objective;  // objective was -t
        res.certificate.assign(m, 0.0);
        for (int j = 0; j < m; ++j) res.certificate[j] = lp.x[j] + t;
    }
    res.min_coefficient = t;
    res.location = t > eps ? ConeLocation::interior : ConeLocation::boundary;
    return res;
}

std::optional<std::vector<double>> nonnegative_solution(const std::vector<Vec>& a,
                                                        const Vec& a0, double tol,
                                                        double* residual_out) {
    validate_system(a, a0);
    const double eps = tol * scale_of(a0);
    const Eigen::MatrixXd A = to_matrix(a);
    Vec cost(a.size(), 0.0);
    const LpOutcome lp = solve_lp(A, a0, cost, eps);
    if (residual_out) *residual_out = lp.phase1;
    if (lp.status == LpOutcome::infeasible) return std::nullopt;
    return lp.x;
}

DualBasis dual_basis(const std::vector<Vec>& basis_vectors, double tol) {
    if (basis_vectors.empty()) throw SingularityError("empty basis");
    const int r = static_cast<int>(basis_vectors.size());
    const int k = static_cast<int>(basis_vectors[0].size());
    Eigen::MatrixXd B = to_matrix(basis_vectors);
    if (r > k)
        throw SingularityError("more basis vectors (" + std::to_string(r) +
                               ") than dimensions (" + std::to_string(k) + ")");

    // Locate the first dependent column (if any) for a usable error message.
    double max_norm = 0.0;
    for (int j = 0; j < r; ++j) max_norm = std::max(max_norm, B.col(j).norm());
    const double cutoff = tol * std::max(1.0, max_norm);
    Eigen::MatrixXd Q(k, r);
    int filled = 0;
    for (int j = 0; j < r; ++j) {
        Eigen::VectorXd v = B.col(j);
        if (filled > 0) v -= Q.leftCols(filled) * (Q.leftCols(filled).transpose() * v);
        if (v.norm() <= cutoff)
            throw SingularityError("basis vector " + std::to_string(j) +
                                   " is linearly dependent on its predecessors");
        Q.col(filled++) = v / v.norm();
    }

    DualBasis d;
    d.r = r;
    d.k = k;
    d.f.assign(k, Vec(k, 0.0));

    // Minimal-norm duals: rows of pinv(B). For square B this is the inverse.
    Eigen::MatrixXd F;
    if (r == k) {
        F = B.fullPivLu().inverse();
    } else {
        F = (B.transpose() * B).ldlt().solve(B.transpose());
    }
    for (int i = 0; i < r; ++i)
        for (int c = 0; c < k; ++c) d.f[i][c] = F(i, c);

    // Orthonormal complement of span(B): the remaining left singular vectors.
    if (r < k) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeFullU);
        const Eigen::MatrixXd& U = svd.matrixU();
        for (int i = r; i < k; ++i) {
            Eigen::VectorXd u = U.col(i);
            for (int c = 0; c < k; ++c)
                if (std::abs(u(c)) > 1e-12) {
                    if (u(c) < 0) u = -u;
                    break;
                }
            for (int c = 0; c < k; ++c) d.f[i][c] = u(c);
        }
    }
    return d;
}

namespace {

double dot(const Vec& x, const Vec& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

Vec residual_vector(const std::vector<Vec>& a, const Vec& a0, const Vec& x) {
    Vec r = a0;
    for (std::size_t j = 0; j < a.size(); ++j)
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= a[j][i] * x[j];
    return r;
}

}  // namespace

SolutionFamily solve_cone_system(const std::vector<Vec>& a, const Vec& a0, double tol) {
    validate_system(a, a0);
    const int m = static_cast<int>(a.size());
    const int k = static_cast<int>(a0.size());
    const double scale = scale_of(a0);
    if (inf_norm(a0) <= tol * scale)
        throw DegenerateInputError("target vector is zero");
    for (int j = 0; j < m; ++j) {
        if (inf_norm(a[j]) <= tol)
            throw DegenerateInputError("generator " + std::to_string(j) + " is the zero vector");
        for (int i = 0; i < k; ++i)
            if (a[j][i] < -tol)
                throw ValueError("generator " + std::to_string(j) +
                                 " has a negative component; the moment systems solved "
                                 "here have nonnegative generators");
    }

    // Lexicographically first full-rank column subset, greedy against the
    // scaled rank cutoff.
    const Eigen::MatrixXd A = to_matrix(a);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    const double smax = svd.singularValues()(0);
    const double cutoff = tol * std::max(1.0, smax);
    SolutionFamily fam;
    fam.m = m;
    fam.a = a;
    fam.a0 = a0;
    Eigen::MatrixXd Q(k, std::min(m, k));
    int r = 0;
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXd v = A.col(j);
        if (r > 0) v -= Q.leftCols(r) * (Q.leftCols(r).transpose() * v);
        if (v.norm() > cutoff) {
            Q.col(r++) = v / v.norm();
            fam.basis.push_back(j);
        } else {
            fam.nonbasis.push_back(j);
        }
    }
    fam.r = r;

    // a0 must lie in the span of the generators at all.
    Eigen::VectorXd a0v(k);
    for (int i = 0; i < k; ++i) a0v(i) = a0[i];
    const double span_res = (a0v - Q.leftCols(r) * (Q.leftCols(r).transpose() * a0v)).norm();
    if (span_res > tol * scale)
        throw ConeMembershipError("target lies outside the span of the generators (residual " +
                                  std::to_string(span_res) + ")");

    std::vector<Vec> basis_vecs;
    for (int b : fam.basis) basis_vecs.push_back(a[b]);
    fam.duals = dual_basis(basis_vecs, tol);

    // Strict interior relative to the basis cone: <a0, f_l> > 0 for l <= r.
    std::vector<double> w(r);
    for (int l = 0; l < r; ++l) {
        w[l] = dot(a0, fam.duals.f[l]);
        if (w[l] <= tol * scale)
            throw ConeMembershipError(
                "target is not strictly inside the basis cone: <a0, f_" + std::to_string(l) +
                "> = " + std::to_string(w[l]));
    }

    fam.z_r.assign(m, 0.0);
    for (int l = 0; l < r; ++l) fam.z_r[fam.basis[l]] = w[l];

    for (int i : fam.nonbasis) {
        std::vector<double> c(r);
        for (int l = 0; l < r; ++l) c[l] = dot(a[i], fam.duals.f[l]);
        double y = 1.0;
        bool default_branch = true;
        for (int l = 0; l < r; ++l)
            if (c[l] > tol) {
                const double ratio = w[l] / c[l];
                if (default_branch || ratio < y) y = ratio;
                default_branch = false;
            }
        Vec zi(m, 0.0);
        for (int l = 0; l < r; ++l) {
            double v = w[l] - y * c[l];
            if (std::abs(v) <= 1e-14 * scale) v = 0.0;  // exact zero at the pinning index
            zi[fam.basis[l]] = v;
        }
        zi[i] = y;
        fam.z.push_back(std::move(zi));
        fam.y.push_back(y);
        fam.y_default_branch.push_back(default_branch);
    }

    // Residual guarantee on every member of the family.
    const double budget = tol * scale;
    auto check = [&](const Vec& zv) {
        const double res = inf_norm(residual_vector(a, a0, zv));
        if (res > budget * 10)
            throw ValueError("cone solution residual " + std::to_string(res) +
                             " exceeds the tolerance budget");
    };
    check(fam.z_r);
    for (const auto& zi : fam.z) check(zi);
    return fam;
}

CombineResult combine(const SolutionFamily& fam, const std::vector<double>& gamma,
                      double tol) {
    const std::size_t want = 1 + fam.nonbasis.size();
    if (gamma.size() != want)
        throw ValueError("combine needs " + std::to_string(want) + " weights (z_r first), got " +
                         std::to_string(gamma.size()));
    double sum = 0.0;
    for (std::size_t q = 0; q < gamma.size(); ++q) {
        // Only the non-basis weights are sign-constrained; the z_r weight is
        // determined by the sum and goes negative when the non-basis block
        // carries more than z_r's share of a strictly positive solution.
        if (q > 0 && gamma[q] < -tol)
            throw ValueError("non-basis combination weight " + std::to_string(gamma[q]) +
                             " is negative");
        sum += gamma[q];
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ValueError("combination weights sum to " + std::to_string(sum) + ", expected 1");

    CombineResult res;
    res.z.assign(fam.m, 0.0);
    for (int j = 0; j < fam.m; ++j) res.z[j] = gamma[0] * fam.z_r[j];
    for (std::size_t i = 0; i < fam.nonbasis.size(); ++i)
        for (int j = 0; j < fam.m; ++j) res.z[j] += gamma[i + 1] * fam.z[i][j];

    const double scale = scale_of(fam.a0);
    res.strictly_positive = true;
    for (double v : res.z)
        if (v <= tol * scale) res.strictly_positive = false;

    // Margin inequalities: <a0 - sum_i gamma_i y_i a_i, f_l> over basis
    // positions; a nonpositive margin pinpoints where strict positivity on
    // the basis block is lost.
    Vec shifted = fam.a0;
    for (std::size_t i = 0; i < fam.nonbasis.size(); ++i) {
        const int col = fam.nonbasis[i];
        const double w = gamma[i + 1] * fam.y[i];
        for (std::size_t c = 0; c < shifted.size(); ++c) shifted[c] -= w * fam.a[col][c];
    }
    res.margins.resize(fam.r);
    for (int l = 0; l < fam.r; ++l) {
        res.margins[l] = dot(shifted, fam.duals.f[l]);
        if (res.margins[l] <= tol * scale) res.violated.push_back(l);
    }
    res.residual = inf_norm(residual_vector(fam.a, fam.a0, res.z));
    return res;
}

HomogeneousResult homogeneous_solution(const std::vector<Vec>& a,
                                       const std::optional<Vec>& a0, double tol) {
    if (a.empty()) throw DegenerateInputError("no generators given");
    const Eigen::MatrixXd A = to_matrix(a);
    const int m = static_cast<int>(a.size());
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    lu.setThreshold(tol);
    const Eigen::MatrixXd kernel = lu.kernel();
    if (lu.dimensionOfKernel() == 0 || kernel.cols() == 0 ||
        (kernel.cols() == 1 && kernel.col(0).norm() == 0.0))
        throw NoKernelError("the generators are linearly independent; no homogeneous direction");

    Eigen::VectorXd u = kernel.col(0);
    const double max_abs = u.cwiseAbs().maxCoeff();
    u /= max_abs;
    for (int j = 0; j < m; ++j)
        if (std::abs(u(j)) > 1e-12) {
            if (u(j) < 0) u = -u;
            break;
        }

    HomogeneousResult res;
    res.u.assign(m, 0.0);
    for (int j = 0; j < m; ++j) res.u[j] = u(j);

    // Largest t with 1 - t*u >= 0, backed off by the safety margin.
    double t_max = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j)
        if (u(j) > tol) t_max = std::min(t_max, 1.0 / u(j));
    res.t = std::isfinite(t_max) ? t_max - 1e-6 : 0.0;

    if (a0) {
        // Is sum_j a_j proportional to a0? Then xi = 1 - t*u solves the
        // inhomogeneous system up to that constant.
        const std::size_t k = a0->size();
        Vec colsum(k, 0.0);
        for (int j = 0; j < m; ++j)
            for (std::size_t i = 0; i < k; ++i) colsum[i] += a[j][i];
        const double denom = dot(*a0, *a0);
        if (denom > 0) {
            const double c = dot(colsum, *a0) / denom;
            double dev = 0.0;
            for (std::size_t i = 0; i < k; ++i)
                dev = std::max(dev, std::abs(colsum[i] - c * (*a0)[i]));
            if (dev <= tol * std::max(1.0, inf_norm(colsum)) && std::abs(c) > tol) {
                res.proportionality = c;
                Vec xi(m);
                for (int j = 0; j < m; ++j) xi[j] = (1.0 - res.t * u(j)) / c;
                res.xi = std::move(xi);
            }
        }
    }
    return res;
}

}  // namespace doobdec
