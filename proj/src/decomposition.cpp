#include "doobdec/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "doobdec/cone.hpp"
#include "doobdec/conditional.hpp"

namespace doobdec {

namespace {

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

std::vector<double> cell_residual(const std::vector<Vec>& a, const Vec& d,
                                  const std::vector<double>& xi) {
    Vec r = d;
    for (std::size_t j = 0; j < a.size(); ++j)
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= a[j][i] * xi[j];
    return r;
}

// One parent's moment system: find xi >= 0 with sum_j a_j xi_j = d, where
// a_j stacks the conditional child probabilities over the measures and d the
// one-step deficits. Selection order: zero/equal deficits take the constant
// solution (k = 1 always does, matching the classical decomposition), then
// the basic solution through the dual basis of the first full-rank column
// set, then any simplex vertex.
CellVerdict solve_cell(const std::vector<Vec>& a, const Vec& d, double tol) {
    CellVerdict v;
    v.deficits = d;
    const int m = static_cast<int>(a.size());
    const double scale = std::max(1.0, inf_norm(d));

    for (double di : d)
        if (di < -tol) {
            v.status = CellStatus::negative_drift;
            return v;
        }
    Vec dc = d;
    for (double& di : dc) di = std::max(di, 0.0);

    const double dmin = *std::min_element(dc.begin(), dc.end());
    const double dmax = *std::max_element(dc.begin(), dc.end());
    if (dmax - dmin <= 1e-12 * scale) {
        // Equal deficits: the conditional probabilities sum to 1 under every
        // measure, so the constant vector solves the system exactly.
        double mean = 0.0;
        for (double di : dc) mean += di;
        mean /= static_cast<double>(dc.size());
        v.xi.assign(m, mean);
        v.status = CellStatus::feasible;
        v.residual = inf_norm(cell_residual(a, dc, v.xi));
        return v;
    }

    // Basic solution through the dual basis, kept when it lands nonnegative.
    {
        std::vector<int> basis;
        std::vector<Vec> basis_vecs;
        const int k = static_cast<int>(d.size());
        // greedy full-rank prefix (same rule as the cone solver)
        std::vector<Vec> ortho;
        double max_norm = 0.0;
        for (const auto& col : a) {
            double n2 = 0.0;
            for (double x : col) n2 += x * x;
            max_norm = std::max(max_norm, std::sqrt(n2));
        }
        const double cutoff = 1e-10 * std::max(1.0, max_norm);
        for (int j = 0; j < m && static_cast<int>(basis.size()) < k; ++j) {
            Vec r = a[j];
            for (const auto& q : ortho) {
                double p = 0.0;
                for (int i = 0; i < k; ++i) p += q[i] * r[i];
                for (int i = 0; i < k; ++i) r[i] -= p * q[i];
            }
            double nrm = 0.0;
            for (double x : r) nrm += x * x;
            nrm = std::sqrt(nrm);
            if (nrm > cutoff) {
                basis.push_back(j);
                basis_vecs.push_back(a[j]);
                for (double& x : r) x /= nrm;
                ortho.push_back(r);
            }
        }
        const DualBasis duals = dual_basis(basis_vecs, 1e-10);
        Vec zr(m, 0.0);
        bool ok = true;
        for (std::size_t l = 0; l < basis.size(); ++l) {
            double w = 0.0;
            for (int i = 0; i < k; ++i) w += duals.f[l][i] * dc[i];
            if (w < -1e-12 * scale) {
                ok = false;
                break;
            }
            // Snap coefficients inside the decision threshold to an exact 0;
            // the residual check below still vets the snapped vector.
            zr[basis[l]] = w <= 1e-12 * scale ? 0.0 : w;
        }
        if (ok) {
            const double res = inf_norm(cell_residual(a, dc, zr));
            if (res <= 1e-10 * scale) {
                v.xi = std::move(zr);
                v.status = CellStatus::feasible;
                v.residual = res;
                return v;
            }
        }
    }

    double lp_residual = 0.0;
    auto sol = nonnegative_solution(a, dc, 1e-10, &lp_residual);
    if (sol) {
        v.xi = std::move(*sol);
        v.status = CellStatus::feasible;
        v.residual = inf_norm(cell_residual(a, dc, v.xi));
    } else {
        v.status = CellStatus::infeasible;
        v.residual = lp_residual;
    }
    return v;
}

}  // namespace

CellVerdict solve_drift_cell(const std::vector<std::vector<double>>& child_probs,
                             const std::vector<double>& deficits, double tol) {
    if (child_probs.empty()) throw StructureError("cell has no children");
    for (const auto& col : child_probs)
        if (col.size() != deficits.size())
            throw StructureError("child probability vector dimension does not match "
                                 "the measure count");
    return solve_cell(child_probs, deficits, tol);
}

const CellVerdict* RegularityReport::first_failure() const {
    for (const auto& c : cells)
        if (c.status != CellStatus::feasible) return &c;
    return nullptr;
}

RegularityReport test_regularity(const MeasureFamily& family, const AdaptedProcess& f,
                                 double tol) {
    const auto& tree = family.tree();
    require_adapted(tree, f);
    const int N = tree.depth();
    const int k = family.size();

    RegularityReport rep;
    rep.regular = true;
    rep.supermartingale = true;
    for (int m = 1; m <= N; ++m)
        for (int s = 0; s < tree.atom_count(m - 1); ++s) {
            const auto& children = tree.children(m - 1, s);
            std::vector<Vec> a;
            a.reserve(children.size());
            for (int c : children) {
                Vec col(k);
                for (int i = 0; i < k; ++i) col[i] = family.child_prob(i, m - 1, s, c);
                a.push_back(std::move(col));
            }
            Vec d(k, 0.0);
            for (int i = 0; i < k; ++i) {
                double ce = 0.0;
                for (std::size_t j = 0; j < children.size(); ++j)
                    ce += a[j][i] * f.at(m, children[j]);
                d[i] = f.at(m - 1, s) - ce;
            }
            CellVerdict v = solve_cell(a, d, tol);
            v.level = m;
            v.parent = s;
            if (v.status == CellStatus::negative_drift) rep.supermartingale = false;
            if (v.status != CellStatus::feasible) rep.regular = false;
            rep.cells.push_back(std::move(v));
        }
    return rep;
}

Decomposition decompose(const MeasureFamily& family, const AdaptedProcess& f,
                        double tol) {
    const auto& tree = family.tree();
    RegularityReport rep = test_regularity(family, f, tol);
    if (!rep.regular) {
        const CellVerdict* fail = rep.first_failure();
        std::string what = "no optional decomposition: ";
        if (fail && fail->status == CellStatus::negative_drift)
            what += "not a supermartingale at (level " + std::to_string(fail->level) +
                    ", atom " + std::to_string(fail->parent) + ")";
        else if (fail)
            what += "drift-matching system infeasible at (level " + std::to_string(fail->level) +
                    ", atom " + std::to_string(fail->parent) + ")";
        throw NotRegularError(std::move(rep), what);
    }

    const int N = tree.depth();
    Decomposition dec;
    dec.report = std::move(rep);
    dec.increments.slices.resize(N + 1);
    dec.increments.slices[0] = {0.0};
    for (int m = 1; m <= N; ++m)
        dec.increments.slices[m].assign(tree.atom_count(m), 0.0);
    for (const auto& cell : dec.report.cells) {
        const auto& children = tree.children(cell.level - 1, cell.parent);
        for (std::size_t j = 0; j < children.size(); ++j)
            dec.increments.slices[cell.level][children[j]] = cell.xi[j];
    }

    dec.g.slices.resize(N + 1);
    dec.g.slices[0] = {0.0};
    for (int m = 1; m <= N; ++m) {
        dec.g.slices[m].resize(tree.atom_count(m));
        for (int c = 0; c < tree.atom_count(m); ++c)
            dec.g.slices[m][c] =
                dec.g.slices[m - 1][tree.parent(m, c)] + dec.increments.slices[m][c];
    }

    dec.martingale.slices.resize(N + 1);
    for (int m = 0; m <= N; ++m) {
        dec.martingale.slices[m].resize(tree.atom_count(m));
        for (int c = 0; c < tree.atom_count(m); ++c)
            dec.martingale.slices[m][c] = f.at(m, c) + dec.g.slices[m][c];
    }
    return dec;
}

AdaptedProcess psi_residuals(const MeasureFamily& family, const AdaptedProcess& f,
                             const AdaptedProcess& increments, int j) {
    const auto& tree = family.tree();
    require_adapted(tree, f);
    require_adapted(tree, increments);
    if (j < 0 || j >= family.size())
        throw ValueError("measure index " + std::to_string(j) + " out of range");

    const int N = tree.depth();
    AdaptedProcess psi;
    psi.slices.resize(N + 1);
    psi.slices[0] = {0.0};
    for (int m = 1; m <= N; ++m) {
        psi.slices[m].resize(tree.atom_count(m));
        for (int s = 0; s < tree.atom_count(m - 1); ++s) {
            double ce = 0.0;
            for (int c : tree.children(m - 1, s))
                ce += family.child_prob(j, m - 1, s, c) * increments.at(m, c);
            for (int c : tree.children(m - 1, s))
                psi.slices[m][c] = increments.at(m, c) - ce;
        }
    }
    return psi;
}

SupProcessRegularity sup_process_regularity(const MeasureFamily& family,
                                            const std::vector<double>& xi,
                                            double tol) {
    const auto& tree = family.tree();
    const int N = tree.depth();
    const int k = family.size();

    SupProcessRegularity out;
    out.expectations.resize(k);
    for (int i = 0; i < k; ++i) {
        double e = 0.0;
        for (int l = 0; l < tree.leaf_count(); ++l)
            e += family.leaf_prob(i, l) * xi[l];
        out.expectations[i] = e;
    }
    double emin = out.expectations[0], emax = out.expectations[0];
    for (double e : out.expectations) {
        emin = std::min(emin, e);
        emax = std::max(emax, e);
    }
    out.expectations_equal = (emax - emin) <= tol * std::max(1.0, std::abs(emax));

    out.sup_process.slices.resize(N + 1);
    for (int m = 0; m <= N; ++m) out.sup_process.slices[m] = sup_cond_exp(family, xi, m);

    out.sup_class = classify(family, out.sup_process, tol).cls;
    if (out.sup_class != ProcessClass::neither) {
        out.regularity = test_regularity(family, out.sup_process, tol);
        if (out.regularity.regular) {
            bool zero = true;
            for (const auto& cell : out.regularity.cells)
                for (double x : cell.xi)
                    if (std::abs(x) > tol * std::max(1.0, emax)) zero = false;
            out.feasible_with_zero_g = zero;
        }
        if (const CellVerdict* fail = out.regularity.first_failure())
            out.failure_at = AtomId{fail->level, fail->parent};
    }
    out.iff_holds = (out.expectations_equal == out.feasible_with_zero_g);
    return out;
}

}  // namespace doobdec
