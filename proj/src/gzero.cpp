#include "doobdec/gzero.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "doobdec/conditional.hpp"

namespace doobdec {

GZeroFamily solve_g0(const MeasureFamily& family, int n, double tol) {
    const auto& tree = family.tree();
    if (n < 0 || n > tree.depth())
        throw StructureError("level " + std::to_string(n) + " out of range");
    const int k = family.size();
    std::vector<Vec> a;
    a.reserve(tree.atom_count(n));
    for (int j = 0; j < tree.atom_count(n); ++j) {
        Vec col(k);
        for (int i = 0; i < k; ++i) col[i] = family.atom_prob(i, n, j);
        a.push_back(std::move(col));
    }
    GZeroFamily g;
    g.level = n;
    g.cone = solve_cone_system(a, Vec(k, 1.0), tol);
    return g;
}

CandidateMartingale martingale_from_xi(const MeasureFamily& family,
                                       const std::vector<double>& xi_leaf,
                                       double tol) {
    const auto& tree = family.tree();
    const int k = family.size();
    const int N = tree.depth();
    if (static_cast<int>(xi_leaf.size()) != tree.leaf_count())
        throw StructureError("xi has " + std::to_string(xi_leaf.size()) +
                             " values, tree has " + std::to_string(tree.leaf_count()) +
                             " leaves");
    for (int i = 0; i < k; ++i) {
        double e = 0.0;
        for (int l = 0; l < tree.leaf_count(); ++l)
            e += family.leaf_prob(i, l) * xi_leaf[l];
        if (std::abs(e - 1.0) > tol)
            throw ValueError("xi has expectation " + std::to_string(e) + " under measure " +
                             std::to_string(i) + ", the unit-expectation class requires 1");
    }

    CandidateMartingale cm;
    cm.M.slices.resize(N + 1);
    for (int m = 0; m <= N; ++m)
        cm.M.slices[m] = cond_exp(family.vertex(0), xi_leaf, m);

    for (int i = 1; i < k; ++i)
        for (int m = 0; m <= N; ++m) {
            const auto vi = cond_exp(family.vertex(i), xi_leaf, m);
            for (int s = 0; s < tree.atom_count(m); ++s)
                cm.max_cross_measure_dev =
                    std::max(cm.max_cross_measure_dev, std::abs(vi[s] - cm.M.at(m, s)));
        }
    return cm;
}

namespace {

void require_nonincreasing(const FiltrationTree& tree, const AdaptedProcess& f,
                           double tol) {
    for (int m = 1; m <= tree.depth(); ++m)
        for (int c = 0; c < tree.atom_count(m); ++c) {
            const double parent = f.at(m - 1, tree.parent(m, c));
            if (f.at(m, c) > parent + tol)
                throw ValueError("process increases along the path into " +
                                 to_string({m, c}) + " (" + std::to_string(parent) + " -> " +
                                 std::to_string(f.at(m, c)) + "); generator needs a "
                                 "pathwise nonincreasing process");
            if (f.at(m, c) < -tol)
                throw ValueError("process is negative at " + to_string({m, c}));
        }
    if (f.at(0, 0) < -tol) throw ValueError("process is negative at the root");
}

GeneratorResult build_generator(const MeasureFamily& family,
                                const std::vector<AdaptedProcess>& fs,
                                const std::vector<std::vector<double>>& xis,
                                const std::vector<double>& coeffs, double tol) {
    const auto& tree = family.tree();
    const int N = tree.depth();

    GeneratorResult out;
    out.h.slices.resize(N + 1);
    out.increments.slices.resize(N + 1);
    out.increments.slices[0] = {0.0};
    for (int m = 0; m <= N; ++m) out.h.slices[m].assign(tree.atom_count(m), 0.0);
    for (int m = 1; m <= N; ++m) out.increments.slices[m].assign(tree.atom_count(m), 0.0);

    for (std::size_t q = 0; q < fs.size(); ++q) {
        require_adapted(tree, fs[q]);
        require_nonincreasing(tree, fs[q], tol);
        if (coeffs[q] < 0.0)
            throw ValueError("combination coefficient " + std::to_string(coeffs[q]) +
                             " is negative; the class is a convex cone");
        const auto cm = martingale_from_xi(family, xis[q], tol);
        out.cross_measure_dev = std::max(out.cross_measure_dev, cm.max_cross_measure_dev);
        for (int m = 0; m <= N; ++m)
            for (int s = 0; s < tree.atom_count(m); ++s)
                out.h.slices[m][s] += coeffs[q] * fs[q].at(m, s) * cm.M.at(m, s);
        for (int m = 1; m <= N; ++m)
            for (int c = 0; c < tree.atom_count(m); ++c) {
                const int p = tree.parent(m, c);
                out.increments.slices[m][c] +=
                    coeffs[q] * (fs[q].at(m - 1, p) - fs[q].at(m, c)) * cm.M.at(m, c);
            }
    }

    out.patched.slices.resize(N + 1);
    out.patched.slices[0] = out.h.slices[0];
    std::vector<double> cum_prev = {0.0};
    for (int m = 1; m <= N; ++m) {
        std::vector<double> cum(tree.atom_count(m), 0.0);
        out.patched.slices[m].resize(tree.atom_count(m));
        for (int c = 0; c < tree.atom_count(m); ++c) {
            cum[c] = cum_prev[tree.parent(m, c)] + out.increments.slices[m][c];
            out.patched.slices[m][c] = out.h.slices[m][c] + cum[c];
        }
        cum_prev = std::move(cum);
    }

    out.patched_martingale =
        classify(family, out.patched, tol).cls == ProcessClass::martingale;
    out.h_regular = test_regularity(family, out.h, tol).regular;
    return out;
}

}  // namespace

GeneratorResult local_regular_generator(const MeasureFamily& family,
                                        const AdaptedProcess& f,
                                        const std::vector<double>& xi_leaf,
                                        double tol) {
    return build_generator(family, {f}, {xi_leaf}, {1.0}, tol);
}

GeneratorResult class_k_combination(const MeasureFamily& family,
                                    const std::vector<AdaptedProcess>& fs,
                                    const std::vector<std::vector<double>>& xis,
                                    const std::vector<double>& coeffs, double tol) {
    if (fs.size() != xis.size() || fs.size() != coeffs.size())
        throw ValueError("combination needs matching process/payoff/coefficient counts");
    if (fs.empty()) throw ValueError("empty combination");
    return build_generator(family, fs, xis, coeffs, tol);
}

Representation represent_supermartingale(const MeasureFamily& family,
                                         const AdaptedProcess& f, double tol) {
    const auto& tree = family.tree();
    require_adapted(tree, f);
    const int N = tree.depth();
    const int k = family.size();

    Representation rep;
    rep.f0 = f.at(0, 0);
    if (!(rep.f0 > tol))
        throw ValueError("representation needs f_0 > 0, got " + std::to_string(rep.f0));
    for (int m = 0; m <= N; ++m)
        for (int s = 0; s < tree.atom_count(m); ++s)
            if (f.at(m, s) < -tol)
                throw ValueError("representation needs a nonnegative process; f is negative at " +
                                 to_string({m, s}));

    rep.dec = decompose(family, f, tol);

    rep.xi.resize(tree.leaf_count());
    for (int l = 0; l < tree.leaf_count(); ++l)
        rep.xi[l] = (f.at(N, l) + rep.dec.g.at(N, l)) / rep.f0;

    // f0 * E{xi | F_m} is measure-independent because f + g is a martingale
    // under every family measure; compute under the first and record the
    // worst deviation under the others.
    rep.f1bar.slices.resize(N + 1);
    for (int m = 0; m <= N; ++m) {
        rep.f1bar.slices[m] = cond_exp(family.vertex(0), rep.xi, m);
        for (double& v : rep.f1bar.slices[m]) v *= rep.f0;
    }
    double dev = 0.0;
    for (int i = 1; i < k; ++i)
        for (int m = 0; m <= N; ++m) {
            const auto vi = cond_exp(family.vertex(i), rep.xi, m);
            for (int s = 0; s < tree.atom_count(m); ++s)
                dev = std::max(dev, std::abs(vi[s] * rep.f0 - rep.f1bar.at(m, s)));
        }

    rep.f2bar.slices.resize(N + 1);
    for (int m = 0; m <= N; ++m) {
        rep.f2bar.slices[m].resize(tree.atom_count(m));
        for (int s = 0; s < tree.atom_count(m); ++s)
            rep.f2bar.slices[m][s] = -rep.dec.g.at(m, s);
    }

    rep.reconstruction_error = 0.0;
    for (int m = 0; m <= N; ++m)
        for (int s = 0; s < tree.atom_count(m); ++s)
            rep.reconstruction_error =
                std::max(rep.reconstruction_error,
                         std::abs(f.at(m, s) - (rep.f1bar.at(m, s) + rep.f2bar.at(m, s))));
    rep.reconstruction_error = std::max(rep.reconstruction_error, dev);

    rep.unit_expectation_dev = 0.0;
    for (int i = 0; i < k; ++i) {
        double e = 0.0;
        for (int l = 0; l < tree.leaf_count(); ++l)
            e += family.leaf_prob(i, l) * rep.xi[l];
        rep.unit_expectation_dev = std::max(rep.unit_expectation_dev, std::abs(e - 1.0));
    }
    return rep;
}

}  // namespace doobdec
