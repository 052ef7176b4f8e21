// Command line front end. Mathematical verdicts drive the exit code: 0 for a
// positive result, 1 for a verified negative (a failed condition, a process
// with no decomposition, a target outside the cone), 2 for unusable input.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "doobdec/conditional.hpp"
#include "doobdec/cone.hpp"
#include "doobdec/decomposition.hpp"
#include "doobdec/filtration.hpp"
#include "doobdec/gzero.hpp"
#include "doobdec/json_io.hpp"
#include "doobdec/measures.hpp"
#include "doobdec/power_density.hpp"
#include "doobdec/processes.hpp"
#include "doobdec/verify.hpp"

namespace {

using doobdec::json;

struct Options {
    std::string output = "table";
    double tolerance = 1e-9;
    bool tolerance_set = false;
    std::uint64_t seed = 12345;
    int trials = 100;

    bool json_out() const { return output == "json"; }
    // The numeric solvers keep their tighter residual budget unless the flag
    // was given explicitly.
    double solver_tol() const { return tolerance_set ? tolerance : 1e-10; }
};

std::string num(double x) {
    if (x == 0.0) x = 0.0;  // drop the sign of a negative zero
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

std::string row(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += num(v[i]);
    }
    return out;
}

void emit(const json& doc) { std::printf("%s\n", doc.dump(2).c_str()); }

json atom_json(const doobdec::AtomId& a) {
    return json{{"level", a.level}, {"index", a.index}};
}

void print_slices(const char* label, const doobdec::AdaptedProcess& f) {
    std::printf("%s:\n", label);
    for (std::size_t m = 0; m < f.slices.size(); ++m)
        std::printf("  level %zu: %s\n", m, row(f.slices[m]).c_str());
}

const char* cell_status_name(doobdec::CellStatus s) {
    switch (s) {
        case doobdec::CellStatus::feasible: return "feasible";
        case doobdec::CellStatus::infeasible: return "infeasible";
        case doobdec::CellStatus::negative_drift: return "negative_drift";
    }
    return "?";
}

json cells_json(const doobdec::RegularityReport& rep) {
    json arr = json::array();
    for (const auto& c : rep.cells)
        arr.push_back({{"level", c.level},
                       {"parent", c.parent},
                       {"status", cell_status_name(c.status)},
                       {"deficits", c.deficits},
                       {"xi", c.xi},
                       {"residual", c.residual}});
    return arr;
}

json cell_json(const doobdec::CellVerdict& c) {
    return json{{"level", c.level},
                {"parent", c.parent},
                {"status", cell_status_name(c.status)},
                {"deficits", c.deficits},
                {"xi", c.xi},
                {"residual", c.residual}};
}

// A --process argument is either a path to a process document (a bare slice
// array, or an object wrapping one under "process") or the name of a process
// embedded in the instance file.
doobdec::AdaptedProcess resolve_process(const doobdec::Instance& inst,
                                        const std::string& arg) {
    if (std::filesystem::exists(arg)) {
        json j = doobdec::load_json(arg);
        if (j.is_object()) {
            if (j.contains("schema_version") &&
                j.at("schema_version") != doobdec::kSchemaVersion)
                throw doobdec::JsonError(arg + ": unsupported schema_version " +
                                         j.at("schema_version").dump());
            if (!j.contains("process"))
                throw doobdec::JsonError(arg + ": missing \"process\"");
            return doobdec::process_from_json(j.at("process"));
        }
        return doobdec::process_from_json(j);
    }
    auto it = inst.processes.find(arg);
    if (it == inst.processes.end())
        throw doobdec::JsonError("--process: \"" + arg +
                                 "\" is neither a readable file nor a process "
                                 "embedded in the instance");
    return it->second;
}

double family_residual(const doobdec::SolutionFamily& fam,
                       const std::vector<double>& z) {
    const std::size_t k = fam.a0.size();
    double worst = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        double s = 0.0;
        for (int j = 0; j < fam.m; ++j) s += fam.a[j][c] * z[j];
        worst = std::max(worst, std::abs(s - fam.a0[c]));
    }
    return worst;
}

// Mixing-weight inequalities of the solution family: one per basis position l,
//   <a0, f_l> - sum over non-basis i of gamma_i * y_i * <a_i, f_l> > 0,
// evaluated by combine() and emitted here so consumers can test candidate
// weights without re-deriving the duals. On a finite system the weighted sums
// are finite, so the companion summability requirement holds automatically.
json gamma_constraints_json(const doobdec::SolutionFamily& fam) {
    json inequalities = json::array();
    for (int l = 0; l < fam.r; ++l) {
        const auto& f_l = fam.duals.f[l];
        double constant = 0.0;
        for (std::size_t c = 0; c < fam.a0.size(); ++c) constant += fam.a0[c] * f_l[c];
        json coeffs = json::array();
        for (std::size_t q = 0; q < fam.nonbasis.size(); ++q) {
            const int i = fam.nonbasis[q];
            double dot = 0.0;
            for (std::size_t c = 0; c < fam.a0.size(); ++c) dot += fam.a[i][c] * f_l[c];
            coeffs.push_back({{"column", i}, {"value", fam.y[q] * dot}});
        }
        inequalities.push_back(
            {{"basis_position", l}, {"constant", constant}, {"coefficients", coeffs}});
    }
    return json{{"form",
                 "constant - sum_i gamma[column_i] * value_i > 0 per basis "
                 "position, gamma indexed by non-basis column"},
                {"inequalities", inequalities},
                {"convergence", "finite system; automatically satisfied"}};
}

json solution_family_json(const doobdec::SolutionFamily& fam) {
    json solutions = json::array();
    for (std::size_t q = 0; q < fam.nonbasis.size(); ++q)
        solutions.push_back({{"column", fam.nonbasis[q]},
                             {"y", fam.y[q]},
                             {"y_default_branch", static_cast<bool>(fam.y_default_branch[q])},
                             {"z", fam.z[q]}});
    double residual = family_residual(fam, fam.z_r);
    for (const auto& z : fam.z) residual = std::max(residual, family_residual(fam, z));
    return json{{"m", fam.m},
                {"r", fam.r},
                {"basis", fam.basis},
                {"nonbasis", fam.nonbasis},
                {"duals", fam.duals.f},
                {"z_r", fam.z_r},
                {"solutions", solutions},
                {"gamma_constraints", gamma_constraints_json(fam)},
                {"max_residual", residual},
                {"a0", fam.a0},
                {"a", fam.a}};
}

void print_solution_family(const doobdec::SolutionFamily& fam) {
    std::string basis_str;
    for (int b : fam.basis) basis_str += (basis_str.empty() ? "" : " ") + std::to_string(b);
    std::printf("generators m = %d, rank r = %d, basis columns: %s\n", fam.m, fam.r,
                basis_str.c_str());
    std::printf("dual rows:\n");
    for (int l = 0; l < static_cast<int>(fam.duals.f.size()); ++l)
        std::printf("  f[%d] = %s%s\n", l, row(fam.duals.f[l]).c_str(),
                    l < fam.r ? "" : "  (complement)");
    std::printf("z_r = %s\n", row(fam.z_r).c_str());
    if (fam.nonbasis.empty()) {
        std::printf("no non-basis columns; the family is the single solution z_r\n");
    } else {
        std::printf("non-basis solutions:\n");
        for (std::size_t q = 0; q < fam.nonbasis.size(); ++q)
            std::printf("  column %d: y = %s%s, z = %s\n", fam.nonbasis[q],
                        num(fam.y[q]).c_str(),
                        fam.y_default_branch[q] ? " (default branch)" : "",
                        row(fam.z[q]).c_str());
        std::printf("mixing constraints, one per basis position l:\n");
        for (int l = 0; l < fam.r; ++l) {
            const auto& f_l = fam.duals.f[l];
            double constant = 0.0;
            for (std::size_t c = 0; c < fam.a0.size(); ++c) constant += fam.a0[c] * f_l[c];
            std::string terms;
            for (std::size_t q = 0; q < fam.nonbasis.size(); ++q) {
                const int i = fam.nonbasis[q];
                double dot = 0.0;
                for (std::size_t c = 0; c < fam.a0.size(); ++c) dot += fam.a[i][c] * f_l[c];
                if (!terms.empty()) terms += " + ";
                terms += num(fam.y[q] * dot) + "*gamma[" + std::to_string(i) + "]";
            }
            std::printf("  position %d: %s - (%s) > 0\n", l, num(constant).c_str(),
                        terms.c_str());
        }
    }
    double residual = family_residual(fam, fam.z_r);
    for (const auto& z : fam.z) residual = std::max(residual, family_residual(fam, z));
    std::printf("max equation residual over the family = %s\n", num(residual).c_str());
}

int cmd_check(const std::string& path, const Options& opt) {
    doobdec::Instance inst = doobdec::load_instance(path);
    const auto a_report = doobdec::check_condition_a(*inst.tree);

    bool family_ok = true;
    std::string family_error;
    std::optional<doobdec::MeasureFamily> family;
    try {
        family.emplace(inst.family(opt.tolerance));
    } catch (const doobdec::ValueError& e) {
        family_ok = false;
        family_error = e.what();
    } catch (const doobdec::StructureError& e) {
        family_ok = false;
        family_error = e.what();
    }

    std::optional<doobdec::EquivalenceBounds> eb;
    std::optional<doobdec::ConditionBReport> br;
    if (family_ok) {
        eb = doobdec::equivalence_bounds(*family);
        br = doobdec::check_condition_b(*family, opt.tolerance);
    }
    const bool pass = a_report.pass() && family_ok;

    if (opt.json_out()) {
        json out;
        out["schema_version"] = doobdec::kSchemaVersion;
        out["condition_a"] = {{"pass", a_report.pass()},
                              {"disjoint", a_report.disjoint},
                              {"covering", a_report.covering},
                              {"nested", a_report.nested},
                              {"minimality", a_report.minimality},
                              {"violations", a_report.violations},
                              {"minimality_note", a_report.minimality_note}};
        if (family_ok) {
            out["measures"] = {{"valid", true},
                               {"count", family->size()},
                               {"leaves", family->tree().leaf_count()}};
            out["equivalence"] = {
                {"l", eb->l},
                {"L", eb->L},
                {"eps0", eb->eps0},
                {"theorem1_factor", eb->theorem1_factor},
                {"min_ratio",
                 {{"numerator", eb->arg_min_pair[0]},
                  {"denominator", eb->arg_min_pair[1]},
                  {"leaf", eb->arg_min_leaf}}},
                {"max_ratio",
                 {{"numerator", eb->arg_max_pair[0]},
                  {"denominator", eb->arg_max_pair[1]},
                  {"leaf", eb->arg_max_leaf}}}};
            json candidates = json::array();
            for (const auto& cand : br->candidates) {
                json violations = json::array();
                for (const auto& v : cand.violations)
                    violations.push_back({{"measure", v.measure},
                                          {"parent", atom_json(v.parent)},
                                          {"child", atom_json(v.child)},
                                          {"ratio", v.ratio},
                                          {"ratio_i0", v.ratio_i0}});
                candidates.push_back({{"i0", cand.i0}, {"violations", violations}});
            }
            out["condition_b"] = {
                {"pass", br->pass()},
                {"passing_i0", br->passing_i0 ? json(*br->passing_i0) : json(nullptr)},
                {"candidates", candidates}};
        } else {
            out["measures"] = {{"valid", false}, {"error", family_error}};
        }
        out["pass"] = pass;
        emit(out);
        return pass ? 0 : 1;
    }

    std::printf("condition A: %s\n", a_report.pass() ? "pass" : "fail");
    for (const auto& v : a_report.violations) std::printf("  violation: %s\n", v.c_str());
    if (!a_report.minimality_note.empty())
        std::printf("  minimality: %s\n", a_report.minimality_note.c_str());
    if (!family_ok) {
        std::printf("measures: invalid (%s)\n", family_error.c_str());
        return 1;
    }
    std::printf("measures: k = %d on %d leaves\n", family->size(),
                family->tree().leaf_count());
    std::printf("equivalence bounds: l = %s, L = %s\n", num(eb->l).c_str(),
                num(eb->L).c_str());
    std::printf("  admissible mixing bound eps0 = %s, uniform deficit factor = %s\n",
                num(eb->eps0).c_str(), num(eb->theorem1_factor).c_str());
    std::printf("  min ratio dP[%d]/dP[%d] at leaf %d; max ratio dP[%d]/dP[%d] at leaf %d\n",
                eb->arg_min_pair[0], eb->arg_min_pair[1], eb->arg_min_leaf,
                eb->arg_max_pair[0], eb->arg_max_pair[1], eb->arg_max_leaf);
    if (br->pass())
        std::printf("condition B: passes with dominating measure i0 = %d\n",
                    *br->passing_i0);
    else
        std::printf("condition B: fails (no candidate dominates)\n");
    for (const auto& cand : br->candidates) {
        std::printf("  candidate i0 = %d: %zu violation(s)\n", cand.i0,
                    cand.violations.size());
        std::size_t shown = 0;
        for (const auto& v : cand.violations) {
            if (shown == 8) {
                std::printf("    ... and %zu more\n", cand.violations.size() - shown);
                break;
            }
            std::printf("    measure %d: transition %s -> %s is %s, candidate's is %s\n",
                        v.measure, doobdec::to_string(v.parent).c_str(),
                        doobdec::to_string(v.child).c_str(), num(v.ratio).c_str(),
                        num(v.ratio_i0).c_str());
            ++shown;
        }
    }
    std::printf("overall: %s\n", pass ? "pass" : "fail");
    return pass ? 0 : 1;
}

int cmd_decompose(const std::string& path, const std::string& process_arg,
                  const Options& opt) {
    doobdec::Instance inst = doobdec::load_instance(path);
    const auto family = inst.family(opt.tolerance);
    const auto f = resolve_process(inst, process_arg);

    try {
        const auto dec = doobdec::decompose(family, f, opt.tolerance);
        const auto cls = doobdec::classify(family, dec.martingale, opt.tolerance);
        const char* cls_name =
            cls.cls == doobdec::ProcessClass::martingale
                ? "martingale"
                : (cls.cls == doobdec::ProcessClass::supermartingale ? "supermartingale"
                                                                     : "neither");
        if (opt.json_out()) {
            json out{{"schema_version", doobdec::kSchemaVersion},
                     {"regular", true},
                     {"supermartingale", dec.report.supermartingale},
                     {"increments", dec.increments.slices},
                     {"g", dec.g.slices},
                     {"martingale", dec.martingale.slices},
                     {"martingale_class", cls_name},
                     {"cells", cells_json(dec.report)}};
            emit(out);
        } else {
            std::printf("regular: yes (%zu cells feasible)\n", dec.report.cells.size());
            print_slices("increments", dec.increments);
            print_slices("cumulative g", dec.g);
            print_slices("martingale part f + g", dec.martingale);
            std::printf("martingale part classifies as: %s\n", cls_name);
        }
        return 0;
    } catch (const doobdec::NotRegularError& e) {
        const auto* fail = e.report.first_failure();
        if (opt.json_out()) {
            json out{{"schema_version", doobdec::kSchemaVersion},
                     {"regular", false},
                     {"supermartingale", e.report.supermartingale},
                     {"error", e.what()},
                     {"cells", cells_json(e.report)}};
            if (fail) out["first_failure"] = cell_json(*fail);
            emit(out);
        } else {
            std::printf("%s\n", e.what());
            if (fail) {
                std::printf("  deficits at the failing cell: %s\n",
                            row(fail->deficits).c_str());
                std::printf("  best equality residual attainable: %s\n",
                            num(fail->residual).c_str());
            }
            std::printf("supermartingale: %s\n", e.report.supermartingale ? "yes" : "no");
        }
        return 1;
    }
}

int cmd_g0(const std::string& path, int level, const Options& opt) {
    doobdec::Instance inst = doobdec::load_instance(path);
    const auto family = inst.family(opt.tolerance);
    const int depth = family.tree().depth();
    if (level < 0) level = depth;
    if (level > depth) {
        std::fprintf(stderr, "error: --level %d exceeds the tree depth %d\n", level, depth);
        return 2;
    }

    try {
        const auto g0 = doobdec::solve_g0(family, level, opt.solver_tol());
        if (opt.json_out()) {
            json out{{"schema_version", doobdec::kSchemaVersion},
                     {"level", g0.level},
                     {"atoms", family.tree().atom_count(g0.level)},
                     {"measures", family.size()},
                     {"family", solution_family_json(g0.cone)},
                     {"xi_basic", g0.xi_basic()}};
            emit(out);
        } else {
            std::printf("unit-expectation family at level %d (%d atoms, %d measures)\n",
                        g0.level, family.tree().atom_count(g0.level), family.size());
            print_solution_family(g0.cone);
            std::printf("basic xi = %s\n", row(g0.xi_basic()).c_str());
        }
        return 0;
    } catch (const doobdec::ConeMembershipError& e) {
        if (opt.json_out())
            emit(json{{"schema_version", doobdec::kSchemaVersion},
                      {"level", level},
                      {"solvable", false},
                      {"error", e.what()}});
        else
            std::printf("no solution family at level %d: %s\n", level, e.what());
        return 1;
    }
}

int cmd_cone_solve(const std::string& path, const Options& opt) {
    json j = doobdec::load_json(path);
    if (!j.is_object() || !j.contains("a") || !j.contains("a0"))
        throw doobdec::JsonError(path + ": expected an object with \"a\" and \"a0\"");
    if (j.contains("schema_version") &&
        j.at("schema_version") != doobdec::kSchemaVersion)
        throw doobdec::JsonError(path + ": unsupported schema_version " +
                                 j.at("schema_version").dump());
    std::vector<doobdec::Vec> a;
    doobdec::Vec a0;
    try {
        a = j.at("a").get<std::vector<doobdec::Vec>>();
        a0 = j.at("a0").get<doobdec::Vec>();
    } catch (const nlohmann::json::exception& e) {
        throw doobdec::JsonError(path + ": " + e.what());
    }

    try {
        const auto fam = doobdec::solve_cone_system(a, a0, opt.solver_tol());
        if (opt.json_out()) {
            json out{{"schema_version", doobdec::kSchemaVersion},
                     {"family", solution_family_json(fam)}};
            emit(out);
        } else {
            print_solution_family(fam);
        }
        return 0;
    } catch (const doobdec::ConeMembershipError& e) {
        if (opt.json_out())
            emit(json{{"schema_version", doobdec::kSchemaVersion},
                      {"solvable", false},
                      {"error", e.what()}});
        else
            std::printf("no solution family: %s\n", e.what());
        return 1;
    }
}

int cmd_represent(const std::string& path, const std::string& process_arg,
                  const Options& opt) {
    doobdec::Instance inst = doobdec::load_instance(path);
    const auto family = inst.family(opt.tolerance);
    const auto f = resolve_process(inst, process_arg);

    try {
        const auto rep = doobdec::represent_supermartingale(family, f, opt.tolerance);
        if (opt.json_out()) {
            json out{{"schema_version", doobdec::kSchemaVersion},
                     {"f0", rep.f0},
                     {"xi", rep.xi},
                     {"unit_expectation_dev", rep.unit_expectation_dev},
                     {"f1bar", rep.f1bar.slices},
                     {"f2bar", rep.f2bar.slices},
                     {"increments", rep.dec.increments.slices},
                     {"reconstruction_error", rep.reconstruction_error}};
            emit(out);
        } else {
            std::printf("f0 = %s\n", num(rep.f0).c_str());
            std::printf("xi (leaf payoff) = %s\n", row(rep.xi).c_str());
            std::printf("unit expectation deviation = %s\n",
                        num(rep.unit_expectation_dev).c_str());
            print_slices("martingale component f1bar", rep.f1bar);
            print_slices("nonincreasing component f2bar", rep.f2bar);
            std::printf("reconstruction error |f - (f1bar + f2bar)| = %s\n",
                        num(rep.reconstruction_error).c_str());
        }
        return 0;
    } catch (const doobdec::NotRegularError& e) {
        if (opt.json_out())
            emit(json{{"schema_version", doobdec::kSchemaVersion},
                      {"representable", false},
                      {"error", e.what()}});
        else
            std::printf("no representation: %s\n", e.what());
        return 1;
    }
}

int cmd_verify(const std::string& path, const Options& opt) {
    doobdec::Instance inst = doobdec::load_instance(path);
    const auto family = inst.family(opt.tolerance);
    const auto report = doobdec::verify_lemmas(family, opt.seed, opt.trials, opt.tolerance);

    if (opt.json_out()) {
        emit(doobdec::verify_report_to_json(report));
    } else {
        std::printf("seed %llu, trials %d, condition B: %s\n",
                    static_cast<unsigned long long>(report.seed), report.trials,
                    report.condition_b ? "passes" : "fails");
        int hard = 0;
        for (const auto& c : report.checks) {
            std::string status = doobdec::check_status_name(c.status);
            if (c.status == doobdec::CheckStatus::fail) ++hard;
            if (c.conclusion_holds)
                status += *c.conclusion_holds ? " (conclusion holds)" : " (conclusion fails)";
            std::printf("  %-44s %s\n", c.name.c_str(), status.c_str());
            if (!c.details.empty()) std::printf("      %s\n", c.details.c_str());
        }
        std::printf("%zu checks, %d hard failure(s)\n", report.checks.size(), hard);
    }
    return report.all_pass() ? 0 : 1;
}

int cmd_gen_power_density(int k, const std::vector<double>& points, int depth,
                          const std::string& out_path, const Options& opt) {
    doobdec::PowerDensitySpec spec;
    spec.k = k;
    spec.points = points;
    spec.depth = depth;
    const auto built = doobdec::build_power_density(spec);
    const auto b_report = doobdec::check_condition_b(built.family, opt.tolerance);

    doobdec::Instance inst;
    inst.tree = built.tree;
    for (int i = 0; i < built.family.size(); ++i)
        inst.measure_rows.push_back(built.family.leaf_row(i));
    json intervals = json::array();
    for (const auto& [lo, hi] : built.leaf_intervals) intervals.push_back({lo, hi});
    inst.meta = json{{"generator", "power-density"},
                     {"k", k},
                     {"points", points},
                     {"depth", depth},
                     {"leaf_intervals", intervals},
                     {"cover_mass", built.cover_mass},
                     {"renormalization", built.renormalization},
                     {"condition_b_pass", b_report.pass()}};
    doobdec::save_json(out_path, doobdec::instance_to_json(inst));

    if (opt.json_out()) {
        emit(json{{"schema_version", doobdec::kSchemaVersion},
                  {"written", out_path},
                  {"kind", "power-density"},
                  {"measures", built.family.size()},
                  {"leaves", built.tree->leaf_count()},
                  {"depth", built.tree->depth()},
                  {"condition_b_pass", b_report.pass()}});
    } else {
        std::printf("wrote %s: %d measures on %d leaves, depth %d; condition B: %s\n",
                    out_path.c_str(), built.family.size(), built.tree->leaf_count(),
                    built.tree->depth(), b_report.pass() ? "passes" : "fails");
    }
    return 0;
}

// The two-measure worked instance used across the reports: the depth-2 binary
// tree, flat and tilted leaf measures, the hand-checked supermartingale, and
// the indicator sup-process whose decomposition fails at (level 2, atom 0).
int cmd_gen_worked(const std::string& out_dir, const Options& opt) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const auto tree = std::make_shared<const doobdec::FiltrationTree>(
        doobdec::FiltrationTree::build({2, 2}));

    doobdec::Instance inst;
    inst.tree = tree;
    inst.measure_rows = {{0.25, 0.25, 0.25, 0.25}, {0.3, 0.2, 0.3, 0.2}};
    inst.meta = json{{"name", "D1"}};
    const std::string instance_path = (fs::path(out_dir) / "D1.json").string();
    doobdec::save_json(instance_path, doobdec::instance_to_json(inst));

    doobdec::AdaptedProcess f;
    f.slices = {{1.0}, {1.0, 1.0}, {0.8, 1.0, 0.9, 1.0}};
    const std::string f_path = (fs::path(out_dir) / "f.json").string();
    doobdec::save_json(f_path, json{{"schema_version", doobdec::kSchemaVersion},
                                    {"process", doobdec::process_to_json(f)}});

    const auto family = inst.family(opt.tolerance);
    const std::vector<double> indicator = {1.0, 0.0, 0.0, 0.0};
    doobdec::AdaptedProcess sup;
    for (int n = 0; n <= tree->depth(); ++n)
        sup.slices.push_back(doobdec::sup_cond_exp(family, indicator, n));
    const std::string sup_path = (fs::path(out_dir) / "sup_indicator.json").string();
    doobdec::save_json(sup_path, json{{"schema_version", doobdec::kSchemaVersion},
                                      {"process", doobdec::process_to_json(sup)}});

    if (opt.json_out()) {
        emit(json{{"schema_version", doobdec::kSchemaVersion},
                  {"written", {instance_path, f_path, sup_path}}});
    } else {
        std::printf("wrote %s (instance), %s (supermartingale), %s (sup-process of the "
                    "first-leaf indicator)\n",
                    instance_path.c_str(), f_path.c_str(), sup_path.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-tree supermartingale calculus: measure-family checks, optional "
                 "decomposition, unit-expectation families, cone solving"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    app.add_option("--output", opt.output, "report format")
        ->check(CLI::IsMember({"table", "json"}))
        ->capture_default_str();
    auto* tol_opt = app.add_option("--tolerance", opt.tolerance, "input/check tolerance")
                        ->envname("DOOBDEC_TOLERANCE")
                        ->capture_default_str();
    app.add_option("--seed", opt.seed, "sampling seed")->capture_default_str();
    app.add_option("--trials", opt.trials, "sampling trials per check")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    std::string instance_path;
    std::string process_arg;
    int g0_level = -1;

    auto* check_cmd = app.add_subcommand(
        "check", "partition laws, equivalence bounds and the condition B report");
    check_cmd->add_option("instance", instance_path, "instance JSON file")->required();

    auto* decompose_cmd = app.add_subcommand(
        "decompose", "optional decomposition f = M - g of a family supermartingale");
    decompose_cmd->add_option("instance", instance_path, "instance JSON file")->required();
    decompose_cmd->add_option("--process", process_arg, "process file or embedded name")
        ->required();

    auto* g0_cmd =
        app.add_subcommand("g0", "unit-expectation solution family at one level");
    g0_cmd->add_option("instance", instance_path, "instance JSON file")->required();
    g0_cmd->add_option("--level", g0_level, "filtration level (default: the leaf level)");

    auto* cone_cmd = app.add_subcommand(
        "cone-solve", "structured nonnegative solutions of sum_j a_j x_j = a0");
    cone_cmd->add_option("system", instance_path, "JSON file with \"a\" and \"a0\"")
        ->required();

    auto* represent_cmd = app.add_subcommand(
        "represent", "two-component representation of a nonnegative regular supermartingale");
    represent_cmd->add_option("instance", instance_path, "instance JSON file")->required();
    represent_cmd->add_option("--process", process_arg, "process file or embedded name")
        ->required();

    auto* verify_cmd =
        app.add_subcommand("verify-lemmas", "run the identity and inequality harness");
    verify_cmd->add_option("instance", instance_path, "instance JSON file")->required();

    auto* gen_cmd = app.add_subcommand("gen-example", "write instance fixtures");
    gen_cmd->require_subcommand(1);
    int pd_k = 2;
    std::vector<double> pd_points;
    int pd_depth = 2;
    std::string pd_out;
    auto* pd_cmd = gen_cmd->add_subcommand(
        "power-density", "measures with densities i*x^(i-1) on a halving partition of [0,1)");
    pd_cmd->add_option("--k", pd_k, "number of measures")->capture_default_str();
    pd_cmd->add_option("--points", pd_points, "partition points, e.g. 0,0.5,0.75")
        ->delimiter(',')
        ->required();
    pd_cmd->add_option("--depth", pd_depth, "tree depth")->capture_default_str();
    pd_cmd->add_option("--out", pd_out, "output instance file")->required();
    std::string worked_dir = ".";
    auto* worked_cmd = gen_cmd->add_subcommand(
        "worked", "the D1 instance with its supermartingale and sup-process files");
    worked_cmd->add_option("--out-dir", worked_dir, "output directory")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        std::fprintf(stderr, "%s", app.help().c_str());
        return 2;
    }
    opt.tolerance_set = tol_opt->count() > 0;

    try {
        if (app.got_subcommand(check_cmd)) return cmd_check(instance_path, opt);
        if (app.got_subcommand(decompose_cmd))
            return cmd_decompose(instance_path, process_arg, opt);
        if (app.got_subcommand(g0_cmd)) return cmd_g0(instance_path, g0_level, opt);
        if (app.got_subcommand(cone_cmd)) return cmd_cone_solve(instance_path, opt);
        if (app.got_subcommand(represent_cmd))
            return cmd_represent(instance_path, process_arg, opt);
        if (app.got_subcommand(verify_cmd)) return cmd_verify(instance_path, opt);
        if (app.got_subcommand(gen_cmd)) {
            if (gen_cmd->got_subcommand(pd_cmd))
                return cmd_gen_power_density(pd_k, pd_points, pd_depth, pd_out, opt);
            if (gen_cmd->got_subcommand(worked_cmd)) return cmd_gen_worked(worked_dir, opt);
        }
    } catch (const doobdec::JsonError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const doobdec::StructureError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const doobdec::ValueError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const doobdec::DegenerateInputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const doobdec::SingularityError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
