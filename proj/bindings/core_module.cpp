// Python bindings for the core operations: trees, measure families, the
// conditional-expectation calculus, decomposition, the cone solver, the
// unit-expectation families and the lemma harness. Thin by design; structs
// come through as readonly attribute bags and processes as slice lists.

#include <memory>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "doobdec/conditional.hpp"
#include "doobdec/cone.hpp"
#include "doobdec/decomposition.hpp"
#include "doobdec/gzero.hpp"
#include "doobdec/json_io.hpp"
#include "doobdec/measures.hpp"
#include "doobdec/power_density.hpp"
#include "doobdec/processes.hpp"
#include "doobdec/verify.hpp"

namespace py = pybind11;
using namespace doobdec;

namespace {

std::shared_ptr<FiltrationTree> copy_tree(const std::shared_ptr<const FiltrationTree>& t) {
    return std::make_shared<FiltrationTree>(*t);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "supermartingales relative to finite families of equivalent measures "
              "on filtration trees";

    py::register_exception<NotRegularError>(m, "NotRegularError");
    py::register_exception<ConeMembershipError>(m, "ConeMembershipError");
    py::register_exception<NoKernelError>(m, "NoKernelError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const JsonError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const StructureError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const doobdec::ValueError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const DegenerateInputError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    py::class_<AtomId>(m, "AtomId")
        .def(py::init([](int level, int index) { return AtomId{level, index}; }),
             py::arg("level"), py::arg("index"))
        .def_readonly("level", &AtomId::level)
        .def_readonly("index", &AtomId::index)
        .def("__repr__", [](const AtomId& a) { return to_string(a); })
        .def("__eq__", [](const AtomId& a, const AtomId& b) { return a == b; });

    py::class_<FiltrationTree, std::shared_ptr<FiltrationTree>>(m, "FiltrationTree")
        .def_static(
            "build",
            [](const std::vector<int>& counts) {
                return std::make_shared<FiltrationTree>(FiltrationTree::build(counts));
            },
            py::arg("counts"), "uniform branching: counts[n] children per level-n atom")
        .def_static(
            "build_general",
            [](const std::vector<std::vector<int>>& counts) {
                return std::make_shared<FiltrationTree>(
                    FiltrationTree::build_general(counts));
            },
            py::arg("counts_per_atom"))
        .def("depth", &FiltrationTree::depth)
        .def("atom_count", &FiltrationTree::atom_count, py::arg("level"))
        .def("leaf_count", &FiltrationTree::leaf_count)
        .def("children", &FiltrationTree::children, py::arg("level"), py::arg("index"))
        .def("parent", &FiltrationTree::parent, py::arg("level"), py::arg("index"))
        .def("leaves_under", &FiltrationTree::leaves_under, py::arg("level"),
             py::arg("index"));

    py::class_<ConditionAReport>(m, "ConditionAReport")
        .def_readonly("disjoint", &ConditionAReport::disjoint)
        .def_readonly("covering", &ConditionAReport::covering)
        .def_readonly("nested", &ConditionAReport::nested)
        .def_readonly("minimality", &ConditionAReport::minimality)
        .def_readonly("violations", &ConditionAReport::violations)
        .def_readonly("minimality_note", &ConditionAReport::minimality_note)
        .def("passes", &ConditionAReport::pass);
    m.def(
        "check_condition_a",
        [](const std::shared_ptr<FiltrationTree>& t) { return check_condition_a(*t); },
        py::arg("tree"));

    py::class_<Measure>(m, "Measure")
        .def_readonly("leaf_probs", &Measure::leaf_probs)
        .def("atom_prob", &Measure::atom_prob, py::arg("level"), py::arg("index"));

    py::class_<MeasureFamily>(m, "MeasureFamily")
        .def_static(
            "create",
            [](const std::shared_ptr<FiltrationTree>& tree,
               std::vector<std::vector<double>> rows, double tol) {
                return MeasureFamily::create(tree, std::move(rows), tol);
            },
            py::arg("tree"), py::arg("rows"), py::arg("tol") = 1e-9)
        .def("size", &MeasureFamily::size)
        .def("tree", [](const MeasureFamily& f) { return copy_tree(f.tree_ptr()); })
        .def("leaf_prob", &MeasureFamily::leaf_prob, py::arg("measure"), py::arg("leaf"))
        .def("leaf_row", &MeasureFamily::leaf_row, py::arg("measure"))
        .def("atom_prob", &MeasureFamily::atom_prob, py::arg("measure"),
             py::arg("level"), py::arg("index"))
        .def("child_prob", &MeasureFamily::child_prob, py::arg("measure"),
             py::arg("parent_level"), py::arg("parent_index"), py::arg("child_index"))
        .def("vertex", &MeasureFamily::vertex, py::arg("measure"));

    py::class_<EquivalenceBounds>(m, "EquivalenceBounds")
        .def_readonly("l", &EquivalenceBounds::l)
        .def_readonly("L", &EquivalenceBounds::L)
        .def_readonly("eps0", &EquivalenceBounds::eps0)
        .def_readonly("theorem1_factor", &EquivalenceBounds::theorem1_factor);
    m.def("equivalence_bounds", &equivalence_bounds, py::arg("family"));

    py::class_<ConditionBViolation>(m, "ConditionBViolation")
        .def_readonly("measure", &ConditionBViolation::measure)
        .def_readonly("parent", &ConditionBViolation::parent)
        .def_readonly("child", &ConditionBViolation::child)
        .def_readonly("ratio", &ConditionBViolation::ratio)
        .def_readonly("ratio_i0", &ConditionBViolation::ratio_i0);
    py::class_<ConditionBCandidate>(m, "ConditionBCandidate")
        .def_readonly("i0", &ConditionBCandidate::i0)
        .def_readonly("violations", &ConditionBCandidate::violations);
    py::class_<ConditionBReport>(m, "ConditionBReport")
        .def_readonly("candidates", &ConditionBReport::candidates)
        .def_readonly("passing_i0", &ConditionBReport::passing_i0)
        .def("passes", &ConditionBReport::pass);
    m.def("check_condition_b", &check_condition_b, py::arg("family"),
          py::arg("tol") = 1e-9);

    m.def("mixture", &mixture, py::arg("family"), py::arg("weights"),
          py::arg("tol") = 1e-9);
    m.def("rn_conditional", &rn_conditional, py::arg("family"), py::arg("i"),
          py::arg("l"), py::arg("n"));

    m.def("cond_exp", &cond_exp, py::arg("measure"), py::arg("xi"), py::arg("n"),
          "E^P{xi | F_n}, one value per level-n atom");
    m.def("cond_exp_mixture", &cond_exp_mixture, py::arg("family"), py::arg("weights"),
          py::arg("xi"), py::arg("n"));
    m.def("sup_cond_exp", &sup_cond_exp, py::arg("family"), py::arg("xi"), py::arg("n"));
    m.def("measure_change_kernel", &measure_change_kernel, py::arg("family"),
          py::arg("i"), py::arg("l"), py::arg("n"));

    py::class_<AdaptedProcess>(m, "AdaptedProcess")
        .def(py::init([](std::vector<std::vector<double>> slices) {
                 return AdaptedProcess{std::move(slices)};
             }),
             py::arg("slices"))
        .def_readwrite("slices", &AdaptedProcess::slices)
        .def("depth", &AdaptedProcess::depth)
        .def("at", &AdaptedProcess::at, py::arg("level"), py::arg("index"));
    py::implicitly_convertible<py::sequence, AdaptedProcess>();

    py::enum_<ProcessClass>(m, "ProcessClass")
        .value("martingale", ProcessClass::martingale)
        .value("supermartingale", ProcessClass::supermartingale)
        .value("neither", ProcessClass::neither);
    py::class_<ClassifyWitness>(m, "ClassifyWitness")
        .def_readonly("measure", &ClassifyWitness::measure)
        .def_readonly("level", &ClassifyWitness::level)
        .def_readonly("parent", &ClassifyWitness::parent)
        .def_readonly("lhs", &ClassifyWitness::lhs)
        .def_readonly("rhs", &ClassifyWitness::rhs);
    py::class_<ClassifyResult>(m, "ClassifyResult")
        .def_readonly("cls", &ClassifyResult::cls)
        .def_readonly("witness", &ClassifyResult::witness);
    m.def("classify", &classify, py::arg("family"), py::arg("f"), py::arg("tol") = 1e-9);
    m.def(
        "stop",
        [](const std::shared_ptr<FiltrationTree>& t, const AdaptedProcess& f, int k) {
            return stop(*t, f, k);
        },
        py::arg("tree"), py::arg("f"), py::arg("k"));

    py::class_<Theorem1Report>(m, "Theorem1Report")
        .def_readonly("hypothesis_ok", &Theorem1Report::hypothesis_ok)
        .def_readonly("bound_ok", &Theorem1Report::bound_ok)
        .def_readonly("factor", &Theorem1Report::factor)
        .def_readonly("min_margin", &Theorem1Report::min_margin)
        .def_readonly("trials", &Theorem1Report::trials)
        .def_readonly("hypothesis_witness", &Theorem1Report::hypothesis_witness);
    m.def("theorem1_bound_check", &theorem1_bound_check, py::arg("family"), py::arg("f"),
          py::arg("m0"), py::arg("phi"), py::arg("trials"), py::arg("seed"),
          py::arg("tol") = 1e-9,
          "one-step deficits under the first measure survive admissible mixing "
          "at factor l/(1+L)");

    py::enum_<CellStatus>(m, "CellStatus")
        .value("feasible", CellStatus::feasible)
        .value("infeasible", CellStatus::infeasible)
        .value("negative_drift", CellStatus::negative_drift);
    py::class_<CellVerdict>(m, "CellVerdict")
        .def_readonly("level", &CellVerdict::level)
        .def_readonly("parent", &CellVerdict::parent)
        .def_readonly("status", &CellVerdict::status)
        .def_readonly("deficits", &CellVerdict::deficits)
        .def_readonly("xi", &CellVerdict::xi)
        .def_readonly("residual", &CellVerdict::residual);
    py::class_<RegularityReport>(m, "RegularityReport")
        .def_readonly("regular", &RegularityReport::regular)
        .def_readonly("supermartingale", &RegularityReport::supermartingale)
        .def_readonly("cells", &RegularityReport::cells);
    m.def("test_regularity", &test_regularity, py::arg("family"), py::arg("f"),
          py::arg("tol") = 1e-9);
    m.def("solve_drift_cell", &solve_drift_cell, py::arg("child_probs"),
          py::arg("deficits"), py::arg("tol") = 1e-9);

    py::class_<Decomposition>(m, "Decomposition")
        .def_readonly("increments", &Decomposition::increments)
        .def_readonly("g", &Decomposition::g)
        .def_readonly("martingale", &Decomposition::martingale)
        .def_readonly("report", &Decomposition::report);
    m.def("decompose", &decompose, py::arg("family"), py::arg("f"),
          py::arg("tol") = 1e-9,
          "optional decomposition f = martingale - g; raises NotRegularError "
          "when some drift-matching cell is infeasible");
    m.def("psi_residuals", &psi_residuals, py::arg("family"), py::arg("f"),
          py::arg("increments"), py::arg("j"));

    py::class_<SupProcessRegularity>(m, "SupProcessRegularity")
        .def_readonly("expectations", &SupProcessRegularity::expectations)
        .def_readonly("expectations_equal", &SupProcessRegularity::expectations_equal)
        .def_readonly("sup_process", &SupProcessRegularity::sup_process)
        .def_readonly("sup_class", &SupProcessRegularity::sup_class)
        .def_readonly("regularity", &SupProcessRegularity::regularity)
        .def_readonly("feasible_with_zero_g", &SupProcessRegularity::feasible_with_zero_g)
        .def_readonly("iff_holds", &SupProcessRegularity::iff_holds)
        .def_readonly("failure_at", &SupProcessRegularity::failure_at);
    m.def("sup_process_regularity", &sup_process_regularity, py::arg("family"),
          py::arg("xi"), py::arg("tol") = 1e-9);

    py::enum_<ConeLocation>(m, "ConeLocation")
        .value("interior", ConeLocation::interior)
        .value("boundary", ConeLocation::boundary)
        .value("outside", ConeLocation::outside);
    py::class_<MembershipResult>(m, "MembershipResult")
        .def_readonly("location", &MembershipResult::location)
        .def_readonly("certificate", &MembershipResult::certificate)
        .def_readonly("min_coefficient", &MembershipResult::min_coefficient);
    m.def("cone_membership", &cone_membership, py::arg("a"), py::arg("a0"),
          py::arg("tol") = 1e-10);
    m.def("nonnegative_solution",
          [](const std::vector<Vec>& a, const Vec& a0, double tol) {
              double residual = 0.0;
              auto sol = nonnegative_solution(a, a0, tol, &residual);
              return py::make_tuple(sol, residual);
          },
          py::arg("a"), py::arg("a0"), py::arg("tol") = 1e-10,
          "returns (solution or None, best attainable residual)");

    py::class_<DualBasis>(m, "DualBasis")
        .def_readonly("r", &DualBasis::r)
        .def_readonly("k", &DualBasis::k)
        .def_readonly("f", &DualBasis::f);
    m.def("dual_basis", &dual_basis, py::arg("basis_vectors"), py::arg("tol") = 1e-10);

    py::class_<SolutionFamily>(m, "SolutionFamily")
        .def_readonly("m", &SolutionFamily::m)
        .def_readonly("r", &SolutionFamily::r)
        .def_readonly("basis", &SolutionFamily::basis)
        .def_readonly("nonbasis", &SolutionFamily::nonbasis)
        .def_readonly("duals", &SolutionFamily::duals)
        .def_readonly("z_r", &SolutionFamily::z_r)
        .def_readonly("z", &SolutionFamily::z)
        .def_readonly("y", &SolutionFamily::y)
        .def_readonly("y_default_branch", &SolutionFamily::y_default_branch)
        .def_readonly("a0", &SolutionFamily::a0)
        .def_readonly("a", &SolutionFamily::a);
    m.def("solve_cone_system", &solve_cone_system, py::arg("a"), py::arg("a0"),
          py::arg("tol") = 1e-10);

    py::class_<CombineResult>(m, "CombineResult")
        .def_readonly("z", &CombineResult::z)
        .def_readonly("strictly_positive", &CombineResult::strictly_positive)
        .def_readonly("margins", &CombineResult::margins)
        .def_readonly("violated", &CombineResult::violated)
        .def_readonly("residual", &CombineResult::residual);
    m.def("combine", &combine, py::arg("family"), py::arg("gamma"),
          py::arg("tol") = 1e-10);

    py::class_<HomogeneousResult>(m, "HomogeneousResult")
        .def_readonly("u", &HomogeneousResult::u)
        .def_readonly("t", &HomogeneousResult::t)
        .def_readonly("xi", &HomogeneousResult::xi)
        .def_readonly("proportionality", &HomogeneousResult::proportionality);
    m.def("homogeneous_solution", &homogeneous_solution, py::arg("a"),
          py::arg("a0") = std::nullopt, py::arg("tol") = 1e-10);

    py::class_<GZeroFamily>(m, "GZeroFamily")
        .def_readonly("level", &GZeroFamily::level)
        .def_readonly("cone", &GZeroFamily::cone)
        .def("xi_basic", &GZeroFamily::xi_basic);
    m.def("solve_g0", &solve_g0, py::arg("family"), py::arg("n"),
          py::arg("tol") = 1e-10,
          "nonnegative solutions of the level-n unit-expectation moment system");

    py::class_<CandidateMartingale>(m, "CandidateMartingale")
        .def_readonly("M", &CandidateMartingale::M)
        .def_readonly("max_cross_measure_dev", &CandidateMartingale::max_cross_measure_dev);
    m.def("martingale_from_xi", &martingale_from_xi, py::arg("family"),
          py::arg("xi_leaf"), py::arg("tol") = 1e-9);

    py::class_<GeneratorResult>(m, "GeneratorResult")
        .def_readonly("h", &GeneratorResult::h)
        .def_readonly("increments", &GeneratorResult::increments)
        .def_readonly("patched", &GeneratorResult::patched)
        .def_readonly("patched_martingale", &GeneratorResult::patched_martingale)
        .def_readonly("h_regular", &GeneratorResult::h_regular)
        .def_readonly("cross_measure_dev", &GeneratorResult::cross_measure_dev);
    m.def("local_regular_generator", &local_regular_generator, py::arg("family"),
          py::arg("f"), py::arg("xi_leaf"), py::arg("tol") = 1e-9);
    m.def("class_k_combination", &class_k_combination, py::arg("family"), py::arg("fs"),
          py::arg("xis"), py::arg("coeffs"), py::arg("tol") = 1e-9);

    py::class_<Representation>(m, "Representation")
        .def_readonly("f0", &Representation::f0)
        .def_readonly("xi", &Representation::xi)
        .def_readonly("f1bar", &Representation::f1bar)
        .def_readonly("f2bar", &Representation::f2bar)
        .def_readonly("dec", &Representation::dec)
        .def_readonly("reconstruction_error", &Representation::reconstruction_error)
        .def_readonly("unit_expectation_dev", &Representation::unit_expectation_dev);
    m.def("represent_supermartingale", &represent_supermartingale, py::arg("family"),
          py::arg("f"), py::arg("tol") = 1e-9);

    py::class_<PowerDensityInstance>(m, "PowerDensityInstance")
        .def("tree", [](const PowerDensityInstance& p) { return copy_tree(p.tree); })
        .def_readonly("family", &PowerDensityInstance::family)
        .def_readonly("leaf_intervals", &PowerDensityInstance::leaf_intervals)
        .def_readonly("cover_mass", &PowerDensityInstance::cover_mass)
        .def_readonly("renormalization", &PowerDensityInstance::renormalization);
    m.def(
        "build_power_density",
        [](int k, const std::vector<double>& points, int depth) {
            return build_power_density(PowerDensitySpec{k, points, depth});
        },
        py::arg("k") = 2, py::arg("points") = std::vector<double>{0.0, 0.5},
        py::arg("depth") = 2,
        "measures P_i([a,b)) = b^i - a^i on interval atoms, halved per level");

    py::class_<Instance>(m, "Instance")
        .def("tree", [](const Instance& i) { return copy_tree(i.tree); })
        .def_readonly("measure_rows", &Instance::measure_rows)
        .def_readonly("processes", &Instance::processes)
        .def_readonly("random_variables", &Instance::random_variables)
        .def("family", &Instance::family, py::arg("tol") = 1e-9)
        .def("meta_json", [](const Instance& i) -> py::object {
            if (i.meta.is_null()) return py::none();
            return py::str(i.meta.dump());
        });
    m.def("load_instance", &load_instance, py::arg("path"));

    m.def(
        "verify_lemmas_json",
        [](const MeasureFamily& family, std::uint64_t seed, int trials, double tol) {
            return verify_report_to_json(verify_lemmas(family, seed, trials, tol)).dump(2);
        },
        py::arg("family"), py::arg("seed"), py::arg("trials"), py::arg("tol") = 1e-9,
        "run every lemma check and return the report as a JSON string; "
        "deterministic in (instance, seed, trials)");
}
