#include <sstream>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "canard/cli.hpp"
#include "canard/errors.hpp"
#include "canard/measures.hpp"
#include "canard/relation.hpp"
#include "canard/sdi.hpp"
#include "canard/sim.hpp"

namespace py = pybind11;
using namespace canard;

namespace {

std::shared_ptr<const SdiEvaluator> evaluator(const LienardSystem& system) {
    return std::make_shared<const SdiEvaluator>(system);
}

py::tuple run_cli(const std::vector<std::string>& args) {
    std::vector<std::string> full{"canard-lab"};
    full.insert(full.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : full) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = 0;
    {
        py::gil_scoped_release release;
        code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Slow divergence integrals, slow relations and canard transport for Lienard systems";

    auto error = py::register_exception<Error>(m, "CanardError", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", error.ptr());
    py::register_exception<RangeError>(m, "RangeError", error.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
    py::register_exception<SingularityError>(m, "SingularityError", error.ptr());
    auto numeric = py::register_exception<NumericError>(m, "NumericError", error.ptr());
    py::register_exception<BracketError>(m, "BracketError", numeric.ptr());
    py::register_exception<StiffnessError>(m, "StiffnessError", numeric.ptr());

    py::class_<Interval>(m, "Interval")
        .def(py::init<double, double>(), py::arg("lo"), py::arg("hi"))
        .def_readwrite("lo", &Interval::lo)
        .def_readwrite("hi", &Interval::hi)
        .def("__repr__", [](const Interval& i) {
            return "Interval(" + std::to_string(i.lo) + ", " + std::to_string(i.hi) + ")";
        });

    py::class_<LienardSystem>(m, "LienardSystem")
        .def(py::init(&LienardSystem::from_text), py::arg("f"), py::arg("p"), py::arg("x_min"), py::arg("x_max"))
        .def_property_readonly("n", [](const LienardSystem& s) { return s.orders().n; })
        .def_property_readonly("m", [](const LienardSystem& s) { return s.orders().m; })
        .def_property_readonly("domain", &LienardSystem::domain)
        .def("f", &LienardSystem::f_at)
        .def("p", &LienardSystem::p_at)
        .def("attracting_height", &LienardSystem::attracting_height)
        .def("repelling_height", &LienardSystem::repelling_height)
        .def("validate", [](const LienardSystem& s) {
            const auto r = validate(s);
            return py::make_tuple(r.all_pass(), r.to_text());
        });

    py::enum_<Branch>(m, "Branch").value("attracting", Branch::attracting).value("repelling", Branch::repelling);

    py::class_<SdiEvaluator, std::shared_ptr<SdiEvaluator>>(m, "SdiEvaluator")
        .def(py::init<LienardSystem>(), py::arg("system"))
        .def("minus", &SdiEvaluator::minus)
        .def("plus", &SdiEvaluator::plus)
        .def("total", &SdiEvaluator::total)
        .def("derivative", &SdiEvaluator::derivative, py::arg("s"), py::arg("side"))
        .def("max_height", &SdiEvaluator::max_height);

    py::class_<SlowRelation>(m, "SlowRelation")
        .def_static(
            "single_section",
            [](const LienardSystem& system, double s0) { return SlowRelation::single_section(evaluator(system), s0); },
            py::arg("system"), py::arg("s0"))
        .def_static(
            "two_section",
            [](const LienardSystem& system, double s_c_minus, double s_c_plus, Interval entry) {
                return SlowRelation::two_section(evaluator(system), s_c_minus, s_c_plus, entry);
            },
            py::arg("system"), py::arg("s_c_minus"), py::arg("s_c_plus"), py::arg("entry"))
        .def("__call__", &SlowRelation::operator())
        .def_property_readonly("orientation", [](const SlowRelation& r) { return to_string(r.orientation()); })
        .def_property_readonly("transit_case", [](const SlowRelation& r) { return to_string(r.transit_case()); })
        .def_property_readonly("buffer", &SlowRelation::buffer)
        .def("sign_law", &SlowRelation::sign_law)
        .def("s0_map", [](const SlowRelation& r, double s) { return r.two_section(s); })
        .def("inverse", &SlowRelation::inverse)
        .def("limit_map", &SlowRelation::limit_map)
        .def("exit_interval", &SlowRelation::exit_interval);

    m.def(
        "buffer_point",
        [](const LienardSystem& system, double s_c_minus, double s_c_plus) {
            return buffer_point(*evaluator(system), s_c_minus, s_c_plus);
        },
        py::arg("system"), py::arg("s_c_minus"), py::arg("s_c_plus"));

    m.def(
        "invariant_measures",
        [](const LienardSystem& system, Interval range) {
            const auto mc = classify_invariant_measures(*evaluator(system), range);
            py::dict d;
            d["atoms"] = mc.atoms;
            d["uniquely_ergodic"] = mc.uniquely_ergodic;
            d["every_measure_invariant"] = mc.every_measure_invariant;
            return d;
        },
        py::arg("system"), py::arg("range"));

    m.def(
        "iterate_orbit",
        [](const SlowRelation& r, double s, int max_iter) {
            const auto o = iterate_orbit(r, s, max_iter);
            return py::make_tuple(o.limit, o.steps, o.converged, o.monotone);
        },
        py::arg("relation"), py::arg("s"), py::arg("max_iter") = 100000);

    m.def(
        "exit_measure",
        [](const SlowRelation& r) {
            const auto entry = make_entry({EntryKind::uniform, r.entry_interval()});
            const auto rep = pushforward_report(entry, r);
            std::vector<double> nodes;
            for (std::size_t i = 0; i < rep.measure.node_count(); ++i) nodes.push_back(rep.measure.node(i));
            std::vector<std::pair<double, double>> atoms;
            for (const auto& a : rep.measure.atoms()) atoms.emplace_back(a.location, a.mass);
            py::dict d;
            d["s"] = nodes;
            d["density"] = rep.measure.values();
            d["atoms"] = atoms;
            d["mass"] = rep.analytic_mass;
            return d;
        },
        py::arg("relation"), "Limit exit measure of the uniform entry on the relation's entry interval.");

    m.def(
        "control_lambda",
        [](const LienardSystem& system, double eps, double s_c_minus, double s_c_plus) {
            SimConfig cfg;
            cfg.eps = eps;
            std::tie(cfg.x_sigma_minus, cfg.x_sigma_plus) = default_sections(system, s_c_minus, s_c_plus);
            py::gil_scoped_release release;
            return find_control_lambda(system, cfg, s_c_minus, s_c_plus, default_bracket(eps)).lambda_c;
        },
        py::arg("system"), py::arg("eps"), py::arg("s_c_minus"), py::arg("s_c_plus"));

    m.def("run_cli", &run_cli, py::arg("args"), "Runs canard-lab in-process; returns (exit_code, stdout, stderr).");
}
