#include <iostream>
#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tiknest/diagnostics.hpp"
#include "tiknest/experiment.hpp"

namespace py = pybind11;
using namespace tiknest;

namespace {

py::tuple command_result(int code, const std::ostringstream& out, const std::ostringstream& err) {
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Inertial gradient method with Tikhonov regularization";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidProblemError>(m, "InvalidProblemError", error.ptr());
  py::register_exception<UnboundedBelowError>(m, "UnboundedBelowError", error.ptr());
  py::register_exception<OracleFailureError>(m, "OracleFailureError", error.ptr());
  py::register_exception<IndexError>(m, "IndexError", error.ptr());
  py::register_exception<ConditionSUnsatisfiableError>(m, "ConditionSUnsatisfiableError",
                                                       error.ptr());
  py::register_exception<PreconditionError>(m, "PreconditionError", error.ptr());
  py::register_exception<DegenerateWeightError>(m, "DegenerateWeightError", error.ptr());
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", error.ptr());

  py::enum_<Variant>(m, "Variant")
      .value("full", Variant::full)
      .value("drop_eps", Variant::drop_eps)
      .value("drop_c", Variant::drop_c)
      .value("drop_both", Variant::drop_both);

  py::class_<MinNormOracle>(m, "MinNormOracle")
      .def_readonly("x_star", &MinNormOracle::x_star)
      .def_readonly("min_value", &MinNormOracle::min_value)
      .def_readonly("null_basis", &MinNormOracle::null_basis)
      .def("minimizer", &MinNormOracle::minimizer);

  py::class_<Objective>(m, "Objective")
      .def_property_readonly("name", &Objective::name)
      .def_property_readonly("dimension", &Objective::dimension)
      .def_property_readonly("lipschitz", &Objective::lipschitz)
      .def_property_readonly("lipschitz_paper", &Objective::lipschitz_paper)
      .def_property_readonly("oracle", &Objective::oracle)
      .def("value", &Objective::value)
      .def("gradient", &Objective::gradient);

  m.def("paper_quadratic", &paper_quadratic, py::arg("a"), py::arg("b"));
  m.def("shifted_quadratic", &shifted_quadratic, py::arg("u"));
  m.def("psd_quadratic", &psd_quadratic, py::arg("A"), py::arg("b"));
  m.def("tikhonov_point",
        [](const Objective& obj, double eps) { return tikhonov_point(obj, eps).point; },
        py::arg("objective"), py::arg("eps"));

  py::class_<PolyScheduleParams>(m, "PolyScheduleParams")
      .def(py::init([](double a, double q, double c, double p) {
             return PolyScheduleParams{a, q, c, p};
           }),
           py::arg("a") = 1.0, py::arg("q") = 0.8, py::arg("c") = 1.0, py::arg("p") = 1.5)
      .def_readwrite("a", &PolyScheduleParams::a)
      .def_readwrite("q", &PolyScheduleParams::q_exp)
      .def_readwrite("c", &PolyScheduleParams::c)
      .def_readwrite("p", &PolyScheduleParams::p_exp);

  py::class_<Schedule>(m, "Schedule")
      .def_static("polynomial", &Schedule::polynomial, py::arg("params"), py::arg("s"),
                  py::arg("lipschitz"))
      .def_property_readonly("s", &Schedule::s)
      .def_property_readonly("k0", &Schedule::k0)
      .def_property_readonly("k1", &Schedule::k1)
      .def_property_readonly("condition_s_holds", &Schedule::condition_s_holds)
      .def("eps_at", &Schedule::eps_at)
      .def("q_at", &Schedule::q_at);

  py::class_<QVerdict>(m, "QVerdict")
      .def_readonly("inequality", &QVerdict::inequality)
      .def_readonly("lower_bound", &QVerdict::lower_bound)
      .def_readonly("inequality_value", &QVerdict::inequality_value)
      .def_readonly("lower_bound_margin", &QVerdict::lower_bound_margin)
      .def("holds", &QVerdict::holds);

  m.def("describe_certification", &describe_certification);
  m.def("k0_poly", &k0_poly);
  m.def("check_Q", &check_Q);
  m.def("find_k2", &find_k2);
  m.def("kbar_index", &kbar_index);
  m.def("b_coef", &b_coef);
  m.def("c_coef", &c_coef);
  m.def("bp_closed_form", &bp_closed_form);
  m.def("cp_closed_form", &cp_closed_form);

  py::class_<IterateRecord>(m, "IterateRecord")
      .def_readonly("k", &IterateRecord::k)
      .def_readonly("x", &IterateRecord::x)
      .def_readonly("y", &IterateRecord::y)
      .def_readonly("f_x", &IterateRecord::f_x)
      .def_readonly("f_y", &IterateRecord::f_y)
      .def_readonly("grad_norm_x", &IterateRecord::grad_norm_x)
      .def_readonly("grad_norm_y", &IterateRecord::grad_norm_y)
      .def_readonly("velocity", &IterateRecord::velocity)
      .def_readonly("dist_xstar", &IterateRecord::dist_xstar)
      .def_readonly("eps_k", &IterateRecord::eps_k)
      .def_readonly("b_k", &IterateRecord::b_k)
      .def_readonly("c_k", &IterateRecord::c_k);

  py::class_<Trace>(m, "Trace")
      .def_readonly("summary", &Trace::summary)
      .def_readonly("variant", &Trace::variant)
      .def_readonly("records", &Trace::records)
      .def_readonly("final_x", &Trace::final_x)
      .def_readonly("iterations", &Trace::iterations)
      .def_readonly("warnings", &Trace::warnings);

  m.def(
      "run",
      [](const Objective& obj, const Schedule& sched, const Vector& x0, const Vector& x1,
         Index max_iter, Variant variant, Index record_every) {
        py::gil_scoped_release release;
        return run(SolverConfig{obj, sched, x0, x1, max_iter, variant, record_every});
      },
      py::arg("objective"), py::arg("schedule"), py::arg("x0"), py::arg("x1"),
      py::arg("max_iter") = 20, py::arg("variant") = Variant::full, py::arg("record_every") = 0);

  py::class_<ClaimVerdict>(m, "ClaimVerdict")
      .def_readonly("name", &ClaimVerdict::name)
      .def_readonly("passed", &ClaimVerdict::pass)
      .def_readonly("detail", &ClaimVerdict::detail);

  py::class_<RateReport>(m, "RateReport")
      .def_readonly("k_tail", &RateReport::k_tail)
      .def_readonly("horizon", &RateReport::horizon)
      .def_readonly("dist_xstar_final", &RateReport::dist_xstar_final)
      .def_readonly("verdicts", &RateReport::verdicts)
      .def("all_pass", &RateReport::all_pass)
      .def("get", &RateReport::get, py::return_value_policy::reference_internal)
      .def("__str__", &format_rate_report);

  m.def(
      "rate_report",
      [](const Trace& trace, const Schedule& sched, const Objective& obj) {
        return rate_report(trace, sched, obj);
      },
      py::arg("trace"), py::arg("schedule"), py::arg("objective"));

  m.def("write_trace_csv", [](const Trace& trace) {
    std::ostringstream out;
    write_trace_csv(out, trace);
    return out.str();
  });

  auto options = [](std::optional<Index> iters, bool svg, bool quiet) {
    CommandOptions o;
    o.iters = iters;
    o.svg = svg;
    o.quiet = quiet;
    return o;
  };
  m.def(
      "cmd_run",
      [options](const std::string& path, std::optional<Index> iters, bool svg, bool quiet) {
        std::ostringstream out, err;
        const int code = cmd_run(path, options(iters, svg, quiet), out, err);
        return command_result(code, out, err);
      },
      py::arg("config_path"), py::arg("iters") = py::none(), py::arg("svg") = false,
      py::arg("quiet") = false, "Returns (exit_code, stdout, stderr).");
  m.def(
      "cmd_check",
      [options](const std::string& path, std::optional<Index> iters, bool quiet) {
        std::ostringstream out, err;
        const int code = cmd_check(path, options(iters, false, quiet), out, err);
        return command_result(code, out, err);
      },
      py::arg("config_path"), py::arg("iters") = py::none(), py::arg("quiet") = false);
  m.def(
      "cmd_reproduce",
      [options](const std::string& figure, const std::string& out_dir, std::optional<Index> iters,
                bool svg, bool quiet) {
        std::ostringstream out, err;
        const int code = cmd_reproduce(figure, out_dir, options(iters, svg, quiet), out, err);
        return command_result(code, out, err);
      },
      py::arg("figure"), py::arg("out_dir"), py::arg("iters") = py::none(),
      py::arg("svg") = false, py::arg("quiet") = false);
}
