#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "phaseconv/admm.hpp"
#include "phaseconv/analysis.hpp"
#include "phaseconv/bench.hpp"
#include "phaseconv/hyperproj.hpp"
#include "phaseconv/instance_io.hpp"
#include "phaseconv/lowrank.hpp"

namespace py = pybind11;
using namespace phaseconv;

PYBIND11_MODULE(_phaseconv, m) {
  m.doc() = "Blind deconvolutional phase retrieval";

  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NoiseModelError>(m, "NoiseModelError", PyExc_ValueError);
  py::register_exception<UndefinedMetricError>(m, "UndefinedMetricError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::enum_<SubspaceMode>(m, "SubspaceMode")
      .value("GaussianRows", SubspaceMode::GaussianRows)
      .value("FourierIdentityB", SubspaceMode::FourierIdentityB)
      .value("FourierGaussian", SubspaceMode::FourierGaussian);

  py::class_<FunctionalFamily>(m, "FunctionalFamily")
      .def(py::init<Mat, Mat>(), py::arg("re"), py::arg("im") = Mat())
      .def_property_readonly("re", &FunctionalFamily::re)
      .def_property_readonly("im", &FunctionalFamily::im)
      .def("__len__", &FunctionalFamily::size)
      .def_property_readonly("dim", &FunctionalFamily::dim)
      .def("apply", &FunctionalFamily::apply, py::arg("X"))
      .def("apply_factor", &FunctionalFamily::apply_factor, py::arg("V"));

  py::class_<ProblemInstance>(m, "ProblemInstance")
      .def_readonly("m", &ProblemInstance::m)
      .def_readonly("k", &ProblemInstance::k)
      .def_readonly("n", &ProblemInstance::n)
      .def_readonly("h_true", &ProblemInstance::h_true)
      .def_readonly("m_true", &ProblemInstance::m_true)
      .def_readonly("subspace_mode", &ProblemInstance::subspace_mode)
      .def_readonly("b_rows", &ProblemInstance::b_rows)
      .def_readonly("c_rows", &ProblemInstance::c_rows)
      .def_readonly("basis_b", &ProblemInstance::basis_b)
      .def_readonly("basis_c", &ProblemInstance::basis_c)
      .def_readonly("seed", &ProblemInstance::seed)
      .def("with_signals", [](const ProblemInstance& s, Vec h, Vec mm) { return with_signals(s, h, mm); },
           py::arg("h"), py::arg("m"));

  py::class_<MeasurementSet>(m, "MeasurementSet")
      .def_static("from_magnitudes", &MeasurementSet::from_magnitudes, py::arg("y"))
      .def_readonly("y", &MeasurementSet::y)
      .def_readonly("delta", &MeasurementSet::delta)
      .def_readonly("xi", &MeasurementSet::xi);

  m.def("gen_instance", &gen_instance, py::arg("m"), py::arg("k"), py::arg("n"),
        py::arg("mode") = SubspaceMode::GaussianRows, py::arg("seed") = 1);
  m.def("forward_measure", &forward_measure, py::arg("inst"));
  m.def("forward_measure_convolution", &forward_measure_convolution, py::arg("inst"));
  m.def("add_noise", &add_noise, py::arg("meas"), py::arg("xi"));
  m.def("circular_convolve", &circular_convolve, py::arg("w"), py::arg("x"));
  m.def("save_instance", &io::save_instance, py::arg("path"), py::arg("inst"), py::arg("materialize") = true);
  m.def("load_instance", &io::load_instance, py::arg("path"));

  m.def("solve_quartic", &hyperproj::solve_quartic, py::arg("theta1"), py::arg("theta2"), py::arg("delta"));
  m.def(
      "project_point",
      [](double t1, double t2, double delta) { return hyperproj::project_point({t1, t2, delta}); },
      py::arg("theta1"), py::arg("theta2"), py::arg("delta"));
  m.def(
      "project_batch",
      [](const Vec& t1, const Vec& t2, const Vec& d) {
        Vec u1, u2;
        hyperproj::project_batch(t1, t2, d, u1, u2);
        return py::make_tuple(u1, u2);
      },
      py::arg("theta1"), py::arg("theta2"), py::arg("delta"));

  m.def("choose_rank", &lowrank::choose_rank, py::arg("m"), py::arg("d"));
  m.def(
      "eval_objective",
      [](const FunctionalFamily& f, const Vec& theta, double rho, const Mat& V) {
        return lowrank::eval_objective(lowrank::XUpdateProblem(f, theta, rho), V);
      },
      py::arg("family"), py::arg("theta"), py::arg("rho"), py::arg("V"));
  m.def(
      "eval_gradient",
      [](const FunctionalFamily& f, const Vec& theta, double rho, const Mat& V) {
        return lowrank::eval_gradient(lowrank::XUpdateProblem(f, theta, rho), V);
      },
      py::arg("family"), py::arg("theta"), py::arg("rho"), py::arg("V"));

  py::class_<admm::AdmmConfig>(m, "AdmmConfig")
      .def(py::init<>())
      .def_readwrite("rho", &admm::AdmmConfig::rho)
      .def_readwrite("max_iter", &admm::AdmmConfig::max_iter)
      .def_readwrite("tol_primal", &admm::AdmmConfig::tol_primal)
      .def_readwrite("tol_dual", &admm::AdmmConfig::tol_dual)
      .def_readwrite("rank_override", &admm::AdmmConfig::rank_override)
      .def_readwrite("deterministic", &admm::AdmmConfig::deterministic)
      .def_readwrite("residual_balancing", &admm::AdmmConfig::residual_balancing)
      .def_readwrite("init_seed", &admm::AdmmConfig::init_seed)
      .def_readwrite("record_history", &admm::AdmmConfig::record_history);

  py::class_<admm::ErrorMetrics>(m, "ErrorMetrics")
      .def_readonly("alpha", &admm::ErrorMetrics::alpha)
      .def_readonly("lifted_error", &admm::ErrorMetrics::lifted_error)
      .def_readonly("h_error", &admm::ErrorMetrics::h_error)
      .def_readonly("m_error", &admm::ErrorMetrics::m_error)
      .def_readonly("success", &admm::ErrorMetrics::success)
      .def("signal_error", &admm::ErrorMetrics::signal_error);

  py::class_<admm::SolveReport>(m, "SolveReport")
      .def_property_readonly("H_hat", [](const admm::SolveReport& r) { return r.H_hat.dense(); })
      .def_property_readonly("M_hat", [](const admm::SolveReport& r) { return r.M_hat.dense(); })
      .def_property_readonly("V1", [](const admm::SolveReport& r) { return r.H_hat.V; })
      .def_property_readonly("V2", [](const admm::SolveReport& r) { return r.M_hat.V; })
      .def_readonly("h_hat", &admm::SolveReport::h_hat)
      .def_readonly("m_hat", &admm::SolveReport::m_hat)
      .def_readonly("objective", &admm::SolveReport::objective)
      .def_readonly("errors", &admm::SolveReport::errors)
      .def_readonly("converged", &admm::SolveReport::converged)
      .def_readonly("iterations", &admm::SolveReport::iterations)
      .def_readonly("primal_residual", &admm::SolveReport::primal_residual)
      .def_readonly("dual_residual", &admm::SolveReport::dual_residual)
      .def_readonly("primal_history", &admm::SolveReport::primal_history);

  m.def("solve", &admm::solve, py::arg("meas"), py::arg("functionals_b"), py::arg("functionals_c"),
        py::arg("config") = admm::AdmmConfig{}, py::call_guard<py::gil_scoped_release>());
  m.def("solve_instance", &admm::solve_instance, py::arg("inst"), py::arg("meas"),
        py::arg("config") = admm::AdmmConfig{}, py::call_guard<py::gil_scoped_release>());

  m.def(
      "surrogate_f",
      [](double u, double v, double y_sq, double mm, double gamma_cap) {
        return analysis::surrogate_f(u, v, {y_sq, mm, gamma_cap});
      },
      py::arg("u"), py::arg("v"), py::arg("y_sq"), py::arg("m"), py::arg("gamma_cap") = 1.0);

  m.def("trial_seed", &bench::trial_seed, py::arg("base_seed"), py::arg("m"), py::arg("k"), py::arg("n"),
        py::arg("trial"));
  m.attr("NOISE_BOUND_CONSTANT") = bench::kNoiseBoundConstant;
}
