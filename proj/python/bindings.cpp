#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nhdyn/biortho.hpp"
#include "nhdyn/eigenstate.hpp"
#include "nhdyn/errors.hpp"
#include "nhdyn/fermion.hpp"
#include "nhdyn/gamma.hpp"
#include "nhdyn/nonlinear_flow.hpp"
#include "nhdyn/scenario.hpp"

namespace py = pybind11;
using namespace nhdyn;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Heisenberg-picture dynamics for non-Hermitian Hamiltonians";

  auto base = py::register_exception<Error>(m, "Error");
  auto validation = py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", validation.ptr());
  py::register_exception<NumericRangeError>(m, "NumericRangeError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
  py::register_exception<DegenerateSpectrumError>(m, "DegenerateSpectrumError", base.ptr());
  py::register_exception<TruncationError>(m, "TruncationError", base.ptr());
  py::register_exception<InstabilityError>(m, "InstabilityError", base.ptr());
  py::register_exception<CertificationError>(m, "CertificationError", base.ptr());
  py::register_exception<ClosedFormUnavailable>(m, "ClosedFormUnavailable", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  m.def("expm", &expm, py::arg("a"));
  m.def("op_norm", &op_norm, py::arg("a"));
  m.def("nullspace", &nullspace, py::arg("l"), py::arg("rank_tol_rel") = kDefaultRankTolRel);
  m.def("kron", &kron, py::arg("a"), py::arg("b"), py::arg("max_entries") = kDefaultMaxKronEntries);
  m.def(
      "eig_general",
      [](const ComplexMatrix& a, double tol) {
        const Spectrum s = eig_general(a, tol);
        return py::make_tuple(s.eigenvalues, s.right_vectors, s.condition_estimate);
      },
      py::arg("a"), py::arg("tol_eig") = kDefaultTolEig,
      "Returns (eigenvalues, right eigenvectors, condition estimate of V).");

  py::class_<BiorthogonalSystem>(m, "BiorthogonalSystem")
      .def_readonly("eigenvalues", &BiorthogonalSystem::eigenvalues)
      .def_readonly("phi", &BiorthogonalSystem::phi)
      .def_readonly("psi", &BiorthogonalSystem::psi)
      .def_readonly("s_phi", &BiorthogonalSystem::s_phi)
      .def_readonly("s_psi", &BiorthogonalSystem::s_psi)
      .def_readonly("condition", &BiorthogonalSystem::condition)
      .def_readonly("non_real_spectrum", &BiorthogonalSystem::non_real_spectrum);
  m.def("build_biorthogonal", &build_biorthogonal, py::arg("h"),
        py::arg("tol_distinct") = kDefaultTolDistinct);

  m.def(
      "gamma_t",
      [](const ComplexMatrix& h, const ComplexMatrix& x, double t) {
        return gamma_t(GammaContext(h), x, t);
      },
      py::arg("h"), py::arg("x"), py::arg("t"));
  m.def(
      "delta_gamma",
      [](const ComplexMatrix& h, const ComplexMatrix& x) { return delta_gamma(GammaContext(h), x); },
      py::arg("h"), py::arg("x"));
  m.def(
      "gamma_series",
      [](const ComplexMatrix& h, const ComplexMatrix& x, double t, double tol, std::size_t cap) {
        const SeriesResult r = gamma_series(GammaContext(h), x, t, tol, cap);
        return py::make_tuple(r.value, r.terms_used, r.tail_bound);
      },
      py::arg("h"), py::arg("x"), py::arg("t"), py::arg("tol_trunc") = kDefaultTolTrunc,
      py::arg("cap") = kDefaultSeriesCap);
  m.def(
      "gamma_symmetry_basis",
      [](const ComplexMatrix& h, double rank_tol_rel) {
        return gamma_symmetry_basis(GammaContext(h), rank_tol_rel).generators;
      },
      py::arg("h"), py::arg("rank_tol_rel") = kDefaultRankTolRel);

  py::class_<StateTrajectory>(m, "StateTrajectory")
      .def_readonly("t_grid", &StateTrajectory::t_grid)
      .def_readonly("psi", &StateTrajectory::psi)
      .def_readonly("psi_hat", &StateTrajectory::psi_hat)
      .def_readonly("norm_sq", &StateTrajectory::norm_sq);
  m.def("uniform_grid", &uniform_grid, py::arg("t_start"), py::arg("t_end"), py::arg("points"));
  m.def(
      "exact_trajectory",
      [](const ComplexMatrix& h, const ComplexVector& psi0, const std::vector<double>& grid) {
        return exact_trajectory(h, psi0, grid);
      },
      py::arg("h"), py::arg("psi0"), py::arg("t_grid"));
  m.def("h_nl", &h_nl, py::arg("h"), py::arg("psi_hat"));
  m.def("non_hermitian_scalar", &non_hermitian_scalar, py::arg("h"), py::arg("psi"));

  py::class_<ClassificationReport>(m, "ClassificationReport")
      .def_readonly("observable_name", &ClassificationReport::observable_name)
      .def_readonly("in_c_gamma", &ClassificationReport::in_c_gamma)
      .def_readonly("in_c_psi_hat", &ClassificationReport::in_c_psi_hat)
      .def_readonly("in_c_psi_hat_weak", &ClassificationReport::in_c_psi_hat_weak)
      .def_readonly("c_gamma", &ClassificationReport::c_gamma)
      .def_readonly("c_psi_hat", &ClassificationReport::c_psi_hat)
      .def_readonly("c_psi_hat_weak", &ClassificationReport::c_psi_hat_weak);
  m.def("classify", &classify, py::arg("h"), py::arg("x"), py::arg("trajectory"),
        py::arg("tol_class") = kDefaultTolClass, py::arg("name") = "X");

  m.def(
      "beta_series",
      [](const ComplexMatrix& h, Eigen::Index k0, const ComplexMatrix& x, double t) {
        return beta_series(EigenstateContext(h, k0), x, t).value;
      },
      py::arg("h"), py::arg("k0"), py::arg("x"), py::arg("t"));
  m.def(
      "gamma_hat",
      [](const ComplexMatrix& h, Eigen::Index k0, const ComplexMatrix& x, double t) {
        return gamma_hat(EigenstateContext(h, k0), x, t);
      },
      py::arg("h"), py::arg("k0"), py::arg("x"), py::arg("t"));

  m.def(
      "dm_hamiltonian", [](double lambda, double mu) { return DmModel(lambda, mu).h(); },
      py::arg("lambda_"), py::arg("mu"));
  m.def(
      "simulate_occupations",
      [](double lambda, double mu, const std::string& label, const std::vector<double>& grid) {
        const DmModel model(lambda, mu);
        const OccupationTrajectory occ = simulate_occupations(model, parse_occupation(label, 3), grid);
        std::vector<std::tuple<double, double, double, double>> rows;
        for (const auto& r : occ.rows) rows.emplace_back(r.t, r.n.n1, r.n.n2, r.n.n3);
        return rows;
      },
      py::arg("lambda_"), py::arg("mu"), py::arg("label"), py::arg("t_grid"),
      "Rows of (t, n1, n2, n3).");

  const auto parse_text = [](const std::string& text) {
    try {
      return Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
  };
  m.def(
      "validate_config",
      [parse_text](const std::string& text) { return parse_config(parse_text(text)).echo().dump(); },
      py::arg("json_text"), "Parses a config and returns the materialized echo as JSON text.");
  m.def(
      "run_config",
      [parse_text](const std::string& text, const std::string& out_dir) {
        const RunReport r = run(parse_config(parse_text(text)), out_dir);
        return py::make_tuple(r.exit_status, r.json.dump());
      },
      py::arg("json_text"), py::arg("out_dir"), "Returns (exit_status, report JSON text).");
}
