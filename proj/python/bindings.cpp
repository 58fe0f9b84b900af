// Python bindings for the estimators and certificates.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "resest/certificates.hpp"
#include "resest/error.hpp"
#include "resest/estimators.hpp"
#include "resest/experiments.hpp"
#include "resest/io.hpp"

namespace py = pybind11;
using namespace resest;

namespace {

SolverOptions make_options(double tolerance, int max_iterations, std::uint64_t seed) {
  SolverOptions o;
  o.tolerance = tolerance;
  o.max_iterations = max_iterations;
  o.seed = seed;
  return o;
}

py::dict result_dict(const EstimateResult& r) {
  py::dict d;
  d["X_hat"] = r.X_hat;
  d["z0"] = r.z0;
  d["objective"] = r.objective;
  d["iterations"] = r.report.iterations;
  d["converged"] = r.report.converged;
  d["certified"] = r.report.certified;
  d["method"] = std::string(to_string(r.report.method));
  d["estimator"] = std::string(to_string(r.tag));
  return d;
}

}  // namespace

PYBIND11_MODULE(_resest, m) {
  m.doc() = "Resilient state estimation for linear time-varying systems";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<UnsupportedOperation>(m, "UnsupportedOperation", PyExc_NotImplementedError);

  py::class_<LtvSystem>(m, "LtvSystem")
      .def(py::init<std::vector<Matrix>, std::vector<Matrix>>(), py::arg("A"), py::arg("C"))
      .def_static("lti", &LtvSystem::lti, py::arg("A"), py::arg("C"), py::arg("horizon"))
      .def_property_readonly("n", &LtvSystem::n)
      .def_property_readonly("ny", &LtvSystem::ny)
      .def_property_readonly("horizon", &LtvSystem::horizon)
      .def("A", &LtvSystem::A)
      .def("C", &LtvSystem::C);

  m.def("benchmark_system", &benchmark_system, py::arg("horizon") = 100);
  m.def("load_system", [](const std::string& path) { return load_system(path).sys; }, py::arg("path"));

  m.def(
      "simulate",
      [](const LtvSystem& sys, const Vector& x0, const Matrix& W, const Matrix& V, const Matrix& S) {
        NoiseRealization noise = NoiseRealization::zero(sys);
        if (W.size()) noise.W = W;
        if (V.size()) noise.Vd = V;
        if (S.size()) noise.S = S;
        const Simulation s = simulate(sys, x0, noise);
        return py::make_tuple(s.X, s.Y);
      },
      py::arg("sys"), py::arg("x0"), py::arg("W") = Matrix(), py::arg("V") = Matrix(),
      py::arg("S") = Matrix(), "Returns (X, Y).");

  m.def(
      "draw_trial",
      [](const LtvSystem& sys, std::uint64_t seed, double fraction, double process_amplitude,
         double measurement_amplitude, double sigma) {
        ExperimentConfig cfg = default_config(ExperimentKind::Custom);
        cfg.sys = sys;
        cfg.sigma = sigma;
        const Trial tr = draw_trial(cfg, seed, fraction, process_amplitude, measurement_amplitude);
        py::dict d;
        d["x0"] = tr.x0;
        d["X"] = tr.sim.X;
        d["Y"] = tr.sim.Y;
        d["S"] = tr.noise.S;
        return d;
      },
      py::arg("sys"), py::arg("seed"), py::arg("fraction"), py::arg("process_amplitude") = 0.0,
      py::arg("measurement_amplitude") = 0.0, py::arg("sigma") = 100.0);

  m.def(
      "estimate",
      [](const LtvSystem& sys, const Matrix& Y, const std::string& estimator, const std::string& phi,
         const std::string& psi, double lambda, bool normalize, const Matrix& S, double tolerance,
         int max_iterations, std::uint64_t seed) {
        const int T = sys.horizon();
        const EstimatorTag tag = parse_estimator(estimator);
        const LossFamily phif = LossFamily::identity(Loss::parse(phi, sys.n()), T - 1);
        const Loss psi_base = Loss::parse(psi, sys.ny());
        const LossFamily psif = LossFamily::identity(psi_base, T);
        const LossFamily psi0 = normalize ? normalized_output_family(sys, psi_base) : psif;
        const SolverOptions o = make_options(tolerance, max_iterations, seed);
        switch (tag) {
          case EstimatorTag::E: return result_dict(estimate_E(sys, Y, phif, psif, lambda, o));
          case EstimatorTag::E0: return result_dict(estimate_E0(sys, Y, psi0, o));
          case EstimatorTag::LeastSquares: return result_dict(estimate_least_squares(sys, Y, lambda, o));
          case EstimatorTag::OracleE:
            return result_dict(estimate_oracle(sys, Y, S, EstimatorTag::E, phif, psif, lambda, o));
          case EstimatorTag::OracleE0:
            return result_dict(estimate_oracle(sys, Y, S, EstimatorTag::E0, phif, psi0, lambda, o));
          case EstimatorTag::LeastSquaresOracle:
            return result_dict(
                estimate_oracle(sys, Y, S, EstimatorTag::LeastSquares, phif, psif, lambda, o));
        }
        throw InvalidArgument("unknown estimator");
      },
      py::arg("sys"), py::arg("Y"), py::arg("estimator") = "E", py::arg("phi") = "quadratic",
      py::arg("psi") = "l1", py::arg("lambda_") = 5000.0, py::arg("normalize") = true,
      py::arg("S") = Matrix(), py::arg("tolerance") = 1e-8, py::arg("max_iterations") = 100000,
      py::arg("seed") = 1);

  m.def("relative_error", &relative_error, py::arg("X_hat"), py::arg("X"));

  m.def(
      "certify",
      [](const LtvSystem& sys, bool normalize, const std::string& psi) {
        const OutputMaps maps = output_maps(sys, normalize);
        const Loss loss = Loss::parse(psi, sys.ny());
        const Nu0Result n0 = nu0(maps);
        const RMax rlp = r_max_from_nu0(n0.value);
        py::dict d;
        d["nu0"] = n0.value;
        d["r_max_lp"] = rlp.value;
        d["mu"] = mu(maps, false).value;
        try {
          const NuProfile prof = nu_exact(maps, loss);
          d["nu"] = prof.nu;
          d["r_max"] = std::max(prof.r_max(), rlp.value);
        } catch (const UnsupportedOperation&) {
          d["r_max"] = rlp.value;
        }
        return d;
      },
      py::arg("sys"), py::arg("normalize") = true, py::arg("psi") = "l1");

  m.def(
      "nu_brute",
      [](const LtvSystem& sys, int r, bool normalize, const std::string& psi, int grid) {
        return nu_brute(output_maps(sys, normalize), Loss::parse(psi, sys.ny()), r, grid);
      },
      py::arg("sys"), py::arg("r"), py::arg("normalize") = true, py::arg("psi") = "l1",
      py::arg("grid") = 100000);
}
