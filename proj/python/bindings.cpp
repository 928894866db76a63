// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <iostream>

#include "spinphase/binomial.hpp"
#include "spinphase/channels.hpp"
#include "spinphase/cli.hpp"
#include "spinphase/coherent.hpp"
#include "spinphase/phasespace.hpp"
#include "spinphase/unravel.hpp"

namespace py = pybind11;
using namespace spinphase;

namespace {

// Spins are accepted as strings ("1/2") or numbers (0.5, 2).
HalfInt to_spin(const py::object& J) {
    if (py::isinstance<py::str>(J)) return parse_spin(J.cast<std::string>());
    const double v = J.cast<double>();
    const double twice = 2.0 * v;
    if (std::abs(twice - std::round(twice)) > 1e-12) {
        throw std::invalid_argument("spin must be a non-negative half-integer");
    }
    const HalfInt s = HalfInt::from_twice(static_cast<int>(std::lround(twice)));
    require_spin(s);
    return s;
}

HalfInt spin_of(const Matrix& rho) {
    if (rho.rows() < 1 || rho.rows() != rho.cols()) {
        throw std::invalid_argument("density matrix must be square and non-empty");
    }
    return HalfInt::from_twice(static_cast<int>(rho.rows()) - 1);
}

DensityMatrix to_state(const Matrix& rho) { return DensityMatrix::checked(spin_of(rho), rho); }

const TensorBasis& basis_for(HalfInt J) { return *TensorBasis::shared(J); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Spin-J tensor operators, decoherence channels and phase-space distributions";

    m.def("moment_index", &moment_index, py::arg("L"), py::arg("k"));

    m.def("tensor_operator",
          [](const py::object& J, int L, int k) { return Matrix(basis_for(to_spin(J)).op(L, k)); },
          py::arg("J"), py::arg("L"), py::arg("k"));

    m.def("povm_eigenvalue", [](const py::object& J, int L) { return povm_eigenvalue(to_spin(J), L); },
          py::arg("J"), py::arg("L"));

    m.def("coherent_state",
          [](const py::object& J, double theta, double phi) {
              return Vector(coherent_state(to_spin(J), {theta, phi}).amplitudes);
          },
          py::arg("J"), py::arg("theta"), py::arg("phi"));

    m.def("expand",
          [](const Matrix& rho) {
              const HalfInt J = spin_of(rho);
              return expand(rho, basis_for(J)).coeffs();
          },
          py::arg("rho"), "Flat moments rho_{L,k} at index L^2 + L + k.");

    m.def("reconstruct",
          [](const py::object& J, const std::vector<Complex>& coeffs) {
              const HalfInt spin = to_spin(J);
              return Matrix(reconstruct(MomentVector(spin, coeffs), basis_for(spin)).state.mat);
          },
          py::arg("J"), py::arg("moments"));

    m.def("lindblad_propagate",
          [](const Matrix& rho, double t, double gamma) {
              const DensityMatrix s = to_state(rho);
              const TensorBasis& B = basis_for(s.J);
              return Matrix(
                  reconstruct(lindblad_propagate_analytic(expand(s, B), t, {gamma, s.J}), B).state.mat);
          },
          py::arg("rho"), py::arg("t"), py::arg("gamma") = 1.0);

    m.def("povm_apply",
          [](const Matrix& rho, int n) {
              const DensityMatrix s = to_state(rho);
              const TensorBasis& B = basis_for(s.J);
              return Matrix(reconstruct(povm_apply_spectral(expand(s, B), n), B).state.mat);
          },
          py::arg("rho"), py::arg("n") = 1);

    m.def("decay_rates",
          [](const py::object& J, double gamma) {
              const DecayRateTable t = decay_rates(to_spin(J), gamma);
              py::dict d;
              d["lindblad"] = t.lindblad;
              d["povm"] = t.povm;
              return d;
          },
          py::arg("J"), py::arg("gamma") = 1.0);

    m.def("quasidistribution",
          [](const Matrix& rho, double sigma, const std::vector<double>& theta,
             const std::vector<double>& phi) {
              if (theta.size() != phi.size()) {
                  throw std::invalid_argument("theta and phi must have the same length");
              }
              SphereGrid g;
              for (std::size_t i = 0; i < theta.size(); ++i) g.points.push_back({theta[i], phi[i]});
              return quasidistribution(to_state(rho), sigma, g, Sampling::spectral).values;
          },
          py::arg("rho"), py::arg("sigma"), py::arg("theta"), py::arg("phi"));

    m.def("positivity_time",
          [](const py::object& J, double sigma, double gamma) {
              const PositivityTime p = positivity_time(to_spin(J), sigma, gamma);
              py::dict d;
              d["t_star"] = p.t_star;
              d["kind"] = p.kind;
              d["asymptotic"] = p.asymptotic ? py::cast(*p.asymptotic) : py::none();
              d["iterations"] = positivity_iterations(sigma);
              return d;
          },
          py::arg("J"), py::arg("sigma"), py::arg("gamma"));

    m.def("run_ensemble",
          [](const Matrix& rho, double gamma, double dt, int n_steps, std::int64_t n_traj,
             std::uint64_t seed, unsigned threads) {
              KickConfig cfg;
              cfg.gamma = gamma;
              cfg.dt = dt;
              cfg.n_steps = n_steps;
              cfg.n_traj = n_traj;
              cfg.seed = seed;
              TrajectoryEnsemble e;
              const DensityMatrix s = to_state(rho);
              {
                  py::gil_scoped_release release;
                  e = run_ensemble(s, cfg, threads);
              }
              py::dict d;
              d["time"] = e.times.back();
              d["mean"] = e.mean.back().coeffs();
              d["std_error"] = e.std_error.back();
              d["warnings"] = e.warnings;
              return d;
          },
          py::arg("rho"), py::arg("gamma") = 1.0, py::arg("dt") = 1e-3, py::arg("n_steps") = 1000,
          py::arg("n_traj") = 1000, py::arg("seed") = 0, py::arg("threads") = 0);

    m.def("main",
          [](const std::vector<std::string>& args) { return cli::run(args, std::cout, std::cerr); },
          py::arg("args"), "Runs the command-line tool; returns its exit code.");
}
