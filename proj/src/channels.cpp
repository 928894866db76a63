// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

#include "spinphase/channels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "spinphase/binomial.hpp"

namespace spinphase {

void LindbladParams::validate() const {
    require_spin(J);
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("Lindblad rate gamma must be positive and finite");
    }
}

namespace {

void require_dim(const Matrix& op, int d, const char* what) {
    if (op.rows() != d || op.cols() != d) {
        throw std::invalid_argument(std::string(what) + ": operator is " +
                                    std::to_string(op.rows()) + "x" + std::to_string(op.cols()) +
                                    ", expected " + std::to_string(d) + "x" + std::to_string(d));
    }
}

Matrix double_commutator(const Matrix& j, const Matrix& a) {
    const Matrix c = j * a - a * j;
    return j * c - c * j;
}

}  // namespace

Matrix lindblad_generator(const Matrix& op, const SpinOperators& spin, double gamma) {
    require_dim(op, spin.J.dim(), "lindblad_generator");
    Matrix acc = double_commutator(spin.jx, op);
    acc += double_commutator(spin.jy, op);
    acc += double_commutator(spin.jz, op);
    return (-0.5 * gamma) * acc;
}

Matrix lindblad_generator(const DensityMatrix& rho, const LindbladParams& params) {
    if (rho.J != params.J) {
        throw std::invalid_argument("lindblad_generator: state spin does not match parameters");
    }
    return lindblad_generator(rho.mat, spin_matrices(params.J), params.gamma);
}

Matrix lindblad_generator_ladder(const Matrix& op, const SpinOperators& spin, double gamma) {
    require_dim(op, spin.J.dim(), "lindblad_generator_ladder");
    const double jj = spin.J.value() * (spin.J.value() + 1.0);
    Matrix out = 0.5 * (spin.jplus * op * spin.jminus + spin.jminus * op * spin.jplus);
    out += spin.jz * op * spin.jz;
    out -= jj * op;
    return gamma * out;
}

MomentVector lindblad_propagate_analytic(const MomentVector& moments, double t,
                                         const LindbladParams& params) {
    params.validate();
    if (!(t >= 0.0)) {
        throw std::invalid_argument("propagation time must be non-negative");
    }
    if (moments.spin() != params.J) {
        throw std::invalid_argument("moment vector spin does not match parameters");
    }
    MomentVector out = moments;
    for (int L = 1; L <= moments.max_rank(); ++L) {
        const double f = std::exp(-lindblad_rate(params.gamma, L) * t);
        for (int k = -L; k <= L; ++k) out(L, k) *= f;
    }
    return out;
}

Matrix lindblad_propagate_numeric(const Matrix& op, double t, const LindbladParams& params,
                                  int steps) {
    params.validate();
    if (steps < 1) {
        throw std::invalid_argument("RK4 needs at least one step");
    }
    if (!(t >= 0.0)) {
        throw std::invalid_argument("propagation time must be non-negative");
    }
    const SpinOperators spin = spin_matrices(params.J);
    require_dim(op, spin.J.dim(), "lindblad_propagate_numeric");
    const double h = t / steps;
    const double g = params.gamma;
    Matrix x = op;
    for (int s = 0; s < steps; ++s) {
        const Matrix k1 = lindblad_generator(x, spin, g);
        const Matrix k2 = lindblad_generator(x + 0.5 * h * k1, spin, g);
        const Matrix k3 = lindblad_generator(x + 0.5 * h * k2, spin, g);
        const Matrix k4 = lindblad_generator(x + h * k3, spin, g);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return x;
}

DensityMatrix lindblad_propagate_numeric(const DensityMatrix& rho, double t,
                                         const LindbladParams& params, int steps) {
    if (rho.J != params.J) {
        throw std::invalid_argument("state spin does not match parameters");
    }
    return {rho.J, lindblad_propagate_numeric(rho.mat, t, params, steps)};
}

int recommended_rk4_steps(HalfInt J, double gamma, double t) {
    const int lmax = J.twice();
    if (lmax == 0 || t <= 0.0) return 1;
    const double dt_max = 0.1 / (gamma * lmax * (lmax + 1) / 2.0);
    return std::max(1, static_cast<int>(std::ceil(t / dt_max - 1e-9)));
}

MomentVector povm_apply_spectral(const MomentVector& moments, int n) {
    if (n < 0) {
        throw std::invalid_argument("POVM iteration count must be non-negative");
    }
    MomentVector out = moments;
    const HalfInt J = moments.spin();
    for (int L = 1; L <= moments.max_rank(); ++L) {
        const double f = std::exp(n * log_povm_eigenvalue(J, L));
        for (int k = -L; k <= L; ++k) out(L, k) *= f;
    }
    return out;
}

Matrix povm_apply_quadrature(const Matrix& op, const SphericalQuadrature& quad) {
    const HalfInt J = quad.spin();
    require_dim(op, J.dim(), "povm_apply_quadrature");
    if (quad.degree() < 2 * J.twice()) {
        throw std::invalid_argument("POVM quadrature degree " + std::to_string(quad.degree()) +
                                    " is below the required 4J = " +
                                    std::to_string(2 * J.twice()));
    }
    const int d = J.dim();
    Matrix acc = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < quad.size(); ++i) {
        const Vector z = coherent_state(J, quad.nodes()[i].point).amplitudes;
        const Complex expect = z.dot(op * z);  // dot conjugates the left operand
        acc.noalias() += (quad.weight_J(i) * expect) * (z * z.adjoint());
    }
    return acc;
}

DensityMatrix povm_apply_quadrature(const DensityMatrix& rho, const SphericalQuadrature& quad) {
    if (rho.J != quad.spin()) {
        throw std::invalid_argument("state spin does not match quadrature");
    }
    return {rho.J, povm_apply_quadrature(rho.mat, quad)};
}

double lindblad_rate(double gamma, int L) { return 0.5 * gamma * L * (L + 1); }

double povm_rate(HalfInt J, int L) { return -log_povm_eigenvalue(J, L); }

DecayRateTable decay_rates(HalfInt J, double gamma) {
    LindbladParams{gamma, J}.validate();
    DecayRateTable t;
    t.J = J;
    for (int L = 0; L <= J.twice(); ++L) {
        t.lindblad.push_back(lindblad_rate(gamma, L));
        t.povm.push_back(L == 0 ? 0.0 : povm_rate(J, L));
    }
    return t;
}

double povm_rate_large_J(HalfInt J, int L) {
    require_spin(J);
    if (J.twice() == 0) {
        throw std::invalid_argument("large-J expansion needs J > 0");
    }
    const double j = J.value();
    const double c = static_cast<double>(L) * (L + 1);
    return c / (2.0 * j) - c / (4.0 * j * j) + c * (c + 6.0) / (48.0 * j * j * j);
}

RatioReport ratio_statistic(std::span<const Complex> series1, std::span<const Complex> series2,
                            double tolerance) {
    if (series1.size() != series2.size()) {
        throw std::invalid_argument("ratio statistic: series lengths differ");
    }
    if (series1.size() < 2) {
        throw std::invalid_argument("ratio statistic needs at least two samples");
    }
    const double a0 = std::abs(series1[0]);
    const double b0 = std::abs(series2[0]);
    if (a0 == 0.0 || b0 == 0.0) {
        throw std::invalid_argument("ratio statistic undefined: initial moment is zero");
    }
    RatioReport rep;
    for (std::size_t i = 1; i < series1.size(); ++i) {
        const double a = std::abs(series1[i]);
        const double b = std::abs(series2[i]);
        if (a == 0.0 || b == 0.0) {
            throw std::invalid_argument("ratio statistic undefined: moment vanished at sample " +
                                        std::to_string(i));
        }
        const double den = std::log(a / a0);
        if (den == 0.0) {
            throw std::invalid_argument("ratio statistic undefined: rank-1 moment did not decay");
        }
        rep.per_sample.push_back(std::log(b / b0) / den);
    }
    double sum = 0.0;
    for (double r : rep.per_sample) sum += r;
    rep.mean = sum / static_cast<double>(rep.per_sample.size());
    for (double r : rep.per_sample) rep.spread = std::max(rep.spread, std::abs(r - rep.mean));
    rep.time_independent = rep.spread <= tolerance;
    return rep;
}

RegionProbability region_probability(const DensityMatrix& rho,
                                     const std::function<bool(const PhasePoint&)>& region,
                                     const SphericalQuadrature& quad) {
    if (rho.J != quad.spin()) {
        throw std::invalid_argument("state spin does not match quadrature");
    }
    if (quad.degree() < 2 * rho.J.twice()) {
        throw std::invalid_argument("region probability needs quadrature degree >= 4J");
    }
    RegionProbability out;
    for (std::size_t i = 0; i < quad.size(); ++i) {
        const PhasePoint& p = quad.nodes()[i].point;
        if (!region(p)) continue;
        out.value += quad.weight_J(i) * husimi(rho, p);
        ++out.nodes_used;
    }
    if (out.nodes_used == 0) {
        out.low_resolution = true;
        out.warning = "no quadrature node lies inside the region; increase the degree";
    }
    return out;
}

void require_positive(const DensityMatrix& rho, double floor) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.mat, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (lo < floor) {
        throw std::invalid_argument("state is not positive: smallest eigenvalue " +
                                    std::to_string(lo));
    }
}

}  // namespace spinphase
