// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

#include "spinphase/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "spinphase/binomial.hpp"
#include "spinphase/harmonics.hpp"

namespace spinphase {

void require_sigma(double sigma) {
    if (!std::isfinite(sigma)) {
        throw std::invalid_argument("sigma must be a finite real number");
    }
}

namespace {

void require_time_rate(double t, double gamma) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw std::invalid_argument("propagation time must be non-negative");
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("gamma must be positive and finite");
    }
}

const MomentVector& require_spectral(const QuasiDist& F) {
    if (!F.spectral) {
        throw std::invalid_argument("quasidistribution carries no spectral coefficients");
    }
    return *F.spectral;
}

double prefactor(HalfInt J) { return 1.0 / std::sqrt(static_cast<double>(J.dim())); }

// Harmonic values at every grid point, reused while only g changes.
class SynthesisTable {
public:
    SynthesisTable(int max_rank, const SphereGrid& grid) {
        rows_.reserve(grid.size());
        for (const auto& p : grid.points) rows_.push_back(spherical_harmonics_all(max_rank, p));
    }

    [[nodiscard]] std::vector<double> sample(const MomentVector& g) const {
        const double a = prefactor(g.spin());
        const auto& c = g.coeffs();
        std::vector<double> out(rows_.size());
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            double acc = 0.0;
            const auto& y = rows_[i];
            for (std::size_t j = 0; j < c.size(); ++j) {
                acc += c[j].real() * y[j].real() - c[j].imag() * y[j].imag();
            }
            out[i] = a * acc;
        }
        return out;
    }

private:
    std::vector<std::vector<Complex>> rows_;
};

MomentVector scaled(const MomentVector& g, const auto& factor) {
    MomentVector out = g;
    for (int L = 0; L <= g.max_rank(); ++L) {
        const double f = factor(L);
        for (int k = -L; k <= L; ++k) out(L, k) *= f;
    }
    return out;
}

}  // namespace

Matrix sw_kernel_matrix(HalfInt J, double sigma, const PhasePoint& p) {
    require_spin(J);
    require_sigma(sigma);
    const auto basis = TensorBasis::shared(J);
    const std::vector<Complex> y = spherical_harmonics_all(J.twice(), p);
    const int d = J.dim();
    Matrix w = Matrix::Zero(d, d);
    for (int L = 0; L <= J.twice(); ++L) {
        const double s = std::exp(-0.5 * sigma * log_povm_eigenvalue(J, L));
        for (int k = -L; k <= L; ++k) {
            const auto idx = static_cast<std::size_t>(moment_index(L, k));
            w += (s * std::conj(y[idx])) * basis->op_at(idx);
        }
    }
    return prefactor(J) * w;
}

MomentVector sigma_coefficients(const MomentVector& moments, double sigma) {
    require_sigma(sigma);
    const HalfInt J = moments.spin();
    return scaled(moments, [&](int L) { return std::exp(-0.5 * sigma * log_povm_eigenvalue(J, L)); });
}

double evaluate_spectral(const MomentVector& g, const PhasePoint& p) {
    const std::vector<Complex> y = spherical_harmonics_all(g.max_rank(), p);
    Complex acc = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) acc += g.coeffs()[j] * y[j];
    return prefactor(g.spin()) * acc.real();
}

std::vector<double> sample_spectral(const MomentVector& g, const SphereGrid& grid) {
    return SynthesisTable(g.max_rank(), grid).sample(g);
}

QuasiDist quasidistribution(const DensityMatrix& rho, double sigma, const SphereGrid& grid,
                            Sampling sampling) {
    require_sigma(sigma);
    const auto basis = TensorBasis::shared(rho.J);
    QuasiDist F;
    F.J = rho.J;
    F.sigma = sigma;
    F.spectral = sigma_coefficients(expand(rho, *basis), sigma);
    F.grid = grid;
    if (sampling == Sampling::spectral) {
        F.values = sample_spectral(*F.spectral, grid);
        return F;
    }
    F.values.reserve(grid.size());
    for (const auto& p : grid.points) {
        const Matrix w = sw_kernel_matrix(rho.J, sigma, p);
        F.values.push_back((rho.mat.cwiseProduct(w.transpose())).sum().real());
    }
    return F;
}

QuasiDist heat_propagate_spectral(const QuasiDist& F, double t, double gamma) {
    require_time_rate(t, gamma);
    const MomentVector& g = require_spectral(F);
    QuasiDist out = F;
    out.spectral = scaled(g, [&](int L) { return std::exp(-0.5 * gamma * L * (L + 1) * t); });
    out.time_label = F.time_label + t;
    if (!out.grid.points.empty()) out.values = sample_spectral(*out.spectral, out.grid);
    return out;
}

QuasiDist heat_propagate_kernel(const QuasiDist& F, double t, double gamma,
                                const SphericalQuadrature& quad, const SphereGrid& targets) {
    require_time_rate(t, gamma);
    const int lmax = F.J.twice();
    if (quad.degree() < 2 * lmax) {
        throw std::invalid_argument("zonal-kernel propagation needs quadrature degree >= 4J");
    }
    if (F.values.size() != quad.size()) {
        throw std::invalid_argument("zonal-kernel propagation needs F sampled on the quadrature nodes");
    }
    std::vector<double> damp(static_cast<std::size_t>(lmax) + 1);
    for (int L = 0; L <= lmax; ++L) {
        damp[static_cast<std::size_t>(L)] = (2.0 * L + 1.0) * std::exp(-0.5 * gamma * L * (L + 1) * t);
    }
    QuasiDist out;
    out.J = F.J;
    out.sigma = F.sigma;
    out.time_label = F.time_label + t;
    out.grid = targets;
    out.values.reserve(targets.size());
    for (const auto& p : targets.points) {
        double acc = 0.0;
        for (std::size_t i = 0; i < quad.size(); ++i) {
            const double x = geodesic_cosine(p, quad.nodes()[i].point);
            // Kernel sum_L damp_L P_L(x) by the three-term recurrence.
            double p0 = 1.0;
            double p1 = x;
            double kern = damp[0];
            if (lmax >= 1) kern += damp[1] * x;
            for (int L = 1; L < lmax; ++L) {
                const double p2 = ((2.0 * L + 1.0) * x * p1 - L * p0) / (L + 1.0);
                p0 = p1;
                p1 = p2;
                kern += damp[static_cast<std::size_t>(L + 1)] * p2;
            }
            acc += quad.nodes()[i].weight * kern * F.values[i];
        }
        out.values.push_back(acc);
    }
    return out;
}

HeatResidual heat_residual(const QuasiDist& F0, double t, double gamma, double dt,
                           const SphereGrid& grid) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("heat residual needs dt > 0");
    }
    require_time_rate(t, gamma);
    const MomentVector& g0 = require_spectral(F0);
    const int lmax = g0.max_rank();
    HeatResidual res;
    const double stiff = 0.5 * gamma * lmax * (lmax + 1);
    if (stiff * dt > 0.1) {
        res.warning = "dt is large against the fastest mode; residual is dominated by O(dt^2)";
    }
    if (t < dt) {
        res.warning += res.warning.empty() ? "" : "; ";
        res.warning += "t < dt: backward sample uses negative time";
    }
    auto at = [&](double s) {
        return scaled(g0, [&](int L) { return std::exp(-0.5 * gamma * L * (L + 1) * s); });
    };
    SphereGrid interior;
    for (const auto& p : grid.points) {
        if (p.theta > 0.0 && p.theta < kPi) interior.points.push_back(p);
    }
    const SynthesisTable table(lmax, interior);
    const std::vector<double> fp = table.sample(at(t + dt));
    const std::vector<double> fm = table.sample(at(t - dt));
    const std::vector<double> lap =
        table.sample(scaled(at(t), [](int L) { return -static_cast<double>(L) * (L + 1); }));
    for (std::size_t i = 0; i < interior.size(); ++i) {
        const double dfdt = (fp[i] - fm[i]) / (2.0 * dt);
        res.max_residual = std::max(res.max_residual, std::abs(dfdt - 0.5 * gamma * lap[i]));
    }
    return res;
}

QuasiDist povm_sigma_shift(const QuasiDist& F, int n) {
    if (n < 0) {
        throw std::invalid_argument("POVM iteration count must be non-negative");
    }
    const MomentVector& g = require_spectral(F);
    const HalfInt J = F.J;
    QuasiDist out = F;
    out.sigma = F.sigma - 2.0 * n;
    out.spectral = scaled(g, [&](int L) { return std::exp(n * log_povm_eigenvalue(J, L)); });
    if (!out.grid.points.empty()) out.values = sample_spectral(*out.spectral, out.grid);
    return out;
}

PositivityScan positivity_scan(const QuasiDist& F) {
    if (F.values.empty() || F.values.size() != F.grid.size()) {
        throw std::invalid_argument("positivity scan needs sampled values");
    }
    const auto it = std::min_element(F.values.begin(), F.values.end());
    PositivityScan s;
    s.min_value = *it;
    s.argmin = F.grid.points[static_cast<std::size_t>(it - F.values.begin())];
    return s;
}

PositivityScan positivity_scan_refined(const MomentVector& g, int n_theta, int n_phi) {
    auto scan = [&](int nt, int np) {
        QuasiDist F;
        F.J = g.spin();
        F.grid = SphereGrid::equiangular(nt, np);
        F.values = sample_spectral(g, F.grid);
        return positivity_scan(F);
    };
    const PositivityScan coarse = scan(n_theta, n_phi);
    PositivityScan fine = scan(2 * n_theta - 1, 2 * n_phi);
    fine.refinement_change = std::abs(fine.min_value - coarse.min_value);
    return fine;
}

int positivity_iterations(double sigma) {
    require_sigma(sigma);
    return std::max(0, static_cast<int>(std::ceil(0.5 * (sigma + 1.0))));
}

PositivityTime positivity_time(HalfInt J, double sigma, double gamma) {
    require_spin(J);
    require_sigma(sigma);
    require_time_rate(0.0, gamma);
    PositivityTime out;
    if (J.twice() == 0) {
        out.kind = "exact";
        return out;
    }
    if (J.twice() == 1) {
        out.kind = "exact";
        out.t_star = std::log(3.0) / gamma * positivity_iterations(sigma);
        return out;
    }
    out.kind = "bound";
    const double j = J.value();
    const double s1 = std::max(0.0, sigma + 1.0);
    out.t_star = s1 / (2.0 * gamma * j * (2.0 * j + 1.0)) * log_binomial(2 * J.twice() + 1, J.twice());
    if (J.twice() >= 20) {
        out.asymptotic =
            s1 / (4.0 * gamma * j * j) * (4.0 * j * std::log(2.0) - 0.5 * std::log(2.0 * kPi * j));
    }
    return out;
}

double damped_kernel_time(HalfInt J, double sigma, double gamma) {
    require_spin(J);
    require_sigma(sigma);
    require_time_rate(0.0, gamma);
    double t = 0.0;
    for (int L = 1; L <= J.twice(); ++L) {
        // exp(-gamma L(L+1) t/2) r^{-sigma/2} <= r^{1/2}  <=>  t >= -(sigma+1) log r / (gamma L(L+1))
        const double need = -(sigma + 1.0) * log_povm_eigenvalue(J, L) / (gamma * L * (L + 1));
        t = std::max(t, need);
    }
    return t;
}

FirstPositive first_positive_time(const DensityMatrix& rho, double sigma, double gamma,
                                  const SphereGrid& grid, double rel_tol, double floor) {
    require_sigma(sigma);
    require_time_rate(0.0, gamma);
    if (!(rel_tol > 0.0)) {
        throw std::invalid_argument("bisection tolerance must be positive");
    }
    const auto basis = TensorBasis::shared(rho.J);
    const MomentVector g0 = sigma_coefficients(expand(rho, *basis), sigma);
    const SynthesisTable table(g0.max_rank(), grid);
    FirstPositive out;
    auto positive_at = [&](double t) {
        ++out.evaluations;
        const MomentVector g =
            scaled(g0, [&](int L) { return std::exp(-0.5 * gamma * L * (L + 1) * t); });
        const std::vector<double> v = table.sample(g);
        return *std::min_element(v.begin(), v.end()) >= floor;
    };
    if (positive_at(0.0)) {
        out.found = true;
        return out;
    }
    double lo = 0.0;
    double hi = std::max(damped_kernel_time(rho.J, sigma, gamma), 1.0 / gamma);
    int doublings = 0;
    while (!positive_at(hi)) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 60) return out;
    }
    while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (positive_at(mid)) hi = mid;
        else lo = mid;
    }
    out.time = hi;
    out.found = true;
    return out;
}

int first_positive_iteration(const DensityMatrix& rho, double sigma, const SphereGrid& grid,
                             int max_n, double floor) {
    require_sigma(sigma);
    const auto basis = TensorBasis::shared(rho.J);
    const MomentVector g0 = sigma_coefficients(expand(rho, *basis), sigma);
    const SynthesisTable table(g0.max_rank(), grid);
    const HalfInt J = rho.J;
    for (int n = 0; n <= max_n; ++n) {
        const MomentVector g = scaled(g0, [&](int L) { return std::exp(n * log_povm_eigenvalue(J, L)); });
        const std::vector<double> v = table.sample(g);
        if (*std::min_element(v.begin(), v.end()) >= floor) return n;
    }
    return -1;
}

}  // namespace spinphase
