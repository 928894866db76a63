// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

#include "spinphase/coherent.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "spinphase/binomial.hpp"
#include "spinphase/harmonics.hpp"

namespace spinphase {

CoherentState coherent_state(HalfInt J, const PhasePoint& p) {
    require_spin(J);
    const int d = J.dim();
    const int two_j = J.twice();
    const double c = std::cos(0.5 * p.theta);
    const double s = std::sin(0.5 * p.theta);
    Vector amp(d);
    for (int row = 0; row < d; ++row) {
        const int up = two_j - row;  // J+m
        const int down = row;        // J-m
        double log_mag = 0.5 * log_binomial(two_j, up);
        bool zero = false;
        if (up > 0) {
            if (c == 0.0) zero = true;
            else log_mag += up * std::log(std::abs(c));
        }
        if (down > 0) {
            if (s == 0.0) zero = true;
            else log_mag += down * std::log(std::abs(s));
        }
        double mag = zero ? 0.0 : std::exp(log_mag);
        if ((up % 2 == 1 && c < 0.0) != (down % 2 == 1 && s < 0.0)) {
            mag = -mag;
        }
        amp(row) = mag * std::polar(1.0, down * p.phi);
    }
    return {J, amp, p};
}

std::vector<PhasePoint> SphericalQuadrature::points() const {
    std::vector<PhasePoint> pts;
    pts.reserve(nodes_.size());
    for (const auto& n : nodes_) pts.push_back(n.point);
    return pts;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
    if (n < 1) {
        throw std::invalid_argument("Gauss-Legendre rule needs at least one node");
    }
    std::vector<double> x(static_cast<std::size_t>(n));
    std::vector<double> w(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = z;
            for (int k = 1; k < n; ++k) {
                const double p2 = ((2.0 * k + 1.0) * z * p1 - k * p0) / (k + 1.0);
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // Recompute the derivative at the converged root for the weight.
        double p0 = 1.0;
        double p1 = z;
        for (int k = 1; k < n; ++k) {
            const double p2 = ((2.0 * k + 1.0) * z * p1 - k * p0) / (k + 1.0);
            p0 = p1;
            p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const double weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[static_cast<std::size_t>(i)] = z;
        x[static_cast<std::size_t>(n - 1 - i)] = -z;
        w[static_cast<std::size_t>(i)] = weight;
        w[static_cast<std::size_t>(n - 1 - i)] = weight;
    }
    if (n % 2 == 1) {
        x[static_cast<std::size_t>(n / 2)] = 0.0;
    }
    return {x, w};
}

SphericalQuadrature build_quadrature(HalfInt J, int degree) {
    require_spin(J);
    if (degree < 0) {
        throw std::invalid_argument("quadrature degree must be non-negative");
    }
    const int n_theta = (degree + 2) / 2;  // ceil((degree+1)/2)
    const int n_phi = degree + 1;
    const auto [x, w] = gauss_legendre(n_theta);
    std::vector<QuadratureNode> nodes;
    nodes.reserve(static_cast<std::size_t>(n_theta * n_phi));
    for (int i = 0; i < n_theta; ++i) {
        const double theta = std::acos(x[static_cast<std::size_t>(i)]);
        // Gauss weights sum to 2 on [-1,1]; the phi rule contributes 1/n_phi each.
        const double wt = 0.5 * w[static_cast<std::size_t>(i)] / n_phi;
        for (int j = 0; j < n_phi; ++j) {
            nodes.push_back({{theta, 2.0 * kPi * j / n_phi}, wt});
        }
    }
    return SphericalQuadrature(J, degree, n_theta, n_phi, std::move(nodes));
}

double husimi(const DensityMatrix& rho, const PhasePoint& p) {
    const CoherentState cs = coherent_state(rho.J, p);
    return (cs.amplitudes.adjoint() * rho.mat * cs.amplitudes)(0, 0).real();
}

Complex ck_coefficient(HalfInt J, int L, int k, const PhasePoint& p) {
    require_spin(J);
    if (L < 0 || L > J.twice() || std::abs(k) > L) {
        throw std::out_of_range("c_{L,k} index (L=" + std::to_string(L) +
                                ", k=" + std::to_string(k) + ") out of range for J=" +
                                J.to_string());
    }
    const double scale = std::sqrt(povm_eigenvalue(J, L) / J.dim());
    return scale * std::conj(spherical_harmonic(L, k, p));
}

}  // namespace spinphase
