// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

#include "spinphase/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace spinphase {

Complex PhasePoint::z() const {
    if (theta >= kPi) {
        return {std::numeric_limits<double>::infinity(), 0.0};
    }
    return std::polar(std::tan(0.5 * theta), phi);
}

Eigen::Vector3d PhasePoint::direction() const {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

double geodesic_cosine(const PhasePoint& a, const PhasePoint& b) {
    const double c = std::cos(a.theta) * std::cos(b.theta) +
                     std::sin(a.theta) * std::sin(b.theta) * std::cos(a.phi - b.phi);
    return std::clamp(c, -1.0, 1.0);
}

SphereGrid SphereGrid::equiangular(int n_theta, int n_phi) {
    if (n_theta < 2 || n_phi < 1) {
        throw std::invalid_argument("equiangular grid needs n_theta >= 2 and n_phi >= 1");
    }
    SphereGrid g;
    g.n_theta = n_theta;
    g.n_phi = n_phi;
    g.points.reserve(static_cast<std::size_t>(n_theta) * static_cast<std::size_t>(n_phi));
    for (int i = 0; i < n_theta; ++i) {
        const double theta = (i == n_theta - 1) ? kPi : kPi * i / (n_theta - 1);
        for (int j = 0; j < n_phi; ++j) {
            g.points.push_back({theta, 2.0 * kPi * j / n_phi});
        }
    }
    return g;
}

namespace {

inline std::size_t tri(int L, int m) {
    return static_cast<std::size_t>(L * (L + 1) / 2 + m);
}

// Seed N^m_m in log space: |N^m_m| = sqrt((2m+1)/(2m)!) (2m-1)!! sin^m(theta).
double seed(int m, double sin_theta) {
    if (m == 0) {
        return 1.0;
    }
    if (sin_theta == 0.0) {
        return 0.0;
    }
    const double log_mag = 0.5 * std::log(2.0 * m + 1.0) + 0.5 * std::lgamma(2.0 * m + 1.0) -
                           m * std::log(2.0) - std::lgamma(m + 1.0) +
                           m * std::log(std::abs(sin_theta));
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    return sign * std::exp(log_mag);
}

// Upward recurrence in L at fixed m; fills out[L] for m <= L <= max_rank.
void column(int m, int max_rank, double x, double sin_theta, double* out) {
    double prev2 = 0.0;
    double prev = seed(m, sin_theta);
    out[m] = prev;
    double a_prev = 0.0;
    for (int L = m + 1; L <= max_rank; ++L) {
        const double a = std::sqrt((4.0 * L * L - 1.0) / (static_cast<double>(L) * L -
                                                           static_cast<double>(m) * m));
        const double cur = (L == m + 1) ? a * x * prev : a * (x * prev - prev2 / a_prev);
        out[L] = cur;
        prev2 = prev;
        prev = cur;
        a_prev = a;
    }
}

}  // namespace

std::vector<double> normalized_legendre_all(int max_rank, double theta) {
    if (max_rank < 0) {
        return {};
    }
    const double x = std::cos(theta);
    const double s = std::sin(theta);
    std::vector<double> table(tri(max_rank, max_rank) + 1, 0.0);
    std::vector<double> col(static_cast<std::size_t>(max_rank) + 1);
    for (int m = 0; m <= max_rank; ++m) {
        column(m, max_rank, x, s, col.data());
        for (int L = m; L <= max_rank; ++L) {
            table[tri(L, m)] = col[static_cast<std::size_t>(L)];
        }
    }
    return table;
}

Complex spherical_harmonic(int L, int k, const PhasePoint& p) {
    if (L < 0 || std::abs(k) > L) {
        throw std::out_of_range("spherical harmonic index (L=" + std::to_string(L) +
                                ", k=" + std::to_string(k) + ") out of range");
    }
    const int m = std::abs(k);
    std::vector<double> col(static_cast<std::size_t>(L) + 1);
    column(m, L, std::cos(p.theta), std::sin(p.theta), col.data());
    const Complex y = col[static_cast<std::size_t>(L)] * std::polar(1.0, m * p.phi);
    if (k >= 0) {
        return y;
    }
    return (m % 2 == 0) ? std::conj(y) : -std::conj(y);
}

std::vector<Complex> spherical_harmonics_all(int max_rank, const PhasePoint& p) {
    std::vector<Complex> out(static_cast<std::size_t>((max_rank + 1) * (max_rank + 1)));
    if (max_rank < 0) {
        return out;
    }
    const std::vector<double> leg = normalized_legendre_all(max_rank, p.theta);
    for (int m = 0; m <= max_rank; ++m) {
        const Complex phase = std::polar(1.0, m * p.phi);
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        for (int L = m; L <= max_rank; ++L) {
            const Complex y = leg[tri(L, m)] * phase;
            out[static_cast<std::size_t>(moment_index(L, m))] = y;
            if (m > 0) {
                out[static_cast<std::size_t>(moment_index(L, -m))] = sign * std::conj(y);
            }
        }
    }
    return out;
}

double legendre(int L, double x) {
    if (L < 0) {
        throw std::out_of_range("Legendre degree must be non-negative");
    }
    if (L == 0) return 1.0;
    double p0 = 1.0;
    double p1 = x;
    for (int n = 1; n < L; ++n) {
        const double p2 = ((2.0 * n + 1.0) * x * p1 - n * p0) / (n + 1.0);
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

double zonal_harmonic(int L, const PhasePoint& p, const PhasePoint& q) {
    return legendre(L, geodesic_cosine(p, q));
}

}  // namespace spinphase
