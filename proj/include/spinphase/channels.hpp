// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file channels.hpp
 * @brief Isotropic Lindblad evolution and the coherent-state POVM map.
 *
 * Each channel has a spectral realization acting on tensor moments and an
 * independent matrix-level realization (double commutators with RK4, and the
 * quadrature sum of coherent-state projectors). Both channels are diagonal in
 * the T_{L,k} basis:
 *
 *   Lindblad:  rho_{Lk}(t) = exp(-gamma L(L+1) t / 2) rho_{Lk}(0)
 *   POVM:      rho_{Lk}    -> r_L rho_{Lk},  r_L = C(2J,L) / C(2J+L+1,L)
 */

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "spinphase/coherent.hpp"
#include "spinphase/su2.hpp"

namespace spinphase {

struct LindbladParams {
    double gamma = 1.0;
    HalfInt J;

    /// Throws std::invalid_argument unless gamma > 0 and J >= 0.
    void validate() const;
};

// --- Lindblad ---------------------------------------------------------------

/// -(gamma/2) sum_i [J_i, [J_i, A]].
[[nodiscard]] Matrix lindblad_generator(const Matrix& op, const SpinOperators& spin,
                                        double gamma);
[[nodiscard]] Matrix lindblad_generator(const DensityMatrix& rho, const LindbladParams& params);

/// gamma (J+ A J- / 2 + J- A J+ / 2 + Jz A Jz - J(J+1) A).
[[nodiscard]] Matrix lindblad_generator_ladder(const Matrix& op, const SpinOperators& spin,
                                               double gamma);

[[nodiscard]] MomentVector lindblad_propagate_analytic(const MomentVector& moments, double t,
                                                       const LindbladParams& params);

/// Classical RK4 with `steps` equal steps on the matrix equation.
[[nodiscard]] Matrix lindblad_propagate_numeric(const Matrix& op, double t,
                                                const LindbladParams& params, int steps);
[[nodiscard]] DensityMatrix lindblad_propagate_numeric(const DensityMatrix& rho, double t,
                                                       const LindbladParams& params, int steps);

/// Smallest step count with dt <= 0.1 / (gamma L_max (L_max+1) / 2), L_max = 2J.
[[nodiscard]] int recommended_rk4_steps(HalfInt J, double gamma, double t);

// --- POVM -------------------------------------------------------------------

/// n-fold POVM map in moment space.
[[nodiscard]] MomentVector povm_apply_spectral(const MomentVector& moments, int n = 1);

/**
 * sum_nodes w_J <z|A|z> |z><z| on the quadrature.
 *
 * Throws std::invalid_argument when quad.degree() < 4J, since the integrand
 * then has harmonic content the rule does not integrate exactly.
 */
[[nodiscard]] Matrix povm_apply_quadrature(const Matrix& op, const SphericalQuadrature& quad);
[[nodiscard]] DensityMatrix povm_apply_quadrature(const DensityMatrix& rho,
                                                  const SphericalQuadrature& quad);

// --- Rates ------------------------------------------------------------------

struct DecayRateTable {
    HalfInt J;
    std::vector<double> lindblad;  ///< indexed by L
    std::vector<double> povm;
};

[[nodiscard]] double lindblad_rate(double gamma, int L);
[[nodiscard]] double povm_rate(HalfInt J, int L);
[[nodiscard]] DecayRateTable decay_rates(HalfInt J, double gamma);

/// Three-term large-J expansion of the POVM rate at fixed L.
[[nodiscard]] double povm_rate_large_J(HalfInt J, int L);

struct RatioReport {
    std::vector<double> per_sample;  ///< R at every sample after the first
    double mean = 0.0;
    double spread = 0.0;  ///< max |R_i - mean|
    bool time_independent = true;
};

/**
 * R = log(|s2(t)|/|s2(0)|) / log(|s1(t)|/|s1(0)|) for every sample t > 0.
 *
 * series[0] is the t = 0 value. Throws std::invalid_argument when an initial
 * value is zero, the series lengths differ, or fewer than two samples exist.
 * `time_independent` is false when the spread exceeds `tolerance`.
 */
[[nodiscard]] RatioReport ratio_statistic(std::span<const Complex> series1,
                                          std::span<const Complex> series2,
                                          double tolerance = 1e-8);

struct RegionProbability {
    double value = 0.0;
    std::size_t nodes_used = 0;
    bool low_resolution = false;  ///< no quadrature node fell inside the region
    std::string warning;
};

/// int_A <z|rho|z> dmu^J restricted to the quadrature nodes inside A.
[[nodiscard]] RegionProbability region_probability(
    const DensityMatrix& rho, const std::function<bool(const PhasePoint&)>& region,
    const SphericalQuadrature& quad);

/// Throws std::invalid_argument when the smallest eigenvalue drops below `floor`.
void require_positive(const DensityMatrix& rho, double floor = -1e-10);

}  // namespace spinphase
