// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file phasespace.hpp
 * @brief Stratonovich-Weyl quasidistributions F^sigma on the sphere, their
 *        heat-equation flow, the POVM sigma-shift and positivity timescales.
 *
 * With r_L = C(2J,L)/C(2J+L+1,L) and a = (2J+1)^{-1/2}, the kernel is
 *
 *   w^sigma(p) = a sum_{L,k} r_L^{-sigma/2} conj(Y^k_L(p)) T_{L,k},
 *
 * so that F^sigma(p) = tr(rho w^sigma(p)) = a sum g_{Lk} Y^k_L(p) with
 * g_{Lk} = r_L^{-sigma/2} rho_{Lk}. sigma = -1 is the Husimi function,
 * sigma = 0 the Wigner function and sigma = +1 the P function.
 */

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spinphase/coherent.hpp"
#include "spinphase/sphere.hpp"
#include "spinphase/su2.hpp"

namespace spinphase {

/// Named values of the ordering parameter.
inline constexpr double kSigmaHusimi = -1.0;
inline constexpr double kSigmaWigner = 0.0;
inline constexpr double kSigmaP = 1.0;

/// Throws std::invalid_argument unless sigma is finite.
void require_sigma(double sigma);

[[nodiscard]] Matrix sw_kernel_matrix(HalfInt J, double sigma, const PhasePoint& p);

struct QuasiDist {
    HalfInt J;
    double sigma = 0.0;
    double time_label = 0.0;
    std::optional<MomentVector> spectral;  ///< g_{Lk}; absent for purely sampled data
    SphereGrid grid;                       ///< sample points (may be empty)
    std::vector<double> values;            ///< F at grid.points
};

/// g_{Lk} = r_L^{-sigma/2} rho_{Lk}.
[[nodiscard]] MomentVector sigma_coefficients(const MomentVector& moments, double sigma);

/// a sum g_{Lk} Y^k_L(p); the imaginary part is dropped.
[[nodiscard]] double evaluate_spectral(const MomentVector& g, const PhasePoint& p);

/// Samples `g` on every grid point.
[[nodiscard]] std::vector<double> sample_spectral(const MomentVector& g, const SphereGrid& grid);

enum class Sampling {
    kernel,    ///< tr(rho w^sigma(p)) with the kernel matrix built at each point
    spectral,  ///< harmonic synthesis from g_{Lk}
};

/// Both the spectral coefficients and grid samples of F^sigma for `rho`.
[[nodiscard]] QuasiDist quasidistribution(const DensityMatrix& rho, double sigma,
                                          const SphereGrid& grid,
                                          Sampling sampling = Sampling::kernel);

/// Multiplies g_{Lk} by exp(-gamma L(L+1) t / 2) and resamples the grid.
[[nodiscard]] QuasiDist heat_propagate_spectral(const QuasiDist& F, double t, double gamma);

/**
 * F(p, t) = sum_L exp(-gamma L(L+1) t/2) (2L+1) int P_L(cos eta) F(p', 0) dmu0(p').
 *
 * `F` must be sampled on the nodes of `quad`, which needs degree >= 4J so that
 * every product P_L F is integrated exactly. The result is sampled on `targets`
 * and carries no spectral data.
 */
[[nodiscard]] QuasiDist heat_propagate_kernel(const QuasiDist& F, double t, double gamma,
                                              const SphericalQuadrature& quad,
                                              const SphereGrid& targets);

struct HeatResidual {
    double max_residual = 0.0;
    std::string warning;
};

/**
 * max over nodes with 0 < theta < pi of |dF/dt - (gamma/2) Lap F| at time t.
 *
 * dF/dt is the central difference of the analytically propagated samples at
 * t +- dt; the Laplacian is applied spectrally (Y^k_L has eigenvalue -L(L+1)).
 */
[[nodiscard]] HeatResidual heat_residual(const QuasiDist& F0, double t, double gamma, double dt,
                                         const SphereGrid& grid);

/// F^sigma of Phi^n[rho], represented as F^{sigma-2n} of rho: g_{Lk} -> r_L^n g_{Lk}.
[[nodiscard]] QuasiDist povm_sigma_shift(const QuasiDist& F, int n);

struct PositivityScan {
    double min_value = 0.0;
    PhasePoint argmin;
    double refinement_change = 0.0;  ///< |min(fine) - min(coarse)|, refined scans only
};

/// Minimum over the sampled values.
[[nodiscard]] PositivityScan positivity_scan(const QuasiDist& F);

/// Spectral scan on an n_theta x n_phi grid and on its doubled refinement.
[[nodiscard]] PositivityScan positivity_scan_refined(const MomentVector& g, int n_theta,
                                                     int n_phi);

/// ceil((sigma+1)/2), floored at 0.
[[nodiscard]] int positivity_iterations(double sigma);

struct PositivityTime {
    double t_star = 0.0;
    std::string kind;                  ///< "exact" (J <= 1/2) or "bound"
    std::optional<double> asymptotic;  ///< large-J form, reported for J >= 10
};

[[nodiscard]] PositivityTime positivity_time(HalfInt J, double sigma, double gamma);

/// Smallest t with exp(-gamma L(L+1) t/2) r_L^{-sigma/2} <= r_L^{1/2} for every L.
[[nodiscard]] double damped_kernel_time(HalfInt J, double sigma, double gamma);

struct FirstPositive {
    double time = 0.0;
    int evaluations = 0;
    bool found = false;
};

/**
 * Bisection on t for the first time the Lindblad-evolved F^sigma has grid
 * minimum >= floor, to relative tolerance `rel_tol`.
 */
[[nodiscard]] FirstPositive first_positive_time(const DensityMatrix& rho, double sigma,
                                                double gamma, const SphereGrid& grid,
                                                double rel_tol = 1e-3, double floor = -1e-9);

/// Smallest POVM iteration count n <= max_n with grid minimum >= floor, or -1.
[[nodiscard]] int first_positive_iteration(const DensityMatrix& rho, double sigma,
                                           const SphereGrid& grid, int max_n = 64,
                                           double floor = -1e-9);

}  // namespace spinphase
