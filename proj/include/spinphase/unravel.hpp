// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file unravel.hpp
 * @brief Random isotropic unitary kicks whose ensemble average follows the
 *        isotropic Lindblad flow.
 *
 * Each step draws xi ~ N(0, I_3) and applies U = exp(-i sqrt(gamma dt) xi.J).
 * With (w dt)^2 = dt bookkeeping, E[U rho U^dagger] - rho = L(rho) dt + O(dt^2).
 */

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinphase/su2.hpp"

namespace spinphase {

using Rng = std::mt19937_64;

/// Independent stream for trajectory `index`, keyed by (seed, index) through std::seed_seq.
[[nodiscard]] Rng trajectory_rng(std::uint64_t seed, std::uint64_t index);

/// Three independent standard normal variates.
[[nodiscard]] Eigen::Vector3d draw_noise(Rng& rng);

/**
 * Rotation exp(-i alpha n.J) in the spin-J representation, built from the
 * SU(2) Cayley-Klein parameters. Precomputes the J-dependent coefficients.
 */
class KickGenerator {
public:
    explicit KickGenerator(HalfInt J);

    [[nodiscard]] HalfInt spin() const noexcept { return j_; }

    /// exp(-i G) with G = sqrt(gamma dt) xi.J.
    [[nodiscard]] Matrix unitary(const Eigen::Vector3d& xi, double gamma, double dt) const;

    /// exp(-i alpha n.J) for a rotation vector omega = alpha n.
    [[nodiscard]] Matrix rotation(const Eigen::Vector3d& omega) const;

private:
    HalfInt j_;
    // coef_[(p * d + p') * d + i]: sqrt(p'! q'! / (p! q!)) C(p, i) C(q, p' - i).
    std::vector<double> coef_;
};

[[nodiscard]] Matrix kick_unitary(HalfInt J, const Eigen::Vector3d& xi, double gamma, double dt);

/// Same unitary through the eigendecomposition of the Hermitian generator.
[[nodiscard]] Matrix kick_unitary_eigen(const SpinOperators& spin, const Eigen::Vector3d& xi,
                                        double gamma, double dt);

[[nodiscard]] Vector kick_step(const Vector& psi, HalfInt J, double gamma, double dt, Rng& rng);
[[nodiscard]] Matrix kick_step(const Matrix& rho, HalfInt J, double gamma, double dt, Rng& rng);

struct KickConfig {
    double gamma = 1.0;  ///< gamma = 0 is accepted and gives identity kicks
    double dt = 1e-3;
    int n_steps = 1000;
    std::int64_t n_traj = 1000;
    std::uint64_t seed = 0;
    /// Step indices at which ensemble moments are recorded; empty means {0, n_steps}.
    std::vector<int> record_steps;
    /// Final states kept for the first `keep_states` trajectories.
    int keep_states = 0;

    /// Throws std::invalid_argument on non-physical settings.
    void validate() const;
};

/// Returns a warning when gamma (2J)^2 dt > 0.1, empty otherwise.
[[nodiscard]] std::string step_size_warning(HalfInt J, const KickConfig& cfg);

struct TrajectoryEnsemble {
    HalfInt J;
    std::int64_t n_traj = 0;
    std::vector<double> times;
    std::vector<MomentVector> mean;            ///< ensemble-mean moments at each recorded time
    std::vector<std::vector<double>> std_error;  ///< per recorded time, flat-indexed like moments
    std::vector<DensityMatrix> states;         ///< final states of the kept trajectories
    DensityMatrix mean_state;                  ///< mean at the last recorded time
    double max_norm_drift = 0.0;               ///< max | ||psi|| - 1 | at the end of any trajectory
    std::vector<std::string> warnings;
};

/// Worker threads: hardware concurrency, capped by SPINPHASE_THREADS when set.
[[nodiscard]] unsigned worker_count();

/**
 * Runs cfg.n_traj trajectories from rho0.
 *
 * A mixed rho0 is carried as its eigenvectors with eigenvalue weights, all
 * kicked by the same unitary. Trajectories are reduced in fixed chunks of
 * 64, and chunk sums are combined pairwise in index order, so results are
 * bit-identical for any thread count.
 */
[[nodiscard]] TrajectoryEnsemble run_ensemble(const DensityMatrix& rho0, const KickConfig& cfg,
                                              unsigned threads = 0);

}  // namespace spinphase
