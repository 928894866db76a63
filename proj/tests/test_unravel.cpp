// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "spinphase/channels.hpp"
#include "spinphase/unravel.hpp"
#include "test_util.hpp"

using namespace spinphase;

namespace {

HalfInt H(int twice) { return HalfInt::from_twice(twice); }

Eigen::Vector3d random_axis(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    return {n(rng), n(rng), n(rng)};
}

}  // namespace

TEST_SUITE("unravel") {

TEST_CASE("Wigner-D kick against the generator eigendecomposition") {
    std::mt19937_64 rng(61);
    for (int tj = 0; tj <= 12; ++tj) {
        const HalfInt J = H(tj);
        const SpinOperators S = spin_matrices(J);
        const KickGenerator gen(J);
        for (int trial = 0; trial < 20; ++trial) {
            const Eigen::Vector3d xi = random_axis(rng);
            for (double scale : {1e-3, 0.1, 1.0, 10.0}) {
                const Matrix U = gen.unitary(xi, 1.0, scale);
                const Matrix V = kick_unitary_eigen(S, xi, 1.0, scale);
                CHECK(max_abs_diff(U, V) <= 1e-11);
                CHECK(max_abs_diff(U * U.adjoint(), Matrix::Identity(J.dim(), J.dim())) <= 1e-12);
            }
        }
        CHECK(max_abs_diff(gen.unitary(Eigen::Vector3d::Zero(), 1.0, 1e-3),
                           Matrix::Identity(J.dim(), J.dim())) == 0.0);
        CHECK(max_abs_diff(gen.unitary(random_axis(rng), 0.0, 1e-3),
                           Matrix::Identity(J.dim(), J.dim())) == 0.0);
    }
}

TEST_CASE("kicks preserve purity and trace") {
    std::mt19937_64 rng(63);
    Rng r = trajectory_rng(1, 2);
    for (int tj = 1; tj <= 6; ++tj) {
        const HalfInt J = H(tj);
        Vector psi = testing::random_vector(J, rng);
        Matrix rho = testing::random_state(J, rng).mat;
        const double p0 = (rho * rho).trace().real();
        for (int s = 0; s < 200; ++s) {
            psi = kick_step(psi, J, 1.0, 1e-2, r);
            rho = kick_step(rho, J, 1.0, 1e-2, r);
        }
        CHECK(std::abs(psi.norm() - 1.0) <= 1e-12);
        CHECK(std::abs(rho.trace() - 1.0) <= 1e-12);
        CHECK(std::abs((rho * rho).trace().real() - p0) <= 1e-12);
    }
}

TEST_CASE("trajectory streams are reproducible and distinct") {
    Rng a = trajectory_rng(7, 3);
    Rng b = trajectory_rng(7, 3);
    Rng c = trajectory_rng(7, 4);
    Rng d = trajectory_rng(8, 3);
    const Eigen::Vector3d xa = draw_noise(a);
    CHECK((xa - draw_noise(b)).norm() == 0.0);
    CHECK((xa - draw_noise(c)).norm() > 0.0);
    CHECK((xa - draw_noise(d)).norm() > 0.0);
}

TEST_CASE("averaged single kick reproduces the generator") {
    // E[U rho U^dagger] - rho = L(rho) dt + O(dt^2), checked elementwise for J = 1/2.
    const HalfInt J = H(1);
    const double dt = 1e-3;
    const DensityMatrix up = DensityMatrix::basis_state(J, H(1));
    const Matrix expect = lindblad_generator(up, {1.0, J}) * dt;
    const KickGenerator gen(J);
    const int n = 1000000;
    Rng rng = trajectory_rng(11, 0);
    Matrix sum = Matrix::Zero(2, 2);
    Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(2, 2);
    for (int i = 0; i < n; ++i) {
        const Matrix U = gen.unitary(draw_noise(rng), 1.0, dt);
        const Matrix delta = U * up.mat * U.adjoint() - up.mat;
        sum += delta;
        sq += delta.cwiseAbs2();
    }
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const Complex mean = sum(a, b) / static_cast<double>(n);
            const double var = (sq(a, b) - n * std::norm(mean)) / (n - 1.0);
            const double se = std::sqrt(var / n);
            CHECK(std::abs(mean - expect(a, b)) <= 5.0 * se + 1e-9);
        }
    }
}

TEST_CASE("ensemble: gamma = 0 and determinism") {
    const HalfInt J = H(2);
    std::mt19937_64 rng(65);
    const DensityMatrix rho = testing::random_state(J, rng);
    KickConfig cfg;
    cfg.gamma = 0.0;
    cfg.n_steps = 50;
    cfg.n_traj = 130;
    const TrajectoryEnsemble still = run_ensemble(rho, cfg, 3);
    const MomentVector m0 = expand(rho, *TensorBasis::shared(J));
    for (const auto& m : still.mean) CHECK(m.max_abs_diff(m0) == 0.0);
    for (const auto& se : still.std_error)
        for (double v : se) CHECK(v == 0.0);

    cfg.gamma = 1.0;
    cfg.record_steps = {0, 10, 50};
    const TrajectoryEnsemble a = run_ensemble(rho, cfg, 1);
    const TrajectoryEnsemble b = run_ensemble(rho, cfg, 4);
    REQUIRE(a.mean.size() == 3);
    CHECK(a.times[1] == doctest::Approx(0.01));
    for (std::size_t r = 0; r < a.mean.size(); ++r) {
        CHECK(a.mean[r].max_abs_diff(b.mean[r]) == 0.0);
        CHECK(a.std_error[r] == b.std_error[r]);
    }
    CHECK(a.mean[0].max_abs_diff(m0) == 0.0);
    cfg.seed = 1;
    CHECK(run_ensemble(rho, cfg, 2).mean[2].max_abs_diff(a.mean[2]) > 0.0);
}

TEST_CASE("ensemble: norm drift, kept states and warnings") {
    const HalfInt J = H(2);
    KickConfig cfg;
    cfg.n_steps = 10000;
    cfg.n_traj = 4;
    cfg.keep_states = 2;
    const TrajectoryEnsemble e = run_ensemble(DensityMatrix::basis_state(J, H(2)), cfg, 2);
    CHECK(e.max_norm_drift <= 1e-10);
    REQUIRE(e.states.size() == 2);
    CHECK(std::abs(e.states[0].purity() - 1.0) <= 1e-10);
    CHECK(e.warnings.empty());

    cfg.dt = 0.1;
    cfg.n_steps = 2;
    CHECK_FALSE(run_ensemble(DensityMatrix::basis_state(J, H(2)), cfg, 1).warnings.empty());
    cfg.record_steps = {3};
    CHECK_THROWS_AS((void)run_ensemble(DensityMatrix::basis_state(J, H(2)), cfg, 1), std::invalid_argument);
    KickConfig bad;
    bad.gamma = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = KickConfig{};
    bad.n_traj = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("ensemble mean is rotation covariant") {
    // Rotating rho0 and rotating the ensemble mean give the same result within noise.
    const HalfInt J = H(2);
    const KickGenerator gen(J);
    const Matrix R = gen.rotation({0.3, -1.1, 0.7});
    const DensityMatrix up = DensityMatrix::basis_state(J, H(2));
    const DensityMatrix turned{J, R * up.mat * R.adjoint()};
    KickConfig cfg;
    cfg.n_steps = 200;
    cfg.n_traj = 4000;
    cfg.seed = 5;
    const TrajectoryEnsemble a = run_ensemble(up, cfg);
    const TrajectoryEnsemble b = run_ensemble(turned, cfg);
    const auto B = TensorBasis::shared(J);
    const MomentVector rotated = expand(Matrix(R * a.mean_state.mat * R.adjoint()), *B);
    const MomentVector lin = lindblad_propagate_analytic(expand(turned, *B), 0.2, {1.0, J});
    double worst = 0.0;
    for (std::size_t j = 0; j < B->size(); ++j) {
        const double se = b.std_error.back()[j] + 1e-12;
        worst = std::max(worst, std::abs(b.mean.back().coeffs()[j] - lin.coeffs()[j]) / se);
    }
    CHECK(worst <= 5.0);
    CHECK(rotated.max_abs_diff(lin) <= 0.05);
}

TEST_CASE("ensemble agrees with the analytic flow and its bias shrinks with dt") {
    const HalfInt J = H(2);
    const auto B = TensorBasis::shared(J);
    const DensityMatrix up = DensityMatrix::basis_state(J, H(2));
    const MomentVector exact = lindblad_propagate_analytic(expand(up, *B), 0.5, {1.0, J});
    KickConfig cfg;
    cfg.n_traj = 2000;
    cfg.seed = 9;
    for (double dt : {1e-2, 1e-3}) {
        cfg.dt = dt;
        cfg.n_steps = static_cast<int>(std::lround(0.5 / dt));
        const TrajectoryEnsemble e = run_ensemble(up, cfg);
        for (std::size_t j = 0; j < B->size(); ++j) {
            const double dev = std::abs(e.mean.back().coeffs()[j] - exact.coeffs()[j]);
            // dt bias is O(gamma J^2 dt); allow for it on the coarse step.
            CHECK(dev <= 5.0 * e.std_error.back()[j] + 4.0 * dt + 1e-12);
        }
    }
}

TEST_CASE("worker count honours SPINPHASE_THREADS") {
    ::setenv("SPINPHASE_THREADS", "1", 1);
    CHECK(worker_count() == 1u);
    ::setenv("SPINPHASE_THREADS", "junk", 1);
    CHECK(worker_count() >= 1u);
    ::unsetenv("SPINPHASE_THREADS");
}

}  // TEST_SUITE
