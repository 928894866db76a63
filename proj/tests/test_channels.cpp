// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "spinphase/binomial.hpp"
#include "spinphase/channels.hpp"
#include "test_util.hpp"

using namespace spinphase;

namespace {

HalfInt H(int twice) { return HalfInt::from_twice(twice); }

double min_eig(const Matrix& m) {
    return Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = std::log(x[i]);
        const double b = std::log(y[i]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_SUITE("channels") {

TEST_CASE("Lindblad generator: fixed point, eigenoperators, ladder form") {
    for (int tj = 0; tj <= 10; ++tj) {
        const HalfInt J = H(tj);
        const SpinOperators s = spin_matrices(J);
        const auto B = TensorBasis::shared(J);
        const double g = 0.7;
        CHECK(lindblad_generator(DensityMatrix::maximally_mixed(J).mat, s, g).norm() < 1e-14);
        for (int L = 0; L <= tj; ++L) {
            for (int k = -L; k <= L; ++k) {
                const Matrix& T = B->op(L, k);
                const Matrix out = lindblad_generator(T, s, g);
                CHECK(max_abs_diff(out, -0.5 * g * L * (L + 1) * T) <= 1e-11);
                CHECK(max_abs_diff(out, lindblad_generator_ladder(T, s, g)) <= 1e-11);
            }
        }
        std::mt19937_64 rng(static_cast<unsigned>(tj));
        const DensityMatrix rho = testing::random_state(J, rng);
        const Matrix d = lindblad_generator(rho, {g, J});
        CHECK(std::abs(d.trace()) < 1e-12);
        CHECK(max_abs_diff(d, d.adjoint()) < 1e-12);
        CHECK(max_abs_diff(d, lindblad_generator_ladder(rho.mat, s, g)) < 1e-12);
    }
}

TEST_CASE("Lindblad generator on spin-up for J=1/2") {
    // [S_x,[S_x,S_z]] = [S_y,[S_y,S_z]] = S_z, so L(rho) = -gamma S_z for rho = I/2 + S_z.
    const DensityMatrix up = DensityMatrix::basis_state(H(1), H(1));
    Matrix expect(2, 2);
    expect << -0.5, 0, 0, 0.5;
    CHECK(max_abs_diff(lindblad_generator(up, {1.0, H(1)}), expect) < 1e-15);
}

TEST_CASE("analytic propagation") {
    const HalfInt J = H(2);
    const auto B = TensorBasis::shared(J);
    std::mt19937_64 rng(21);
    const MomentVector m = expand(testing::random_state(J, rng), *B);
    const LindbladParams p{1.0, J};
    CHECK(lindblad_propagate_analytic(m, 0.0, p).max_abs_diff(m) == 0.0);
    const MomentVector a = lindblad_propagate_analytic(lindblad_propagate_analytic(m, 0.3, p), 0.4, p);
    const MomentVector b = lindblad_propagate_analytic(m, 0.7, p);
    CHECK(a.max_abs_diff(b) < 1e-15);
    const MomentVector one = lindblad_propagate_analytic(m, 1.0, p);
    CHECK(std::abs(one(1, 0) - std::exp(-1.0) * m(1, 0)) < 1e-15);
    CHECK(std::abs(one(2, 0) - std::exp(-3.0) * m(2, 0)) < 1e-15);
    const MomentVector inf = lindblad_propagate_analytic(m, 1e3, p);
    const Reconstruction r = reconstruct(inf, *B);
    CHECK(max_abs_diff(r.state.mat, DensityMatrix::maximally_mixed(J).mat) < 1e-15);
    CHECK_THROWS_AS((void)lindblad_propagate_analytic(m, -1.0, p), std::invalid_argument);
    CHECK_THROWS_AS((void)lindblad_propagate_analytic(m, 1.0, {0.0, J}), std::invalid_argument);
}

TEST_CASE("RK4 against the analytic solution, with fourth-order convergence") {
    std::mt19937_64 rng(23);
    for (int tj = 0; tj <= 8; ++tj) {
        const HalfInt J = H(tj);
        const auto B = TensorBasis::shared(J);
        const DensityMatrix rho = testing::random_state(J, rng);
        const LindbladParams p{1.0, J};
        const DensityMatrix num = lindblad_propagate_numeric(rho, 1.0, p, 1000);
        const Matrix exact = reconstruct(lindblad_propagate_analytic(expand(rho, *B), 1.0, p), *B).state.mat;
        CHECK(max_abs_diff(num.mat, exact) <= 1e-10);
        CHECK(std::abs(num.mat.trace() - 1.0) < 1e-12);
    }
    // Step halving on J = 1, where 20 and 40 steps are far from round-off.
    const HalfInt J = H(2);
    const auto B = TensorBasis::shared(J);
    const DensityMatrix rho = testing::random_state(J, rng);
    const LindbladParams p{1.0, J};
    const Matrix exact = reconstruct(lindblad_propagate_analytic(expand(rho, *B), 1.0, p), *B).state.mat;
    const double e1 = max_abs_diff(lindblad_propagate_numeric(rho, 1.0, p, 20).mat, exact);
    const double e2 = max_abs_diff(lindblad_propagate_numeric(rho, 1.0, p, 40).mat, exact);
    CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.1));
    CHECK(recommended_rk4_steps(J, 1.0, 1.0) == 30);
    CHECK_THROWS_AS((void)lindblad_propagate_numeric(rho, 1.0, p, 0), std::invalid_argument);
}

TEST_CASE("POVM spectral factors") {
    const auto B = TensorBasis::shared(H(1));
    MomentVector m = expand(DensityMatrix::basis_state(H(1), H(1)), *B);
    const MomentVector out = povm_apply_spectral(m);
    CHECK(std::abs(out(1, 0) - m(1, 0) / 3.0) < 1e-16);
    CHECK(out(0, 0) == m(0, 0));
    const auto B1 = TensorBasis::shared(H(2));
    std::mt19937_64 rng(25);
    const MomentVector m1 = expand(testing::random_state(H(2), rng), *B1);
    const MomentVector o1 = povm_apply_spectral(m1);
    CHECK(std::abs(o1(1, -1) - 0.5 * m1(1, -1)) < 1e-16);
    CHECK(std::abs(o1(2, 2) - 0.1 * m1(2, 2)) < 1e-16);
    const MomentVector o3 = povm_apply_spectral(m1, 3);
    CHECK(std::abs(o3(2, 1) - 1e-3 * m1(2, 1)) < 1e-16);
    CHECK(povm_apply_spectral(m1, 0).max_abs_diff(m1) == 0.0);
}

TEST_CASE("POVM quadrature realization matches the spectral map") {
    std::mt19937_64 rng(27);
    for (int tj = 0; tj <= 8; ++tj) {
        const HalfInt J = H(tj);
        const auto B = TensorBasis::shared(J);
        const SphericalQuadrature q = build_quadrature(J, default_povm_degree(J));
        const DensityMatrix mixed = DensityMatrix::maximally_mixed(J);
        CHECK(max_abs_diff(povm_apply_quadrature(mixed, q).mat, mixed.mat) < 1e-13);
        for (int trial = 0; trial < 20; ++trial) {
            const DensityMatrix rho = testing::random_state(J, rng);
            const Matrix quad = povm_apply_quadrature(rho, q).mat;
            const Matrix spec = reconstruct(povm_apply_spectral(expand(rho, *B)), *B).state.mat;
            CHECK(max_abs_diff(quad, spec) <= 1e-11);
            CHECK(min_eig(quad) >= -1e-10);
            CHECK(std::abs(quad.trace() - 1.0) < 1e-12);
        }
    }
    const SphericalQuadrature low = build_quadrature(H(2), 3);
    CHECK_THROWS_AS((void)povm_apply_quadrature(DensityMatrix::maximally_mixed(H(2)), low),
                    std::invalid_argument);
}

TEST_CASE("Lindblad flow keeps random states positive and unit trace") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        const HalfInt J = H(1 + static_cast<int>(rng() % 8));
        const auto B = TensorBasis::shared(J);
        const DensityMatrix rho = testing::random_pure(J, rng);
        for (double t : {0.01, 0.1, 1.0}) {
            const Matrix out = reconstruct(lindblad_propagate_analytic(expand(rho, *B), t, {1.0, J}), *B).state.mat;
            CHECK(min_eig(out) >= -1e-10);
            CHECK(std::abs(out.trace() - 1.0) < 1e-12);
        }
    }
    CHECK_NOTHROW(require_positive(DensityMatrix::maximally_mixed(H(3))));
    Matrix bad(2, 2);
    bad << 1.2, 0, 0, -0.2;
    CHECK_THROWS_AS(require_positive({H(1), bad}), std::invalid_argument);
}

TEST_CASE("decay rates") {
    const DecayRateTable half = decay_rates(H(1), 2.0);
    CHECK(half.povm[1] == doctest::Approx(std::log(3.0)).epsilon(1e-15));
    const DecayRateTable one = decay_rates(H(2), 1.0);
    CHECK(std::abs(one.lindblad[2] / one.lindblad[1] - 3.0) < 1e-15);
    CHECK(std::abs(one.povm[2] / one.povm[1] - std::log(10.0) / std::log(2.0)) < 1e-14);
    for (int tj = 0; tj <= 40; ++tj) {
        const DecayRateTable t = decay_rates(H(tj), 0.3);
        CHECK(t.lindblad[0] == 0.0);
        CHECK(t.povm[0] == 0.0);
        for (int L = 1; L <= tj; ++L) {
            CHECK(t.lindblad[static_cast<std::size_t>(L)] > t.lindblad[static_cast<std::size_t>(L - 1)]);
            CHECK(t.povm[static_cast<std::size_t>(L)] > t.povm[static_cast<std::size_t>(L - 1)]);
        }
        if (tj > 1) {
            // With gamma = 1/J the two models disagree at some rank.
            const DecayRateTable u = decay_rates(H(tj), 2.0 / tj);
            double gap = 0.0;
            for (int L = 1; L <= tj; ++L) {
                gap = std::max(gap, std::abs(u.povm[static_cast<std::size_t>(L)] - u.lindblad[static_cast<std::size_t>(L)]));
            }
            CHECK(gap > 1e-3);
        }
    }
    CHECK_THROWS_AS((void)decay_rates(H(2), 0.0), std::invalid_argument);
}

TEST_CASE("three-term large-J expansion") {
    CHECK(povm_rate_large_J(H(100), 0) == 0.0);
    for (int L : {1, 2, 3}) {
        std::vector<double> js, errs;
        for (int j : {25, 50, 100, 200}) {
            js.push_back(j);
            errs.push_back(std::abs(povm_rate_large_J(H(2 * j), L) - povm_rate(H(2 * j), L)));
        }
        CHECK(loglog_slope(js, errs) == doctest::Approx(-4.0).epsilon(0.05));
    }
    const double lind = lindblad_rate(1.0 / 100.0, 1);
    CHECK(std::abs(povm_rate(H(200), 1) - lind) / lind <= 0.02);
}

TEST_CASE("ratio statistic") {
    const HalfInt J = H(2);
    const auto B = TensorBasis::shared(J);
    const MomentVector m = expand(DensityMatrix::basis_state(J, H(2)), *B);
    std::vector<Complex> a{m(1, 0)}, b{m(2, 0)}, pa{m(1, 0)}, pb{m(2, 0)};
    for (double t : {0.1, 0.5, 1.0, 3.0}) {
        const MomentVector e = lindblad_propagate_analytic(m, t, {0.37, J});
        a.push_back(e(1, 0));
        b.push_back(e(2, 0));
    }
    for (int n = 1; n <= 4; ++n) {
        const MomentVector e = povm_apply_spectral(m, n);
        pa.push_back(e(1, 0));
        pb.push_back(e(2, 0));
    }
    const RatioReport lr = ratio_statistic(a, b);
    CHECK(std::abs(lr.mean - 3.0) < 1e-10);
    CHECK(lr.time_independent);
    const RatioReport pr = ratio_statistic(pa, pb);
    CHECK(std::abs(pr.mean - std::log(10.0) / std::log(2.0)) < 1e-10);
    std::vector<Complex> zero{0.0, 0.1};
    const std::vector<Complex> decaying{1.0, 0.5};
    CHECK_THROWS_AS((void)ratio_statistic(zero, decaying), std::invalid_argument);
    std::vector<Complex> one{1.0};
    CHECK_THROWS_AS((void)ratio_statistic(one, one), std::invalid_argument);
    // A time-dependent ratio is flagged.
    std::vector<Complex> x{1.0, 0.5, 0.25}, y{1.0, 0.25, 0.1};
    CHECK_FALSE(ratio_statistic(x, y).time_independent);
}

TEST_CASE("region probability") {
    const auto north = [](const PhasePoint& p) { return p.theta < 0.5 * kPi; };
    for (int tj = 0; tj <= 6; ++tj) {
        const HalfInt J = H(tj);
        // An even number of Gauss rings keeps the equator off the node set.
        const SphericalQuadrature q = build_quadrature(J, 4 * tj + 2);
        std::mt19937_64 rng(static_cast<unsigned>(31 + tj));
        const DensityMatrix rho = testing::random_state(J, rng);
        const RegionProbability all = region_probability(rho, [](const PhasePoint&) { return true; }, q);
        CHECK(std::abs(all.value - 1.0) < 1e-10);
        const RegionProbability half = region_probability(DensityMatrix::maximally_mixed(J), north, q);
        CHECK(std::abs(half.value - 0.5) < 1e-12);
    }
    // Spin-up, J = 1/2: int_0^{pi/2} cos^2(theta/2) sin(theta) dtheta = 3/4.
    const DensityMatrix up = DensityMatrix::basis_state(H(1), H(1));
    const RegionProbability p = region_probability(up, north, build_quadrature(H(1), 402));
    CHECK(std::abs(p.value - 0.75) < 1e-4);
    const RegionProbability none =
        region_probability(up, [](const PhasePoint& x) { return x.theta < 1e-6; }, build_quadrature(H(1), 4));
    CHECK(none.value == 0.0);
    CHECK(none.low_resolution);
    CHECK_FALSE(none.warning.empty());
}

}  // TEST_SUITE
