// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file coherent.hpp
 * @brief SU(2) coherent states and the product quadrature that realizes the
 *        coherent-state resolution of identity exactly.
 */

#pragma once

#include <utility>
#include <vector>

#include "spinphase/half_int.hpp"
#include "spinphase/sphere.hpp"
#include "spinphase/su2.hpp"
#include "spinphase/types.hpp"

namespace spinphase {

struct CoherentState {
    HalfInt J;
    Vector amplitudes;  ///< components on |J,m>, m descending
    PhasePoint point;
};

/**
 * |z> = (1+|z|^2)^{-J} exp(z J_-) |J,J>, z = tan(theta/2) e^{i phi}.
 *
 * Components are evaluated as sqrt(C(2J, J+m)) cos^{J+m}(theta/2) sin^{J-m}(theta/2)
 * e^{i(J-m)phi}, which stays finite at the south pole. The |J,J> component is real
 * and non-negative.
 */
[[nodiscard]] CoherentState coherent_state(HalfInt J, const PhasePoint& p);

struct QuadratureNode {
    PhasePoint point;
    double weight;  ///< weight for the probability measure dmu0; all weights sum to 1
};

/**
 * Gauss-Legendre in cos(theta) times the trapezoid rule in phi.
 *
 * Integrates every spherical harmonic of degree <= degree() exactly.
 */
class SphericalQuadrature {
public:
    SphericalQuadrature(HalfInt J, int degree, int n_theta, int n_phi,
                        std::vector<QuadratureNode> nodes)
        : j_(J), degree_(degree), n_theta_(n_theta), n_phi_(n_phi), nodes_(std::move(nodes)) {}

    [[nodiscard]] HalfInt spin() const noexcept { return j_; }
    [[nodiscard]] int degree() const noexcept { return degree_; }
    [[nodiscard]] int n_theta() const noexcept { return n_theta_; }
    [[nodiscard]] int n_phi() const noexcept { return n_phi_; }
    [[nodiscard]] const std::vector<QuadratureNode>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }

    /// Weight of node i for dmu^J = (2J+1) dmu0.
    [[nodiscard]] double weight_J(std::size_t i) const {
        return static_cast<double>(j_.dim()) * nodes_[i].weight;
    }

    [[nodiscard]] std::vector<PhasePoint> points() const;

private:
    HalfInt j_;
    int degree_;
    int n_theta_;
    int n_phi_;
    std::vector<QuadratureNode> nodes_;
};

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton iteration on P_n).
[[nodiscard]] std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

/// n_theta = ceil((degree+1)/2) Gauss nodes in cos(theta), n_phi = degree+1.
[[nodiscard]] SphericalQuadrature build_quadrature(HalfInt J, int degree);

/// Degree used for the POVM map: 4J exactness plus a margin of 2.
[[nodiscard]] constexpr int default_povm_degree(HalfInt J) noexcept { return 2 * J.twice() + 2; }

/// Husimi value <z|rho|z>.
[[nodiscard]] double husimi(const DensityMatrix& rho, const PhasePoint& p);

/**
 * c_{L,k}(z) = <z| T_{L,k}^dagger |z>, evaluated in closed form as
 * (2J+1)^{-1/2} sqrt(r_L) conj(Y^k_L(theta, phi)), r_L = C(2J,L)/C(2J+L+1,L).
 */
[[nodiscard]] Complex ck_coefficient(HalfInt J, int L, int k, const PhasePoint& p);

}  // namespace spinphase
