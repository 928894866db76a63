// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file harmonics.hpp
 * @brief Spherical harmonics normalized to the uniform probability measure.
 *
 * Y^k_L = sqrt(4 pi) Y^{k,CS}_L, so Y^0_0 = 1 and
 * int Y^k_L conj(Y^k'_L') dmu0 = delta delta with dmu0 = sin(theta) dtheta dphi / (4 pi).
 */

#pragma once

#include <vector>

#include "spinphase/sphere.hpp"
#include "spinphase/types.hpp"

namespace spinphase {

/// Y^k_L(theta, phi); throws std::out_of_range unless |k| <= L.
[[nodiscard]] Complex spherical_harmonic(int L, int k, const PhasePoint& p);

/// All Y^k_L with L <= max_rank, indexed by moment_index(L, k).
[[nodiscard]] std::vector<Complex> spherical_harmonics_all(int max_rank, const PhasePoint& p);

/**
 * Normalized associated Legendre values N^m_L(theta) for 0 <= m <= L <= max_rank,
 * with Y^m_L = N^m_L e^{i m phi}. Stored at index L*(L+1)/2 + m.
 */
[[nodiscard]] std::vector<double> normalized_legendre_all(int max_rank, double theta);

/// Legendre polynomial P_L(x) with P_L(1) = 1.
[[nodiscard]] double legendre(int L, double x);

/// P_L(cos eta) for the great-circle angle eta between p and q.
[[nodiscard]] double zonal_harmonic(int L, const PhasePoint& p, const PhasePoint& q);

}  // namespace spinphase
