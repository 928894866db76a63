// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace spinphase {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Flat index of the (L, k) multipole: L^2 + L + k, so (0,0) -> 0, (1,-1) -> 1, ...
[[nodiscard]] constexpr int moment_index(int L, int k) noexcept { return L * L + L + k; }

}  // namespace spinphase
