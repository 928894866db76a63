// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>

#include "spinphase/half_int.hpp"

namespace spinphase {

/// log C(n, k) via log-gamma; -inf outside 0 <= k <= n.
[[nodiscard]] double log_binomial(int n, int k);

/// Exact C(n, k) in 64-bit arithmetic, or nullopt on overflow.
[[nodiscard]] std::optional<std::uint64_t> binomial_exact(int n, int k);

/**
 * Log of the coherent-state POVM eigenvalue r_L = C(2J, L) / C(2J+L+1, L).
 *
 * Evaluated as -sum_{i<L} log1p((L+1)/(2J-i)), which stays accurate for
 * large J where a difference of log-gamma values would cancel.
 */
[[nodiscard]] double log_povm_eigenvalue(HalfInt J, int L);

[[nodiscard]] double povm_eigenvalue(HalfInt J, int L);

/// Same ratio from exact integer binomials; available while C(2J+L+1, L) fits in 64 bits.
[[nodiscard]] std::optional<double> povm_eigenvalue_exact(HalfInt J, int L);

}  // namespace spinphase
