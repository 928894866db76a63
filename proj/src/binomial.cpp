// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

#include "spinphase/binomial.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace spinphase {

namespace {

__extension__ using u128 = unsigned __int128;

void require_rank(HalfInt J, int L) {
    require_spin(J);
    if (L < 0 || L > J.twice()) {
        throw std::out_of_range("rank L=" + std::to_string(L) + " outside [0, 2J] for J=" +
                                J.to_string());
    }
}

}  // namespace

double log_binomial(int n, int k) {
    if (k < 0 || k > n) {
        return -std::numeric_limits<double>::infinity();
    }
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

std::optional<std::uint64_t> binomial_exact(int n, int k) {
    if (k < 0 || k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    u128 acc = 1;
    for (int i = 1; i <= k; ++i) {
        acc = acc * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
        if (acc > std::numeric_limits<std::uint64_t>::max()) {
            return std::nullopt;
        }
    }
    return static_cast<std::uint64_t>(acc);
}

double log_povm_eigenvalue(HalfInt J, int L) {
    require_rank(J, L);
    const int two_j = J.twice();
    double acc = 0.0;
    for (int i = 0; i < L; ++i) {
        acc -= std::log1p(static_cast<double>(L + 1) / static_cast<double>(two_j - i));
    }
    return acc;
}

double povm_eigenvalue(HalfInt J, int L) { return std::exp(log_povm_eigenvalue(J, L)); }

std::optional<double> povm_eigenvalue_exact(HalfInt J, int L) {
    require_rank(J, L);
    const auto num = binomial_exact(J.twice(), L);
    const auto den = binomial_exact(J.twice() + L + 1, L);
    if (!num || !den) {
        return std::nullopt;
    }
    return static_cast<double>(*num) / static_cast<double>(*den);
}

}  // namespace spinphase
