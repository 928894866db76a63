// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace spinphase {

/**
 * Exact half-integer quantum number, stored as twice its value.
 *
 * Used both for spins J (non-negative) and magnetic quantum numbers m
 * (either sign). Spin-valued arguments are validated with require_spin().
 */
class HalfInt {
public:
    constexpr HalfInt() noexcept = default;

    [[nodiscard]] static constexpr HalfInt from_twice(int twice) noexcept {
        HalfInt h;
        h.twice_ = twice;
        return h;
    }

    [[nodiscard]] static constexpr HalfInt from_int(int value) noexcept {
        return from_twice(2 * value);
    }

    /// Parses "3", "-2", "5/2", "-1/2". Floats and other denominators are rejected.
    [[nodiscard]] static HalfInt parse(std::string_view text);

    [[nodiscard]] constexpr int twice() const noexcept { return twice_; }
    [[nodiscard]] constexpr double value() const noexcept { return 0.5 * twice_; }
    [[nodiscard]] constexpr bool is_integer() const noexcept { return twice_ % 2 == 0; }

    /// Dimension 2J+1 of the spin-J representation.
    [[nodiscard]] constexpr int dim() const noexcept { return twice_ + 1; }

    [[nodiscard]] std::string to_string() const;

    constexpr auto operator<=>(const HalfInt&) const noexcept = default;

    constexpr HalfInt operator-() const noexcept { return from_twice(-twice_); }
    constexpr HalfInt operator+(HalfInt o) const noexcept { return from_twice(twice_ + o.twice_); }
    constexpr HalfInt operator-(HalfInt o) const noexcept { return from_twice(twice_ - o.twice_); }

private:
    int twice_ = 0;
};

/// Throws std::invalid_argument unless J >= 0.
void require_spin(HalfInt J);

/// Parses a spin string and rejects negative values.
[[nodiscard]] HalfInt parse_spin(std::string_view text);

/// Magnetic quantum number of row `row` in the descending eigenbasis (row 0 = m = J).
[[nodiscard]] constexpr HalfInt m_of_row(HalfInt J, int row) noexcept {
    return HalfInt::from_twice(J.twice() - 2 * row);
}

[[nodiscard]] constexpr int row_of_m(HalfInt J, HalfInt m) noexcept {
    return (J.twice() - m.twice()) / 2;
}

}  // namespace spinphase
