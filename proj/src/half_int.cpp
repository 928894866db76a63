// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

#include "spinphase/half_int.hpp"

#include <charconv>
#include <limits>
#include <stdexcept>

namespace spinphase {

namespace {

int parse_int(std::string_view text, std::string_view whole) {
    int value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && text.front() == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last) {
        throw std::invalid_argument("malformed half-integer '" + std::string(whole) + "'");
    }
    return value;
}

}  // namespace

HalfInt HalfInt::parse(std::string_view text) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    if (text.empty()) {
        throw std::invalid_argument("empty half-integer string");
    }
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        const int v = parse_int(text, text);
        if (v > std::numeric_limits<int>::max() / 2 || v < std::numeric_limits<int>::min() / 2) {
            throw std::invalid_argument("half-integer out of range");
        }
        return from_int(v);
    }
    const int num = parse_int(text.substr(0, slash), text);
    const int den = parse_int(text.substr(slash + 1), text);
    if (den != 2) {
        throw std::invalid_argument("half-integer denominator must be 2 in '" + std::string(text) +
                                    "'");
    }
    return from_twice(num);
}

std::string HalfInt::to_string() const {
    if (is_integer()) {
        return std::to_string(twice_ / 2);
    }
    return std::to_string(twice_) + "/2";
}

void require_spin(HalfInt J) {
    if (J.twice() < 0) {
        throw std::invalid_argument("spin must be non-negative, got " + J.to_string());
    }
}

HalfInt parse_spin(std::string_view text) {
    const HalfInt J = HalfInt::parse(text);
    require_spin(J);
    return J;
}

}  // namespace spinphase
