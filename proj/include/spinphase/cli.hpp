// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file cli.hpp
 * @brief Configuration model and entry point of the spinphase command-line tool.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spinphase/su2.hpp"

namespace spinphase::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

/// Invalid command-line or configuration-file input.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Model { lindblad, povm, unravel };
enum class GammaRule { fixed, one_over_J };

[[nodiscard]] Model parse_model(std::string_view text);
[[nodiscard]] GammaRule parse_gamma_rule(std::string_view text);

/// Accepts a real number or the aliases q (-1), w (0) and p (+1).
[[nodiscard]] double parse_sigma(std::string_view text);

struct InitialState {
    enum class Kind { coherent, cat, basis, file };
    Kind kind = Kind::coherent;
    double theta = 0.0;
    double phi = 0.0;
    HalfInt m;         ///< basis(m)
    std::string path;  ///< file(path)

    /**
     * "coherent" (north pole), "coherent:THETA,PHI", "cat", "basis:M" with M
     * an exact half-integer such as "-1/2", or "file:PATH" for a state snapshot.
     */
    [[nodiscard]] static InitialState parse(std::string_view text);

    /// Throws ConfigError on mismatched spin, IoError on unreadable files.
    [[nodiscard]] DensityMatrix build(HalfInt J) const;
};

struct RunConfig {
    std::string J = "1";
    Model model = Model::lindblad;
    std::optional<double> gamma;  ///< explicit rate; wins over gamma_rule
    GammaRule gamma_rule = GammaRule::one_over_J;
    InitialState initial_state;
    double sigma = 0.0;
    std::vector<double> times = {0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
    std::vector<int> iterations = {0, 1, 2, 3, 4, 5};
    int n_theta = 181;
    int n_phi = 360;
    std::filesystem::path output_dir = "spinphase_out";
    std::uint64_t seed = 0;
    double dt = 1e-3;
    std::int64_t n_traj = 10000;
    bool snapshots = false;

    /// Throws ConfigError when any field is out of range.
    void validate() const;
};

/// Applies the keys of a JSON configuration document on top of `base`.
[[nodiscard]] RunConfig apply_config_json(RunConfig base, std::string_view text);

/**
 * Rate in use: the explicit gamma, else 1/J under one_over_J, else 1.
 * J = 0 under one_over_J falls back to 1.
 */
[[nodiscard]] double effective_gamma(const RunConfig& cfg, HalfInt J);

/// Runs one invocation; `args` excludes the program name. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spinphase::cli
