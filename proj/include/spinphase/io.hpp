// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "spinphase/channels.hpp"
#include "spinphase/phasespace.hpp"
#include "spinphase/su2.hpp"

namespace spinphase {

/// File-system failure (missing input, unwritable output).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

[[nodiscard]] std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Shortest decimal text that parses back to the same double.
[[nodiscard]] std::string format_double(double x);

/// {"J": "1", "matrix": [[[re, im], ...], ...]}, row-major, m descending.
[[nodiscard]] std::string state_to_json(const DensityMatrix& rho);

/// Inverse of state_to_json; throws std::invalid_argument on malformed or invalid states.
[[nodiscard]] DensityMatrix state_from_json(std::string_view text);

/// Columns L,gamma_lindblad,gamma_povm.
[[nodiscard]] std::string rates_csv(const DecayRateTable& table);

/// Columns theta,phi,value.
[[nodiscard]] std::string grid_csv(const QuasiDist& F);

/// {"sigma": s, "t": t, "coeffs": [{"L", "k", "re", "im"}, ...]}.
[[nodiscard]] std::string spectral_json(const QuasiDist& F);

/**
 * Plain PPM (P3) equirectangular raster, one pixel per grid point, row 0 at
 * theta = 0. Diverging map: white at 0, red for positive and blue for
 * negative values, saturating at max |F|.
 */
[[nodiscard]] std::string render_ppm(const QuasiDist& F);

/// Array of {"J", "L", "k", "matrix": [[re, im], ...]} with the matrix flattened row-major.
[[nodiscard]] std::string tensor_table_json(const TensorBasis& basis);

}  // namespace spinphase
