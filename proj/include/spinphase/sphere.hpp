// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "spinphase/types.hpp"

namespace spinphase {

/// Point (theta, phi) on the spin phase-space sphere, theta in [0, pi], phi in [0, 2 pi).
struct PhasePoint {
    double theta = 0.0;
    double phi = 0.0;

    /// Stereographic coordinate tan(theta/2) e^{i phi}; infinite at the south pole.
    [[nodiscard]] Complex z() const;
    [[nodiscard]] Eigen::Vector3d direction() const;
};

/// cos of the great-circle angle between two points.
[[nodiscard]] double geodesic_cosine(const PhasePoint& a, const PhasePoint& b);

/// Set of sample points; equiangular grids remember their shape for raster export.
struct SphereGrid {
    std::vector<PhasePoint> points;
    int n_theta = 0;  ///< rows (0 when the grid is unstructured)
    int n_phi = 0;

    /// theta_i = i pi / (n_theta - 1) including both poles, phi_j = 2 pi j / n_phi. Row-major.
    [[nodiscard]] static SphereGrid equiangular(int n_theta, int n_phi);

    [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
};

}  // namespace spinphase
