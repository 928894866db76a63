// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file su2.hpp
 * @brief Spin matrices, Clebsch-Gordan coefficients and the irreducible
 *        tensor operator basis T^J_{L,k}.
 *
 * All matrices use the J_z eigenbasis ordered by descending m: row 0 is
 * |J,J>, row 2J is |J,-J>. Phases follow Condon-Shortley.
 */

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "spinphase/half_int.hpp"
#include "spinphase/types.hpp"

namespace spinphase {

struct SpinOperators {
    HalfInt J;
    Matrix jx, jy, jz, jplus, jminus, j_squared;
};

/// J_x, J_y, J_z and ladder operators with hbar = 1.
[[nodiscard]] SpinOperators spin_matrices(HalfInt J);

/**
 * Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M>.
 *
 * Racah's alternating sum is evaluated in exact rational arithmetic and
 * rounded to double once at the end. Returns 0 when M != m1 + m2 or the
 * triangle condition fails. Throws std::invalid_argument for malformed
 * arguments (negative spin, |m| > j, or m of the wrong integrality).
 */
[[nodiscard]] double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J,
                                    HalfInt M);

/// Tensor operators T^J_{L,k} for 0 <= L <= 2J, |k| <= L. Immutable once built.
class TensorBasis {
public:
    [[nodiscard]] static TensorBasis build(HalfInt J);

    /// Process-wide cached basis; safe to call from several threads.
    [[nodiscard]] static std::shared_ptr<const TensorBasis> shared(HalfInt J);

    [[nodiscard]] HalfInt spin() const noexcept { return j_; }
    [[nodiscard]] int dim() const noexcept { return j_.dim(); }
    [[nodiscard]] int max_rank() const noexcept { return j_.twice(); }
    [[nodiscard]] std::size_t size() const noexcept { return ops_.size(); }

    /// T_{L,k}; throws std::out_of_range for invalid (L, k).
    [[nodiscard]] const Matrix& op(int L, int k) const;
    [[nodiscard]] const Matrix& op_at(std::size_t flat) const { return ops_.at(flat); }

private:
    TensorBasis(HalfInt J, std::vector<Matrix> ops) : j_(J), ops_(std::move(ops)) {}

    HalfInt j_;
    std::vector<Matrix> ops_;
};

/// Validation outcome for a candidate density matrix.
struct StateCheck {
    double hermiticity_error = 0.0;
    double trace_error = 0.0;
    double min_eigenvalue = 0.0;
    bool ok = false;
};

struct DensityMatrix {
    HalfInt J;
    Matrix mat;

    /// Throws std::invalid_argument unless `mat` is a valid state within the tolerances.
    [[nodiscard]] static DensityMatrix checked(HalfInt J, Matrix mat, double herm_tol = 1e-12,
                                               double trace_tol = 1e-12,
                                               double eig_floor = -1e-10);

    [[nodiscard]] static DensityMatrix maximally_mixed(HalfInt J);
    [[nodiscard]] static DensityMatrix pure(HalfInt J, const Vector& psi);
    /// |J,m><J,m|.
    [[nodiscard]] static DensityMatrix basis_state(HalfInt J, HalfInt m);

    [[nodiscard]] StateCheck check(double herm_tol = 1e-12, double trace_tol = 1e-12,
                                   double eig_floor = -1e-10) const;
    [[nodiscard]] double purity() const;
};

/// Coefficients rho_{L,k} = tr(T_{L,k}^dagger rho), flat-indexed by moment_index().
class MomentVector {
public:
    MomentVector() = default;
    explicit MomentVector(HalfInt J) : j_(J), coeffs_(static_cast<std::size_t>(J.dim() * J.dim())) {}
    MomentVector(HalfInt J, std::vector<Complex> coeffs);

    [[nodiscard]] HalfInt spin() const noexcept { return j_; }
    [[nodiscard]] int max_rank() const noexcept { return j_.twice(); }

    [[nodiscard]] Complex& operator()(int L, int k);
    [[nodiscard]] Complex operator()(int L, int k) const;

    [[nodiscard]] const std::vector<Complex>& coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] std::vector<Complex>& coeffs() noexcept { return coeffs_; }

    /// Largest violation of rho_{L,-k} = (-1)^k conj(rho_{L,k}).
    [[nodiscard]] double hermitian_image_error() const;

    /// max_{L,k} |a - b|.
    [[nodiscard]] double max_abs_diff(const MomentVector& other) const;

private:
    HalfInt j_;
    std::vector<Complex> coeffs_;
};

[[nodiscard]] MomentVector expand(const Matrix& op, const TensorBasis& basis);
[[nodiscard]] MomentVector expand(const DensityMatrix& rho, const TensorBasis& basis);

struct Reconstruction {
    DensityMatrix state;
    bool hermitian = true;
    std::string warning;
};

/// sum rho_{Lk} T_{L,k}. The result is flagged (not rejected) when the moments are not Hermitian.
[[nodiscard]] Reconstruction reconstruct(const MomentVector& moments, const TensorBasis& basis);

struct CommutatorResidual {
    double jz = 0.0;      ///< max ||[J_z, T_{L,k}] - k T_{L,k}||_F
    double jplus = 0.0;   ///< ladder relation with J_+
    double jminus = 0.0;  ///< ladder relation with J_-
    [[nodiscard]] double max() const noexcept;
};

[[nodiscard]] CommutatorResidual commutator_check(const TensorBasis& basis,
                                                  const SpinOperators& ops);

/// max |a_ij - b_ij|.
[[nodiscard]] double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace spinphase
