// Copyright 2026 The spinphase Authors
// SPDX-License-Identifier: Apache-2.0

#include "spinphase/su2.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <map>
#include <mutex>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

namespace spinphase {

namespace mp = boost::multiprecision;

namespace {

const mp::cpp_int& factorial(int n) {
    static std::mutex mutex;
    // deque keeps references valid while the table grows.
    static std::deque<mp::cpp_int> table{mp::cpp_int(1)};
    if (n < 0) {
        throw std::logic_error("factorial of negative argument");
    }
    std::lock_guard lock(mutex);
    while (static_cast<int>(table.size()) <= n) {
        table.push_back(table.back() * static_cast<unsigned>(table.size()));
    }
    return table[static_cast<std::size_t>(n)];
}

void require_projection(HalfInt j, HalfInt m, const char* what) {
    require_spin(j);
    if (std::abs(m.twice()) > j.twice() || (j.twice() - m.twice()) % 2 != 0) {
        throw std::invalid_argument(std::string("invalid projection for ") + what + ": j=" +
                                    j.to_string() + ", m=" + m.to_string());
    }
}

// All arguments below are in units of 1/2; sums of the form (a+b-c)/2 are integers
// once the triangle and integrality checks have passed.
int half(int twice_value) { return twice_value / 2; }

}  // namespace

SpinOperators spin_matrices(HalfInt J) {
    require_spin(J);
    const int d = J.dim();
    SpinOperators ops{J,
                      Matrix::Zero(d, d),
                      Matrix::Zero(d, d),
                      Matrix::Zero(d, d),
                      Matrix::Zero(d, d),
                      Matrix::Zero(d, d),
                      Matrix::Zero(d, d)};
    const double j = J.value();
    for (int row = 0; row < d; ++row) {
        const double m = m_of_row(J, row).value();
        ops.jz(row, row) = m;
        if (row > 0) {
            // J+ |J,m> = sqrt((J-m)(J+m+1)) |J,m+1>, and m+1 sits one row up.
            ops.jplus(row - 1, row) = std::sqrt((j - m) * (j + m + 1.0));
        }
    }
    ops.jminus = ops.jplus.adjoint();
    ops.jx = 0.5 * (ops.jplus + ops.jminus);
    ops.jy = Complex(0.0, -0.5) * (ops.jplus - ops.jminus);
    ops.j_squared = ops.jx * ops.jx + ops.jy * ops.jy + ops.jz * ops.jz;
    return ops;
}

double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M) {
    require_projection(j1, m1, "j1");
    require_projection(j2, m2, "j2");
    require_projection(J, M, "J");

    if (m1.twice() + m2.twice() != M.twice()) {
        return 0.0;
    }
    const int a = j1.twice();
    const int b = j2.twice();
    const int c = J.twice();
    if (c > a + b || c < std::abs(a - b) || (a + b + c) % 2 != 0) {
        return 0.0;
    }

    const int ma = m1.twice();
    const int mb = m2.twice();
    const int mc = M.twice();

    mp::cpp_rational prefactor(mp::cpp_int(c + 1) * factorial(half(c + a - b)) *
                                   factorial(half(c - a + b)) * factorial(half(a + b - c)),
                               factorial(half(a + b + c) + 1));
    prefactor *= mp::cpp_rational(factorial(half(c + mc)) * factorial(half(c - mc)) *
                                  factorial(half(a - ma)) * factorial(half(a + ma)) *
                                  factorial(half(b - mb)) * factorial(half(b + mb)));

    const int k_min = std::max({0, half(b - c - ma), half(a + mb - c)});
    const int k_max = std::min({half(a + b - c), half(a - ma), half(b + mb)});

    mp::cpp_rational sum(0);
    for (int k = k_min; k <= k_max; ++k) {
        const mp::cpp_int denom = factorial(k) * factorial(half(a + b - c) - k) *
                                  factorial(half(a - ma) - k) * factorial(half(b + mb) - k) *
                                  factorial(half(c - b + ma) + k) *
                                  factorial(half(c - a - mb) + k);
        const mp::cpp_rational term(mp::cpp_int(1), denom);
        if (k % 2 == 0) {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if (sum == 0) {
        return 0.0;
    }
    const mp::cpp_rational squared = prefactor * sum * sum;
    const double magnitude = std::sqrt(squared.convert_to<double>());
    return sum > 0 ? magnitude : -magnitude;
}

TensorBasis TensorBasis::build(HalfInt J) {
    require_spin(J);
    const int d = J.dim();
    const int two_j = J.twice();
    std::vector<Matrix> ops;
    ops.reserve(static_cast<std::size_t>(d * d));
    for (int L = 0; L <= two_j; ++L) {
        const double scale = std::sqrt((2.0 * L + 1.0) / (two_j + 1.0));
        const HalfInt rank = HalfInt::from_int(L);
        for (int k = -L; k <= L; ++k) {
            Matrix t = Matrix::Zero(d, d);
            const HalfInt q = HalfInt::from_int(k);
            for (int col = 0; col < d; ++col) {
                const HalfInt m = m_of_row(J, col);
                const HalfInt mp_ = m + q;
                if (std::abs(mp_.twice()) > two_j) {
                    continue;
                }
                const int row = row_of_m(J, mp_);
                t(row, col) = scale * clebsch_gordan(J, m, rank, q, J, mp_);
            }
            ops.push_back(std::move(t));
        }
    }
    return TensorBasis(J, std::move(ops));
}

std::shared_ptr<const TensorBasis> TensorBasis::shared(HalfInt J) {
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const TensorBasis>> cache;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(J.twice()); it != cache.end()) {
            return it->second;
        }
    }
    auto built = std::make_shared<const TensorBasis>(build(J));
    std::lock_guard lock(mutex);
    auto [it, inserted] = cache.emplace(J.twice(), std::move(built));
    return it->second;
}

const Matrix& TensorBasis::op(int L, int k) const {
    if (L < 0 || L > max_rank() || std::abs(k) > L) {
        throw std::out_of_range("tensor index (L=" + std::to_string(L) +
                                ", k=" + std::to_string(k) + ") out of range");
    }
    return ops_[static_cast<std::size_t>(moment_index(L, k))];
}

DensityMatrix DensityMatrix::checked(HalfInt J, Matrix mat, double herm_tol, double trace_tol,
                                     double eig_floor) {
    require_spin(J);
    if (mat.rows() != J.dim() || mat.cols() != J.dim()) {
        throw std::invalid_argument("density matrix must be " + std::to_string(J.dim()) + "x" +
                                    std::to_string(J.dim()) + " for J=" + J.to_string());
    }
    DensityMatrix rho{J, std::move(mat)};
    const StateCheck c = rho.check(herm_tol, trace_tol, eig_floor);
    if (!c.ok) {
        throw std::invalid_argument(
            "not a valid density matrix (hermiticity error " + std::to_string(c.hermiticity_error) +
            ", trace error " + std::to_string(c.trace_error) + ", min eigenvalue " +
            std::to_string(c.min_eigenvalue) + ")");
    }
    return rho;
}

DensityMatrix DensityMatrix::maximally_mixed(HalfInt J) {
    require_spin(J);
    const int d = J.dim();
    return {J, Matrix::Identity(d, d) / static_cast<double>(d)};
}

DensityMatrix DensityMatrix::pure(HalfInt J, const Vector& psi) {
    require_spin(J);
    if (psi.size() != J.dim()) {
        throw std::invalid_argument("state vector has wrong dimension");
    }
    const double norm = psi.norm();
    if (norm == 0.0) {
        throw std::invalid_argument("zero state vector");
    }
    const Vector v = psi / norm;
    return {J, v * v.adjoint()};
}

DensityMatrix DensityMatrix::basis_state(HalfInt J, HalfInt m) {
    require_projection(J, m, "basis state");
    Vector psi = Vector::Zero(J.dim());
    psi(row_of_m(J, m)) = 1.0;
    return pure(J, psi);
}

StateCheck DensityMatrix::check(double herm_tol, double trace_tol, double eig_floor) const {
    StateCheck c;
    c.hermiticity_error = (mat - mat.adjoint()).cwiseAbs().maxCoeff();
    c.trace_error = std::abs(mat.trace() - Complex(1.0, 0.0));
    const Matrix herm = 0.5 * (mat + mat.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
    c.min_eigenvalue = solver.eigenvalues().minCoeff();
    c.ok = c.hermiticity_error <= herm_tol && c.trace_error <= trace_tol &&
           c.min_eigenvalue >= eig_floor;
    return c;
}

double DensityMatrix::purity() const { return (mat * mat).trace().real(); }

MomentVector::MomentVector(HalfInt J, std::vector<Complex> coeffs)
    : j_(J), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != static_cast<std::size_t>(J.dim() * J.dim())) {
        throw std::invalid_argument("moment vector length does not match (2J+1)^2");
    }
}

Complex& MomentVector::operator()(int L, int k) {
    if (L < 0 || L > max_rank() || std::abs(k) > L) {
        throw std::out_of_range("moment index out of range");
    }
    return coeffs_[static_cast<std::size_t>(moment_index(L, k))];
}

Complex MomentVector::operator()(int L, int k) const {
    if (L < 0 || L > max_rank() || std::abs(k) > L) {
        throw std::out_of_range("moment index out of range");
    }
    return coeffs_[static_cast<std::size_t>(moment_index(L, k))];
}

double MomentVector::hermitian_image_error() const {
    double err = 0.0;
    for (int L = 0; L <= max_rank(); ++L) {
        for (int k = 0; k <= L; ++k) {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            err = std::max(err, std::abs((*this)(L, -k) - sign * std::conj((*this)(L, k))));
        }
    }
    return err;
}

double MomentVector::max_abs_diff(const MomentVector& other) const {
    if (other.j_ != j_) {
        throw std::invalid_argument("moment vectors have different J");
    }
    double err = 0.0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        err = std::max(err, std::abs(coeffs_[i] - other.coeffs_[i]));
    }
    return err;
}

MomentVector expand(const Matrix& op, const TensorBasis& basis) {
    if (op.rows() != basis.dim() || op.cols() != basis.dim()) {
        throw std::invalid_argument("operator dimension does not match tensor basis");
    }
    MomentVector m(basis.spin());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        // tr(T^dagger A) = sum_ij conj(T_ij) A_ij
        m.coeffs()[i] = basis.op_at(i).conjugate().cwiseProduct(op).sum();
    }
    return m;
}

MomentVector expand(const DensityMatrix& rho, const TensorBasis& basis) {
    if (rho.J != basis.spin()) {
        throw std::invalid_argument("state J differs from tensor basis J");
    }
    return expand(rho.mat, basis);
}

Reconstruction reconstruct(const MomentVector& moments, const TensorBasis& basis) {
    if (moments.spin() != basis.spin()) {
        throw std::invalid_argument("moment J differs from tensor basis J");
    }
    const int d = basis.dim();
    Matrix rho = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        rho += moments.coeffs()[i] * basis.op_at(i);
    }
    Reconstruction out{DensityMatrix{basis.spin(), std::move(rho)}, true, {}};
    const double herm = (out.state.mat - out.state.mat.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-12) {
        out.hermitian = false;
        out.warning = "moments violate the Hermitian image rule; reconstructed matrix is not "
                      "Hermitian (error " +
                      std::to_string(herm) + ")";
    }
    return out;
}

double CommutatorResidual::max() const noexcept { return std::max({jz, jplus, jminus}); }

CommutatorResidual commutator_check(const TensorBasis& basis, const SpinOperators& ops) {
    if (ops.J != basis.spin()) {
        throw std::invalid_argument("spin operators and tensor basis have different J");
    }
    CommutatorResidual r;
    const int d = basis.dim();
    const Matrix zero = Matrix::Zero(d, d);
    for (int L = 0; L <= basis.max_rank(); ++L) {
        for (int k = -L; k <= L; ++k) {
            const Matrix& t = basis.op(L, k);
            const Matrix cz = ops.jz * t - t * ops.jz - static_cast<double>(k) * t;
            r.jz = std::max(r.jz, cz.norm());

            const Matrix& up = (k + 1 <= L) ? basis.op(L, k + 1) : zero;
            const double cu = std::sqrt(static_cast<double>((L - k) * (L + k + 1)));
            r.jplus = std::max(r.jplus, (ops.jplus * t - t * ops.jplus - cu * up).norm());

            const Matrix& down = (k - 1 >= -L) ? basis.op(L, k - 1) : zero;
            const double cd = std::sqrt(static_cast<double>((L + k) * (L - k + 1)));
            r.jminus = std::max(r.jminus, (ops.jminus * t - t * ops.jminus - cd * down).norm());
        }
    }
    return r;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("matrix shapes differ");
    }
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace spinphase
