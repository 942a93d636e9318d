// Copyright 2026 The chist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Dense complex linear algebra: vectors, row-major matrices, Kronecker
 * products and a cyclic-Jacobi Hermitian eigensolver.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace chist {

using Complex = std::complex<double>;

/// Largest total dimension any vector, matrix or Hilbert space may have.
inline constexpr std::size_t kMaxDimension = 4096;

struct Tolerance {
    double eps = 1e-10;

    constexpr Tolerance() = default;
    explicit Tolerance(double e) : eps(e) {
        if (!(e >= 0.0) || !std::isfinite(e)) {
            throw Error(ErrorKind::Validation, "tolerance must be a finite nonnegative number");
        }
    }
};

namespace detail {

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline void require_finite(std::span<const Complex> data, const char *what) {
    for (auto z : data) {
        if (!is_finite(z)) {
            throw Error(ErrorKind::NonFinite, std::string(what) + " has a non-finite entry");
        }
    }
}

inline void require_dim(std::size_t dim, const char *what) {
    if (dim == 0) {
        throw Error(ErrorKind::Dimension, std::string(what) + " must have positive dimension");
    }
    if (dim > kMaxDimension) {
        throw Error(ErrorKind::Dimension, std::string(what) + " dimension " + std::to_string(dim) +
                                              " exceeds the cap of " + std::to_string(kMaxDimension));
    }
}

} // namespace detail

class ComplexVector {
  public:
    explicit ComplexVector(std::size_t dim) : data_(dim) { detail::require_dim(dim, "vector"); }

    explicit ComplexVector(std::vector<Complex> entries) : data_(std::move(entries)) {
        detail::require_dim(data_.size(), "vector");
        detail::require_finite(data_, "vector");
    }

    ComplexVector(std::initializer_list<Complex> entries) : ComplexVector(std::vector<Complex>(entries)) {}

    static ComplexVector basis(std::size_t dim, std::size_t index) {
        if (index >= dim) {
            throw Error(ErrorKind::Index, "basis index out of range");
        }
        ComplexVector v(dim);
        v.data_[index] = 1.0;
        return v;
    }

    [[nodiscard]] std::size_t dim() const noexcept { return data_.size(); }
    [[nodiscard]] Complex operator[](std::size_t i) const { return data_[i]; }
    [[nodiscard]] Complex &operator[](std::size_t i) { return data_[i]; }
    [[nodiscard]] std::span<const Complex> entries() const noexcept { return data_; }

    [[nodiscard]] double norm_squared() const {
        double s = 0.0;
        for (auto z : data_) {
            s += std::norm(z);
        }
        return s;
    }
    [[nodiscard]] double norm() const { return std::sqrt(norm_squared()); }

    ComplexVector &operator+=(const ComplexVector &o) {
        require_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) {
            data_[i] += o.data_[i];
        }
        return *this;
    }
    ComplexVector &operator-=(const ComplexVector &o) {
        require_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) {
            data_[i] -= o.data_[i];
        }
        return *this;
    }
    ComplexVector &operator*=(Complex s) {
        for (auto &z : data_) {
            z *= s;
        }
        return *this;
    }

    friend ComplexVector operator+(ComplexVector a, const ComplexVector &b) { return a += b; }
    friend ComplexVector operator-(ComplexVector a, const ComplexVector &b) { return a -= b; }
    friend ComplexVector operator*(Complex s, ComplexVector v) { return v *= s; }

    bool operator==(const ComplexVector &) const = default;

  private:
    void require_same(const ComplexVector &o) const {
        if (o.dim() != dim()) {
            throw Error(ErrorKind::Dimension, "vector dimension mismatch");
        }
    }

    std::vector<Complex> data_;
};

/// <a|b>, conjugate-linear in the first argument.
inline Complex inner(const ComplexVector &a, const ComplexVector &b) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorKind::Dimension, "inner product dimension mismatch");
    }
    Complex s{};
    for (std::size_t i = 0; i < a.dim(); ++i) {
        s += std::conj(a[i]) * b[i];
    }
    return s;
}

/// Dense row-major complex matrix.
class ComplexMatrix {
  public:
    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
        detail::require_dim(rows, "matrix rows");
        detail::require_dim(cols, "matrix cols");
        data_.assign(rows * cols, Complex{});
    }

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        detail::require_dim(rows, "matrix rows");
        detail::require_dim(cols, "matrix cols");
        if (data_.size() != rows * cols) {
            throw Error(ErrorKind::Shape, "matrix entry count does not match rows*cols");
        }
        detail::require_finite(data_, "matrix");
    }

    /// Row-list construction, e.g. `ComplexMatrix{{1, 0}, {0, 1}}`.
    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) : rows_(rows.size()), cols_(0) {
        detail::require_dim(rows_, "matrix rows");
        cols_ = rows.begin()->size();
        detail::require_dim(cols_, "matrix cols");
        data_.reserve(rows_ * cols_);
        for (const auto &r : rows) {
            if (r.size() != cols_) {
                throw Error(ErrorKind::Shape, "ragged matrix rows");
            }
            data_.insert(data_.end(), r.begin(), r.end());
        }
        detail::require_finite(data_, "matrix");
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    static ComplexMatrix diagonal(std::span<const Complex> d) {
        ComplexMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            m(i, i) = d[i];
        }
        detail::require_finite(m.data_, "matrix");
        return m;
    }
    static ComplexMatrix diagonal(std::initializer_list<Complex> d) {
        return diagonal(std::span<const Complex>(d.begin(), d.size()));
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }
    [[nodiscard]] std::span<const Complex> entries() const noexcept { return data_; }

    Complex operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    Complex &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

    [[nodiscard]] Complex trace() const {
        require_square("trace");
        Complex t{};
        for (std::size_t i = 0; i < rows_; ++i) {
            t += (*this)(i, i);
        }
        return t;
    }

    /// Largest absolute entry.
    [[nodiscard]] double max_norm() const {
        double m = 0.0;
        for (auto z : data_) {
            m = std::max(m, std::abs(z));
        }
        return m;
    }

    void require_square(const char *what) const {
        if (!is_square()) {
            throw Error(ErrorKind::Shape, std::string(what) + " requires a square matrix, got " +
                                              std::to_string(rows_) + "x" + std::to_string(cols_));
        }
    }

    ComplexMatrix &operator+=(const ComplexMatrix &o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) {
            data_[i] += o.data_[i];
        }
        return *this;
    }
    ComplexMatrix &operator-=(const ComplexMatrix &o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) {
            data_[i] -= o.data_[i];
        }
        return *this;
    }
    ComplexMatrix &operator*=(Complex s) {
        for (auto &z : data_) {
            z *= s;
        }
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) { return a -= b; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix m) { return m *= s; }

    friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
        if (a.cols_ != b.rows_) {
            throw Error(ErrorKind::Dimension, "matrix product shape mismatch");
        }
        ComplexMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Complex aik = a(i, k);
                if (aik == Complex{}) {
                    continue;
                }
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    c(i, j) += aik * b(k, j);
                }
            }
        }
        return c;
    }

    friend ComplexVector operator*(const ComplexMatrix &a, const ComplexVector &v) {
        if (a.cols_ != v.dim()) {
            throw Error(ErrorKind::Dimension, "matrix-vector shape mismatch");
        }
        ComplexVector out(a.rows_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            Complex s{};
            for (std::size_t j = 0; j < a.cols_; ++j) {
                s += a(i, j) * v[j];
            }
            out[i] = s;
        }
        return out;
    }

    bool operator==(const ComplexMatrix &) const = default;

  private:
    void require_same_shape(const ComplexMatrix &o) const {
        if (o.rows_ != rows_ || o.cols_ != cols_) {
            throw Error(ErrorKind::Dimension, "matrix shape mismatch");
        }
    }

    std::size_t rows_;
    std::size_t cols_;
    std::vector<Complex> data_;
};

/// Conjugate transpose.
inline ComplexMatrix adjoint(const ComplexMatrix &a) {
    ComplexMatrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out(j, i) = std::conj(a(i, j));
        }
    }
    return out;
}

/// Kronecker product; the first factor indexes the most significant digit.
inline ComplexMatrix tensor_product(const ComplexMatrix &a, const ComplexMatrix &b) {
    const std::size_t rows = a.rows() * b.rows();
    const std::size_t cols = a.cols() * b.cols();
    if (rows > kMaxDimension || cols > kMaxDimension) {
        throw Error(ErrorKind::Dimension, "tensor product dimension " + std::to_string(rows) + "x" +
                                              std::to_string(cols) + " exceeds the cap of " +
                                              std::to_string(kMaxDimension));
    }
    ComplexMatrix out(rows, cols);
    for (std::size_t ar = 0; ar < a.rows(); ++ar) {
        for (std::size_t ac = 0; ac < a.cols(); ++ac) {
            const Complex s = a(ar, ac);
            for (std::size_t br = 0; br < b.rows(); ++br) {
                for (std::size_t bc = 0; bc < b.cols(); ++bc) {
                    out(ar * b.rows() + br, ac * b.cols() + bc) = s * b(br, bc);
                }
            }
        }
    }
    return out;
}

inline ComplexVector tensor_product(const ComplexVector &a, const ComplexVector &b) {
    const std::size_t dim = a.dim() * b.dim();
    if (dim > kMaxDimension) {
        throw Error(ErrorKind::Dimension, "tensor product dimension exceeds the cap");
    }
    ComplexVector out(dim);
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < b.dim(); ++j) {
            out[i * b.dim() + j] = a[i] * b[j];
        }
    }
    return out;
}

/// |a><b|
inline ComplexMatrix outer(const ComplexVector &a, const ComplexVector &b) {
    ComplexMatrix m(a.dim(), b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < b.dim(); ++j) {
            m(i, j) = a[i] * std::conj(b[j]);
        }
    }
    return m;
}

inline ComplexMatrix commutator(const ComplexMatrix &a, const ComplexMatrix &b) { return a * b - b * a; }

/// Max-norm distance between two equally shaped matrices.
inline double max_abs_diff(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorKind::Dimension, "matrix shape mismatch");
    }
    double m = 0.0;
    auto ea = a.entries();
    auto eb = b.entries();
    for (std::size_t i = 0; i < ea.size(); ++i) {
        m = std::max(m, std::abs(ea[i] - eb[i]));
    }
    return m;
}

inline bool is_hermitian(const ComplexMatrix &a, Tolerance tol = {}) {
    a.require_square("is_hermitian");
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = i; j < a.cols(); ++j) {
            if (std::abs(a(i, j) - std::conj(a(j, i))) > tol.eps) {
                return false;
            }
        }
    }
    return true;
}

/// True iff max|u^dagger u - I| <= eps.
inline bool is_unitary(const ComplexMatrix &u, Tolerance tol = {}) {
    u.require_square("is_unitary");
    return max_abs_diff(adjoint(u) * u, ComplexMatrix::identity(u.rows())) <= tol.eps;
}

struct EigenDecomposition {
    std::vector<double> values;          // descending
    std::vector<ComplexVector> vectors;  // vectors[k] belongs to values[k]
};

/**
 * Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
 *
 * Each rotation zeroes one off-diagonal pair (p, q) using the unitary
 * V = diag(1, e^{-i phi}) * R(theta) restricted to rows/cols p, q, where
 * phi = arg(a_pq). Sweeps continue until the off-diagonal Frobenius mass
 * falls below 1e-15 of the total. Eigenvalues come back in descending
 * order (stable in the original diagonal index on ties); each eigenvector is
 * phased so its first component above 1e-12 in magnitude is real positive.
 */
inline EigenDecomposition hermitian_eig(const ComplexMatrix &input, Tolerance tol = {}) {
    input.require_square("hermitian_eig");
    if (!is_hermitian(input, tol)) {
        throw Error(ErrorKind::Symmetry, "hermitian_eig requires a Hermitian matrix");
    }
    const std::size_t n = input.rows();
    // Symmetrize exactly so rounding in the input cannot bias the rotations.
    ComplexMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = input(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const Complex v = 0.5 * (input(i, j) + std::conj(input(j, i)));
            a(i, j) = v;
            a(j, i) = std::conj(v);
        }
    }
    ComplexMatrix vecs = ComplexMatrix::identity(n);

    double total = 0.0;
    for (auto z : a.entries()) {
        total += std::norm(z);
    }
    const double threshold = 1e-30 * std::max(total, 1e-300);

    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                off += 2.0 * std::norm(a(i, j));
            }
        }
        if (off <= threshold) {
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag == 0.0) {
                    continue;
                }
                const Complex phase = apq / mag; // e^{i phi}
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double tau = (aqq - app) / (2.0 * mag);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // V = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q).
                const Complex v_pp = c;
                const Complex v_pq = s;
                const Complex v_qp = -s * std::conj(phase);
                const Complex v_qq = c * std::conj(phase);
                // A <- A V (columns)
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = akp * v_pp + akq * v_qp;
                    a(k, q) = akp * v_pq + akq * v_qq;
                }
                // A <- V^dagger A (rows)
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = std::conj(v_pp) * apk + std::conj(v_qp) * aqk;
                    a(q, k) = std::conj(v_pq) * apk + std::conj(v_qq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex ekp = vecs(k, p);
                    const Complex ekq = vecs(k, q);
                    vecs(k, p) = ekp * v_pp + ekq * v_qp;
                    vecs(k, q) = ekp * v_pq + ekq * v_qq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

    EigenDecomposition out;
    out.values.reserve(n);
    out.vectors.reserve(n);
    for (std::size_t idx : order) {
        out.values.push_back(a(idx, idx).real());
        ComplexVector v(n);
        for (std::size_t k = 0; k < n; ++k) {
            v[k] = vecs(k, idx);
        }
        for (std::size_t k = 0; k < n; ++k) {
            const double m = std::abs(v[k]);
            if (m > 1e-12) {
                v *= std::conj(v[k]) / m;
                v[k] = m;
                break;
            }
        }
        out.vectors.push_back(std::move(v));
    }
    return out;
}

/// Largest singular value, via the top eigenvalue of a^dagger a.
inline double spectral_norm(const ComplexMatrix &a) {
    const auto eig = hermitian_eig(adjoint(a) * a, Tolerance(1e-8 * std::max(1.0, a.max_norm() * a.max_norm())));
    return std::sqrt(std::max(0.0, eig.values.front()));
}

} // namespace chist
