#pragma once

/**
 * @file
 * Dense complex linear algebra for small Hilbert spaces.
 *
 * Everything here works on row-major `ComplexMatrix` and `Ket` values.
 * Multi-party states use the Kronecker convention: for subsystems with
 * dimensions (d_0, ..., d_{n-1}) the flat index is
 * i_0 * d_1 * ... * d_{n-1} + ... + i_{n-1}, i.e. the first subsystem is
 * the most significant digit.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace repeaterlab {

using cplx = std::complex<double>;

namespace tol {
inline constexpr double hermitian = 1e-12;
inline constexpr double normalized = 1e-12;
inline constexpr double unitary = 1e-10;
inline constexpr double support_cutoff = 1e-12;
inline constexpr double negative_eigenvalue = 1e-10;
} // namespace tol

class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        detail::require(data_.size() == rows_ * cols_, ErrorCode::dimension_mismatch,
                        "ComplexMatrix: entry count does not match rows*cols");
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    static ComplexMatrix diagonal(std::span<const double> values) {
        ComplexMatrix m(values.size(), values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            m(i, i) = values[i];
        }
        return m;
    }

    static ComplexMatrix diagonal(std::initializer_list<double> values) {
        std::vector<double> v(values);
        return diagonal(std::span<const double>(v));
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }
    [[nodiscard]] std::span<const cplx> data() const noexcept { return data_; }
    [[nodiscard]] std::span<cplx> data() noexcept { return data_; }

    cplx &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    [[nodiscard]] ComplexMatrix adjoint() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) {
                out(c, r) = std::conj((*this)(r, c));
            }
        }
        return out;
    }

    [[nodiscard]] ComplexMatrix transpose() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) {
                out(c, r) = (*this)(r, c);
            }
        }
        return out;
    }

    [[nodiscard]] cplx trace() const {
        detail::require(is_square(), ErrorCode::dimension_mismatch, "trace of non-square matrix");
        cplx t = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            t += (*this)(i, i);
        }
        return t;
    }

    /// Largest absolute entry.
    [[nodiscard]] double max_abs() const {
        double m = 0.0;
        for (const auto &z : data_) {
            m = std::max(m, std::abs(z));
        }
        return m;
    }

    ComplexMatrix &operator+=(const ComplexMatrix &o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) {
            data_[i] += o.data_[i];
        }
        return *this;
    }
    ComplexMatrix &operator-=(const ComplexMatrix &o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) {
            data_[i] -= o.data_[i];
        }
        return *this;
    }
    ComplexMatrix &operator*=(cplx s) {
        for (auto &z : data_) {
            z *= s;
        }
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

    friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
        detail::require(a.cols_ == b.rows_, ErrorCode::dimension_mismatch,
                        "matrix product: inner dimensions differ");
        ComplexMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx{0.0, 0.0}) {
                    continue;
                }
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    out(i, j) += aik * b(k, j);
                }
            }
        }
        return out;
    }

  private:
    void check_same_shape(const ComplexMatrix &o) const {
        detail::require(rows_ == o.rows_ && cols_ == o.cols_, ErrorCode::dimension_mismatch,
                        "matrix shapes differ");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

class Ket {
  public:
    Ket() = default;
    explicit Ket(std::size_t dim) : amplitudes_(dim, cplx{0.0, 0.0}) {}
    explicit Ket(std::vector<cplx> amplitudes) : amplitudes_(std::move(amplitudes)) {}
    Ket(std::initializer_list<cplx> amplitudes) : amplitudes_(amplitudes) {}

    /// Computational basis vector |index>.
    static Ket basis(std::size_t dim, std::size_t index) {
        Ket k(dim);
        k[index] = 1.0;
        return k;
    }

    [[nodiscard]] std::size_t dim() const noexcept { return amplitudes_.size(); }
    [[nodiscard]] std::span<const cplx> amplitudes() const noexcept { return amplitudes_; }
    [[nodiscard]] std::span<cplx> amplitudes() noexcept { return amplitudes_; }

    cplx &operator[](std::size_t i) { return amplitudes_[i]; }
    const cplx &operator[](std::size_t i) const { return amplitudes_[i]; }

    [[nodiscard]] double norm_squared() const {
        double s = 0.0;
        for (const auto &z : amplitudes_) {
            s += std::norm(z);
        }
        return s;
    }
    [[nodiscard]] double norm() const { return std::sqrt(norm_squared()); }

    [[nodiscard]] bool is_normalized(double tolerance = tol::normalized) const {
        return std::abs(norm_squared() - 1.0) <= tolerance;
    }

    [[nodiscard]] Ket normalized() const {
        const double n = norm();
        detail::require(n > 0.0, ErrorCode::not_normalized, "cannot normalize the zero vector");
        Ket out(*this);
        for (auto &z : out.amplitudes_) {
            z /= n;
        }
        return out;
    }

    [[nodiscard]] Ket conj() const {
        Ket out(*this);
        for (auto &z : out.amplitudes_) {
            z = std::conj(z);
        }
        return out;
    }

    /// Column matrix |psi>.
    [[nodiscard]] ComplexMatrix as_column() const {
        return ComplexMatrix(dim(), 1, amplitudes_);
    }

    /// Row matrix <psi|.
    [[nodiscard]] ComplexMatrix as_bra() const {
        return ComplexMatrix(1, dim(), conj().amplitudes_);
    }

    /// |psi><psi|
    [[nodiscard]] ComplexMatrix projector() const {
        ComplexMatrix p(dim(), dim());
        for (std::size_t i = 0; i < dim(); ++i) {
            for (std::size_t j = 0; j < dim(); ++j) {
                p(i, j) = amplitudes_[i] * std::conj(amplitudes_[j]);
            }
        }
        return p;
    }

    Ket &operator*=(cplx s) {
        for (auto &z : amplitudes_) {
            z *= s;
        }
        return *this;
    }
    Ket &operator+=(const Ket &o) {
        detail::require(dim() == o.dim(), ErrorCode::dimension_mismatch, "ket dimensions differ");
        for (std::size_t i = 0; i < dim(); ++i) {
            amplitudes_[i] += o.amplitudes_[i];
        }
        return *this;
    }
    friend Ket operator*(cplx s, Ket k) { return k *= s; }
    friend Ket operator*(Ket k, cplx s) { return k *= s; }
    friend Ket operator+(Ket a, const Ket &b) { return a += b; }

  private:
    std::vector<cplx> amplitudes_;
};

/// <a|b>
inline cplx inner(const Ket &a, const Ket &b) {
    detail::require(a.dim() == b.dim(), ErrorCode::dimension_mismatch, "inner product dimension mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        s += std::conj(a[i]) * b[i];
    }
    return s;
}

/// |<a|b>|^2 for normalized kets; equal to 1 iff the states agree up to global phase.
inline double overlap_squared(const Ket &a, const Ket &b) { return std::norm(inner(a, b)); }

inline Ket operator*(const ComplexMatrix &m, const Ket &k) {
    detail::require(m.cols() == k.dim(), ErrorCode::dimension_mismatch, "matrix-vector dimension mismatch");
    Ket out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            s += m(i, j) * k[j];
        }
        out[i] = s;
    }
    return out;
}

/// Kronecker product, index (i_a * dim_b + i_b).
inline ComplexMatrix tensor(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ra = 0; ra < a.rows(); ++ra) {
        for (std::size_t ca = 0; ca < a.cols(); ++ca) {
            const cplx x = a(ra, ca);
            for (std::size_t rb = 0; rb < b.rows(); ++rb) {
                for (std::size_t cb = 0; cb < b.cols(); ++cb) {
                    out(ra * b.rows() + rb, ca * b.cols() + cb) = x * b(rb, cb);
                }
            }
        }
    }
    return out;
}

inline Ket tensor(const Ket &a, const Ket &b) {
    Ket out(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < b.dim(); ++j) {
            out[i * b.dim() + j] = a[i] * b[j];
        }
    }
    return out;
}

/// Largest entrywise deviation between two same-shape matrices.
inline double max_abs_diff(const ComplexMatrix &a, const ComplexMatrix &b) {
    detail::require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::dimension_mismatch,
                    "max_abs_diff: shapes differ");
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    }
    return m;
}

/// Hermiticity test: max |A - A^dagger| <= tolerance * max(1, max|A|).
inline bool is_hermitian(const ComplexMatrix &a, double tolerance = tol::hermitian) {
    if (!a.is_square()) {
        return false;
    }
    const double scale = std::max(1.0, a.max_abs());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = i; j < a.cols(); ++j) {
            if (std::abs(a(i, j) - std::conj(a(j, i))) > tolerance * scale) {
                return false;
            }
        }
    }
    return true;
}

inline bool is_unitary(const ComplexMatrix &u, double tolerance = tol::unitary) {
    if (!u.is_square()) {
        return false;
    }
    return max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(u.rows())) <= tolerance;
}

inline void require_hermitian(const ComplexMatrix &a, const char *who) {
    detail::require(is_hermitian(a), ErrorCode::not_hermitian, std::string(who) + ": matrix is not Hermitian");
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition
// ---------------------------------------------------------------------------

/// Eigenvalues ascending; column k of `eigenvectors` belongs to eigenvalues[k].
struct EigenSystem {
    std::vector<double> eigenvalues;
    ComplexMatrix eigenvectors;

    [[nodiscard]] std::vector<double> ascending() const { return eigenvalues; }
    [[nodiscard]] std::vector<double> descending() const {
        return {eigenvalues.rbegin(), eigenvalues.rend()};
    }
    [[nodiscard]] Ket vector(std::size_t k) const {
        Ket v(eigenvectors.rows());
        for (std::size_t i = 0; i < eigenvectors.rows(); ++i) {
            v[i] = eigenvectors(i, k);
        }
        return v;
    }
    /// V diag(f(lambda)) V^dagger
    [[nodiscard]] ComplexMatrix reconstruct(const std::function<double(double)> &f) const {
        const std::size_t n = eigenvectors.rows();
        ComplexMatrix out(n, n);
        for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
            const double w = f(eigenvalues[k]);
            if (w == 0.0) {
                continue;
            }
            for (std::size_t i = 0; i < n; ++i) {
                const cplx vik = eigenvectors(i, k) * w;
                for (std::size_t j = 0; j < n; ++j) {
                    out(i, j) += vik * std::conj(eigenvectors(j, k));
                }
            }
        }
        return out;
    }
    [[nodiscard]] ComplexMatrix reconstruct() const {
        return reconstruct([](double x) { return x; });
    }
};

namespace detail {

// 2x2 unitary that diagonalises [[a, g], [conj(g), b]] (a, b real) under J^dagger H J.
struct JacobiRotation {
    cplx pp, pq, qp, qq;
};

inline JacobiRotation jacobi_rotation(double a, double b, cplx g) {
    const double mag = std::abs(g);
    const cplx phase = std::conj(g) / mag; // e^{-i arg g}
    const double tau = (b - a) / (2.0 * mag);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    return {c, s, -s * phase, c * phase};
}

} // namespace detail

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
inline EigenSystem eigh(const ComplexMatrix &input) {
    require_hermitian(input, "eigh");
    const std::size_t n = input.rows();
    ComplexMatrix a = input;
    ComplexMatrix v = ComplexMatrix::identity(n);

    double scale = 0.0;
    for (const auto &z : a.data()) {
        scale += std::norm(z);
    }
    const double threshold = 1e-32 * std::max(scale, 1e-300);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += std::norm(a(p, q));
            }
        }
        if (off <= threshold) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) == 0.0) {
                    continue;
                }
                const auto j = detail::jacobi_rotation(a(p, p).real(), a(q, q).real(), a(p, q));
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p);
                    const cplx akq = a(k, q);
                    a(k, p) = akp * j.pp + akq * j.qp;
                    a(k, q) = akp * j.pq + akq * j.qq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k);
                    const cplx aqk = a(q, k);
                    a(p, k) = std::conj(j.pp) * apk + std::conj(j.qp) * aqk;
                    a(q, k) = std::conj(j.pq) * apk + std::conj(j.qq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx vkp = v(k, p);
                    const cplx vkq = v(k, q);
                    v(k, p) = vkp * j.pp + vkq * j.qp;
                    v(k, q) = vkp * j.pq + vkq * j.qq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });

    EigenSystem es;
    es.eigenvalues.resize(n);
    es.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        es.eigenvalues[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) {
            es.eigenvectors(i, k) = v(i, order[k]);
        }
    }
    return es;
}

/// Largest eigenvalue magnitude of a Hermitian matrix.
inline double op_norm_inf(const ComplexMatrix &a) {
    require_hermitian(a, "op_norm_inf");
    const auto es = eigh(a);
    return std::max(std::abs(es.eigenvalues.front()), std::abs(es.eigenvalues.back()));
}

/// rho^{-1/2} restricted to the support of rho; eigenvalues <= cutoff map to 0.
inline ComplexMatrix pinv_sqrt(const ComplexMatrix &rho, double cutoff = tol::support_cutoff) {
    require_hermitian(rho, "pinv_sqrt");
    const auto es = eigh(rho);
    detail::require(es.eigenvalues.front() >= -tol::negative_eigenvalue, ErrorCode::negative_eigenvalue,
                    "pinv_sqrt: matrix has a negative eigenvalue " + std::to_string(es.eigenvalues.front()));
    return es.reconstruct([cutoff](double x) { return x > cutoff ? 1.0 / std::sqrt(x) : 0.0; });
}

/// Orthogonal projector onto eigenvectors with eigenvalue > cutoff.
inline ComplexMatrix support_projector(const ComplexMatrix &rho, double cutoff = tol::support_cutoff) {
    require_hermitian(rho, "support_projector");
    return eigh(rho).reconstruct([cutoff](double x) { return x > cutoff ? 1.0 : 0.0; });
}

// ---------------------------------------------------------------------------
// Subsystem operations
// ---------------------------------------------------------------------------

inline std::size_t product(std::span<const std::size_t> dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>{});
}

namespace detail {

// Splits the flat index space into (kept, traced) parts for the given subsystem selection.
struct SubsystemSplit {
    std::vector<std::size_t> kept_of;   // flat index -> kept index
    std::vector<std::size_t> traced_of; // flat index -> traced index
    std::size_t kept_dim = 1;
    std::size_t traced_dim = 1;
};

inline SubsystemSplit split_subsystems(std::span<const std::size_t> dims, std::span<const std::size_t> keep) {
    std::vector<bool> kept(dims.size(), false);
    for (auto k : keep) {
        require(k < dims.size(), ErrorCode::dimension_mismatch, "subsystem index out of range");
        require(!kept[k], ErrorCode::dimension_mismatch, "subsystem listed twice");
        kept[k] = true;
    }
    SubsystemSplit s;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        (kept[i] ? s.kept_dim : s.traced_dim) *= dims[i];
    }
    const std::size_t total = product(dims);
    s.kept_of.resize(total);
    s.traced_of.resize(total);
    std::vector<std::size_t> digits(dims.size(), 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t ki = 0;
        std::size_t ti = 0;
        for (std::size_t i = 0; i < dims.size(); ++i) {
            if (kept[i]) {
                ki = ki * dims[i] + digits[i];
            } else {
                ti = ti * dims[i] + digits[i];
            }
        }
        s.kept_of[flat] = ki;
        s.traced_of[flat] = ti;
        for (std::size_t i = dims.size(); i-- > 0;) {
            if (++digits[i] < dims[i]) {
                break;
            }
            digits[i] = 0;
        }
    }
    return s;
}

} // namespace detail

/// Reduced operator on the `keep` subsystems (kept in their original order).
inline ComplexMatrix partial_trace(const ComplexMatrix &rho, std::span<const std::size_t> dims,
                                   std::span<const std::size_t> keep) {
    detail::require(rho.is_square() && rho.rows() == product(dims), ErrorCode::dimension_mismatch,
                    "partial_trace: subsystem dimensions do not match the operator");
    const auto split = detail::split_subsystems(dims, keep);
    ComplexMatrix out(split.kept_dim, split.kept_dim);
    for (std::size_t i = 0; i < rho.rows(); ++i) {
        for (std::size_t j = 0; j < rho.cols(); ++j) {
            if (split.traced_of[i] == split.traced_of[j]) {
                out(split.kept_of[i], split.kept_of[j]) += rho(i, j);
            }
        }
    }
    return out;
}

inline ComplexMatrix partial_trace(const ComplexMatrix &rho, std::initializer_list<std::size_t> dims,
                                   std::initializer_list<std::size_t> keep) {
    std::vector<std::size_t> d(dims), k(keep);
    return partial_trace(rho, d, k);
}

/// tr_{not keep} |psi><psi| computed from amplitudes without forming the full projector.
inline ComplexMatrix reduced_density(const Ket &psi, std::span<const std::size_t> dims,
                                     std::span<const std::size_t> keep) {
    detail::require(psi.dim() == product(dims), ErrorCode::dimension_mismatch,
                    "reduced_density: subsystem dimensions do not match the ket");
    const auto split = detail::split_subsystems(dims, keep);
    ComplexMatrix amp(split.kept_dim, split.traced_dim);
    for (std::size_t flat = 0; flat < psi.dim(); ++flat) {
        amp(split.kept_of[flat], split.traced_of[flat]) = psi[flat];
    }
    return amp * amp.adjoint();
}

/// Applies `op` (rows x product of block dims) to the contiguous wires [first, first + count).
/// A non-square `op` changes the dimension of that block to op.rows(), which lets a bra
/// (1 x d) contract a block away entirely.
inline Ket apply_local(const ComplexMatrix &op, const Ket &psi, std::span<const std::size_t> dims,
                       std::size_t first, std::size_t count = 1) {
    detail::require(first + count <= dims.size(), ErrorCode::dimension_mismatch, "apply_local: wire out of range");
    detail::require(psi.dim() == product(dims), ErrorCode::dimension_mismatch,
                    "apply_local: subsystem dimensions do not match the ket");
    const std::size_t left = product(dims.subspan(0, first));
    const std::size_t mid = product(dims.subspan(first, count));
    const std::size_t right = product(dims.subspan(first + count));
    detail::require(op.cols() == mid, ErrorCode::dimension_mismatch, "apply_local: operator does not fit the block");
    const std::size_t out_mid = op.rows();
    Ket out(left * out_mid * right);
    for (std::size_t l = 0; l < left; ++l) {
        for (std::size_t i = 0; i < out_mid; ++i) {
            for (std::size_t j = 0; j < mid; ++j) {
                const cplx oij = op(i, j);
                if (oij == cplx{0.0, 0.0}) {
                    continue;
                }
                for (std::size_t r = 0; r < right; ++r) {
                    out[(l * out_mid + i) * right + r] += oij * psi[(l * mid + j) * right + r];
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Singular values and the Schmidt decomposition
// ---------------------------------------------------------------------------

struct SingularValueDecomposition {
    std::vector<double> singular_values; ///< nonincreasing, length min(rows, cols)
    ComplexMatrix u;                     ///< rows x rows unitary
    ComplexMatrix v;                     ///< cols x cols unitary; M = U S V^dagger
};

namespace detail {

// Completes the first `filled` orthonormal columns of `q` to a unitary by Gram-Schmidt
// against the computational basis.
inline void complete_basis(ComplexMatrix &q, std::size_t filled) {
    const std::size_t n = q.rows();
    for (std::size_t e = 0; e < n && filled < n; ++e) {
        std::vector<cplx> cand(n, 0.0);
        cand[e] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < filled; ++k) {
                cplx proj = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    proj += std::conj(q(i, k)) * cand[i];
                }
                for (std::size_t i = 0; i < n; ++i) {
                    cand[i] -= proj * q(i, k);
                }
            }
        }
        double nrm = 0.0;
        for (const auto &z : cand) {
            nrm += std::norm(z);
        }
        nrm = std::sqrt(nrm);
        if (nrm < 1e-8) {
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
            q(i, filled) = cand[i] / nrm;
        }
        ++filled;
    }
}

} // namespace detail

/// One-sided (Hestenes) Jacobi SVD. Singular values are accurate to ~eps * ||M|| in absolute
/// terms, which keeps vanishing Schmidt coefficients at the 1e-16 level instead of sqrt(eps).
inline SingularValueDecomposition svd(const ComplexMatrix &m) {
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    ComplexMatrix w = m;
    ComplexMatrix v = ComplexMatrix::identity(cols);

    for (int sweep = 0; sweep < 80; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p < cols; ++p) {
            for (std::size_t q = p + 1; q < cols; ++q) {
                double alpha = 0.0;
                double beta = 0.0;
                cplx gamma = 0.0;
                for (std::size_t i = 0; i < rows; ++i) {
                    alpha += std::norm(w(i, p));
                    beta += std::norm(w(i, q));
                    gamma += std::conj(w(i, p)) * w(i, q);
                }
                if (std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta) || std::abs(gamma) < 1e-300) {
                    continue;
                }
                rotated = true;
                const auto j = detail::jacobi_rotation(alpha, beta, gamma);
                for (std::size_t i = 0; i < rows; ++i) {
                    const cplx wp = w(i, p);
                    const cplx wq = w(i, q);
                    w(i, p) = wp * j.pp + wq * j.qp;
                    w(i, q) = wp * j.pq + wq * j.qq;
                }
                for (std::size_t i = 0; i < cols; ++i) {
                    const cplx vp = v(i, p);
                    const cplx vq = v(i, q);
                    v(i, p) = vp * j.pp + vq * j.qp;
                    v(i, q) = vp * j.pq + vq * j.qq;
                }
            }
        }
        if (!rotated) {
            break;
        }
    }

    std::vector<double> norms(cols);
    for (std::size_t c = 0; c < cols; ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
            s += std::norm(w(i, c));
        }
        norms[c] = std::sqrt(s);
    }
    std::vector<std::size_t> order(cols);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });

    SingularValueDecomposition out;
    const std::size_t r = std::min(rows, cols);
    out.singular_values.resize(r);
    out.u = ComplexMatrix(rows, rows);
    out.v = ComplexMatrix(cols, cols);
    for (std::size_t k = 0; k < cols; ++k) {
        for (std::size_t i = 0; i < cols; ++i) {
            out.v(i, k) = v(i, order[k]);
        }
    }
    const double top = norms.empty() ? 0.0 : norms[order[0]];
    std::size_t filled = 0;
    for (std::size_t k = 0; k < r; ++k) {
        const double s = norms[order[k]];
        out.singular_values[k] = s;
        if (s > 1e-14 * std::max(top, 1e-300) && s > 0.0) {
            for (std::size_t i = 0; i < rows; ++i) {
                out.u(i, k) = w(i, order[k]) / s;
            }
            filled = k + 1;
        }
    }
    detail::complete_basis(out.u, filled);
    return out;
}

/// psi = sum_k coefficients[k] |left_k> (x) |right_k>
struct SchmidtDecomposition {
    std::vector<double> coefficients; ///< nonincreasing, length min(dimA, dimB)
    ComplexMatrix left;               ///< dimA x dimA, column k is |left_k>
    ComplexMatrix right;              ///< dimB x dimB, column k is |right_k>

    [[nodiscard]] Ket left_vector(std::size_t k) const { return column(left, k); }
    [[nodiscard]] Ket right_vector(std::size_t k) const { return column(right, k); }

    [[nodiscard]] Ket reconstruct() const {
        Ket psi(left.rows() * right.rows());
        for (std::size_t k = 0; k < coefficients.size(); ++k) {
            psi += coefficients[k] * tensor(left_vector(k), right_vector(k));
        }
        return psi;
    }

  private:
    static Ket column(const ComplexMatrix &m, std::size_t k) {
        Ket v(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i) {
            v[i] = m(i, k);
        }
        return v;
    }
};

inline SchmidtDecomposition schmidt(const Ket &psi, std::size_t dim_a, std::size_t dim_b) {
    detail::require(dim_a * dim_b == psi.dim(), ErrorCode::dimension_mismatch,
                    "schmidt: dimA * dimB does not match the ket dimension");
    detail::require(psi.is_normalized(1e-10), ErrorCode::not_normalized, "schmidt: input ket is not normalized");
    const ComplexMatrix m(dim_a, dim_b, std::vector<cplx>(psi.amplitudes().begin(), psi.amplitudes().end()));
    auto dec = svd(m);
    SchmidtDecomposition out;
    out.coefficients = std::move(dec.singular_values);
    out.left = std::move(dec.u);
    // M = U S V^dagger  =>  psi_ij = sum_k s_k U_ik conj(V_jk)
    out.right = ComplexMatrix(dim_b, dim_b);
    for (std::size_t i = 0; i < dim_b; ++i) {
        for (std::size_t k = 0; k < dim_b; ++k) {
            out.right(i, k) = std::conj(dec.v(i, k));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Matrix text format: "rows cols" header, then row-major "re im" pairs.
// ---------------------------------------------------------------------------

inline void write_matrix(std::ostream &os, const ComplexMatrix &m) {
    std::ostringstream buf;
    buf.precision(17);
    buf << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c > 0) {
                buf << "  ";
            }
            buf << m(r, c).real() << ' ' << m(r, c).imag();
        }
        buf << '\n';
    }
    os << buf.str();
}

/// Reads one matrix; returns false on clean end of input before a header.
inline bool read_matrix(std::istream &is, ComplexMatrix &out) {
    std::size_t rows = 0;
    std::size_t cols = 0;
    if (!(is >> rows)) {
        detail::require(is.eof(), ErrorCode::parse_error, "matrix text: malformed header");
        return false;
    }
    detail::require(static_cast<bool>(is >> cols), ErrorCode::parse_error, "matrix text: header needs 'rows cols'");
    detail::require(rows > 0 && cols > 0 && rows * cols <= 64 * 64, ErrorCode::parse_error,
                    "matrix text: unsupported dimensions");
    std::vector<cplx> data(rows * cols);
    for (auto &z : data) {
        double re = 0.0;
        double im = 0.0;
        detail::require(static_cast<bool>(is >> re >> im), ErrorCode::parse_error,
                        "matrix text: expected " + std::to_string(rows * cols) + " 're im' pairs");
        z = {re, im};
    }
    out = ComplexMatrix(rows, cols, std::move(data));
    return true;
}

inline std::vector<ComplexMatrix> read_matrices(std::istream &is) {
    std::vector<ComplexMatrix> out;
    ComplexMatrix m;
    while (read_matrix(is, m)) {
        out.push_back(std::move(m));
    }
    return out;
}

} // namespace repeaterlab
