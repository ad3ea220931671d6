#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace copower {

using Vector = std::vector<double>;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base class for every error this library raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violation (dimension mismatch, non-normalized input, bad options).
class ContractError : public Error {
public:
    using Error::Error;
};

/// A vector whose norm is numerically zero where a direction was required.
class ZeroVectorError : public Error {
public:
    using Error::Error;
};

/// Linear system (or shifted operator) is singular to working precision.
class SingularSystemError : public Error {
public:
    using Error::Error;
};

/// Spectral shift coincides with an eigenvalue it must avoid.
class SingularShiftError : public SingularSystemError {
public:
    using SingularSystemError::SingularSystemError;
};

/// Iteration splitting is unusable (zero diagonal entry).
class SplittingError : public Error {
public:
    using Error::Error;
};

/// Iterative solve ran out of sweeps; carries the last iterate for inspection.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(std::string msg, Vector last, double residual, int sweeps)
        : Error(std::move(msg)), last_iterate(std::move(last)),
          residual(residual), sweeps(sweeps) {}

    Vector last_iterate;
    double residual = 0.0;
    int sweeps = 0;
};

/// The brute-force eigensolver failed to meet its own residual target.
class OracleError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline std::string format_double(double x, const char* fmt = "%.17g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, x);
    return buf;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Small dense-vector helpers
// ---------------------------------------------------------------------------

inline double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw ContractError("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vector& v) {
    return std::sqrt(dot(v, v));
}

inline Vector scaled(const Vector& v, double alpha) {
    Vector r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = alpha * v[i];
    return r;
}

inline Vector subtracted(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw ContractError("subtracted: size mismatch");
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

// ---------------------------------------------------------------------------
// Dense matrices
// ---------------------------------------------------------------------------

/// Plain row-major dense matrix; used for orthonormal bases and scratch work.
struct Matrix {
    int rows = 0;
    int cols = 0;
    Vector data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {
        if (r < 0 || c < 0) throw ContractError("Matrix: negative dimension");
    }

    double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    Vector column(int j) const {
        Vector c(rows);
        for (int i = 0; i < rows; ++i) c[i] = (*this)(i, j);
        return c;
    }

    void set_column(int j, const Vector& c) {
        for (int i = 0; i < rows; ++i) (*this)(i, j) = c[i];
    }
};

inline Vector matvec(const Matrix& m, const Vector& v) {
    if (static_cast<int>(v.size()) != m.cols)
        throw ContractError("matvec: size mismatch");
    Vector r(m.rows, 0.0);
    for (int i = 0; i < m.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < m.cols; ++j) s += m(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

inline Vector transposed_matvec(const Matrix& m, const Vector& v) {
    if (static_cast<int>(v.size()) != m.rows)
        throw ContractError("transposed_matvec: size mismatch");
    Vector r(m.cols, 0.0);
    for (int j = 0; j < m.cols; ++j) {
        double s = 0.0;
        for (int i = 0; i < m.rows; ++i) s += m(i, j) * v[i];
        r[j] = s;
    }
    return r;
}

// ---------------------------------------------------------------------------
// SymmetricOperator
// ---------------------------------------------------------------------------

class StateVector;

/// Dense real symmetric operator. Spectral shifts are carried as a separate
/// diagonal accumulator so that shifting by mu and back by -mu restores the
/// operator exactly, not just to rounding.
class SymmetricOperator {
public:
    /// Zero operator of the given dimension.
    explicit SymmetricOperator(int dim) : dim_(check_dim(dim)), entries_(sq(dim), 0.0) {}

    /// Builds from a full row-major entry list. Input is symmetrized as
    /// (A + A^T)/2; a correction larger than 1e-9 in Frobenius norm is
    /// rejected as a user error rather than round-off.
    static SymmetricOperator from_flat(int dim, const Vector& entries) {
        check_dim(dim);
        if (entries.size() != sq(dim))
            throw ContractError("SymmetricOperator: entry count does not match dim*dim");
        SymmetricOperator a(dim);
        double correction_sq = 0.0;
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) {
                const double sym = 0.5 * (entries[idx(dim, i, j)] + entries[idx(dim, j, i)]);
                const double d = entries[idx(dim, i, j)] - sym;
                correction_sq += d * d;
                a.entries_[idx(dim, i, j)] = sym;
            }
        }
        if (std::sqrt(correction_sq) > 1e-9)
            throw ContractError("SymmetricOperator: input is asymmetric beyond round-off (correction " +
                                detail::format_double(std::sqrt(correction_sq), "%.6g") + ")");
        return a;
    }

    static SymmetricOperator from_rows(const std::vector<Vector>& rows) {
        const int n = static_cast<int>(rows.size());
        check_dim(n);
        Vector flat;
        flat.reserve(sq(n));
        for (const auto& r : rows) {
            if (static_cast<int>(r.size()) != n)
                throw ContractError("SymmetricOperator: ragged rows");
            flat.insert(flat.end(), r.begin(), r.end());
        }
        return from_flat(n, flat);
    }

    static SymmetricOperator diagonal(const Vector& d) {
        SymmetricOperator a(static_cast<int>(d.size()));
        for (int i = 0; i < a.dim_; ++i) a.entries_[idx(a.dim_, i, i)] = d[i];
        return a;
    }

    static SymmetricOperator identity(int n) {
        return diagonal(Vector(static_cast<std::size_t>(check_dim(n)), 1.0));
    }

    int dim() const { return dim_; }
    double diag_shift() const { return shift_; }

    /// Effective entry, shift included.
    double operator()(int i, int j) const {
        double v = entries_[idx(dim_, i, j)];
        if (i == j) v += shift_;
        return v;
    }

    /// Materializes effective entries (row-major).
    Vector dense() const {
        Vector d = entries_;
        if (shift_ != 0.0)
            for (int i = 0; i < dim_; ++i) d[idx(dim_, i, i)] += shift_;
        return d;
    }

    double max_abs_entry() const {
        double m = 0.0;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) m = std::max(m, std::abs((*this)(i, j)));
        return m;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) {
                const double v = (*this)(i, j);
                s += v * v;
            }
        return std::sqrt(s);
    }

    /// Returns this - mu*E without touching the stored entries.
    SymmetricOperator shifted_by(double mu) const {
        SymmetricOperator a = *this;
        a.shift_ -= mu;
        return a;
    }

    /// A * v. Member syntax keeps the name clear of std::apply.
    Vector apply(const Vector& v) const {
        if (static_cast<int>(v.size()) != dim_)
            throw ContractError("apply: operator dim " + std::to_string(dim_) +
                                " vs vector dim " + std::to_string(v.size()));
        Vector w(static_cast<std::size_t>(dim_), 0.0);
        for (int i = 0; i < dim_; ++i) {
            double s = 0.0;
            for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * v[static_cast<std::size_t>(j)];
            w[static_cast<std::size_t>(i)] = s;
        }
        return w;
    }
    inline Vector apply(const StateVector& v) const;

    friend bool operator==(const SymmetricOperator& a, const SymmetricOperator& b) {
        if (a.dim_ != b.dim_) return false;
        for (int i = 0; i < a.dim_; ++i)
            for (int j = 0; j < a.dim_; ++j)
                if (a(i, j) != b(i, j)) return false;
        return true;
    }

private:
    static int check_dim(int dim) {
        if (dim < 1) throw ContractError("SymmetricOperator: dim must be >= 1");
        return dim;
    }
    static std::size_t sq(int dim) { return static_cast<std::size_t>(dim) * dim; }
    static std::size_t idx(int dim, int i, int j) {
        return static_cast<std::size_t>(i) * dim + j;
    }

    int dim_;
    Vector entries_;     // symmetric, shift excluded
    double shift_ = 0.0; // accumulated -mu from shifted_by
};

// ---------------------------------------------------------------------------
// StateVector
// ---------------------------------------------------------------------------

/// Unit-norm iterate. Construction always goes through an explicit
/// normalization or check, so holding a StateVector certifies the invariant.
class StateVector {
public:
    struct unchecked_t {};

    /// Escape hatch for tests and internal fast paths; does not validate.
    StateVector(Vector components, unchecked_t) : components_(std::move(components)) {
        if (components_.empty()) throw ContractError("StateVector: dim must be >= 1");
    }

    /// v / ||v||. Norms at or below 1e-300 signal a collapsed iterate.
    static StateVector normalized(const Vector& v) {
        return normalize(v).first;
    }

    /// Returns (v/||v||, ||v||).
    static std::pair<StateVector, double> normalize(const Vector& v) {
        if (v.empty()) throw ContractError("StateVector: dim must be >= 1");
        const double n = norm2(v);
        if (!(n > 1e-300))
            throw ZeroVectorError("normalize: vector norm " + detail::format_double(n, "%.3g") +
                                  " is numerically zero");
        Vector u(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) u[i] = v[i] / n;
        return {StateVector(std::move(u), unchecked_t{}), n};
    }

    /// All-ones direction; the default start vector everywhere.
    static StateVector uniform(int dim) {
        if (dim < 1) throw ContractError("StateVector: dim must be >= 1");
        return normalized(Vector(static_cast<std::size_t>(dim), 1.0));
    }

    int dim() const { return static_cast<int>(components_.size()); }
    const Vector& components() const { return components_; }
    double operator[](int i) const { return components_[static_cast<std::size_t>(i)]; }

    /// |  ||v|| - 1  |
    double norm_error() const { return std::abs(norm2(components_) - 1.0); }

private:
    Vector components_;
};

// ---------------------------------------------------------------------------
// Core operations
// ---------------------------------------------------------------------------

inline Vector SymmetricOperator::apply(const StateVector& v) const {
    return apply(v.components());
}

/// <v|A|v> for unit v.
inline double rayleigh(const SymmetricOperator& a, const StateVector& v) {
    if (v.norm_error() > 1e-9)
        throw ContractError("rayleigh: state norm deviates from 1 by " +
                            detail::format_double(v.norm_error(), "%.3g"));
    return dot(v.components(), a.apply(v.components()));
}

/// See StateVector::normalize; kept as a free function to mirror apply/rayleigh.
inline std::pair<StateVector, double> normalize(const Vector& v) {
    return StateVector::normalize(v);
}

/// Frobenius norm of HS - SH.
inline double commutator_norm(const SymmetricOperator& h, const SymmetricOperator& s) {
    if (h.dim() != s.dim())
        throw ContractError("commutator_norm: dimension mismatch");
    const int n = h.dim();
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double hs = 0.0, sh = 0.0;
            for (int k = 0; k < n; ++k) {
                hs += h(i, k) * s(k, j);
                sh += s(i, k) * h(k, j);
            }
            const double d = hs - sh;
            acc += d * d;
        }
    }
    return std::sqrt(acc);
}

/// S - mu*E.
inline SymmetricOperator shifted(const SymmetricOperator& s, double mu) {
    return s.shifted_by(mu);
}

// ---------------------------------------------------------------------------
// CommutingPair
// ---------------------------------------------------------------------------

/// An (H, S) pair whose commutator is certified small at construction.
class CommutingPair {
public:
    CommutingPair(SymmetricOperator h, SymmetricOperator s, double commutator_tolerance = 1e-10)
        : h_(std::move(h)), s_(std::move(s)), tolerance_(commutator_tolerance) {
        if (h_.dim() != s_.dim())
            throw ContractError("CommutingPair: H dim " + std::to_string(h_.dim()) +
                                " vs S dim " + std::to_string(s_.dim()));
        if (!(tolerance_ >= 0.0))
            throw ContractError("CommutingPair: tolerance must be nonnegative");
        measured_ = commutator_norm(h_, s_);
        if (measured_ > tolerance_)
            throw ContractError("CommutingPair: commutator norm " +
                                detail::format_double(measured_, "%.6g") +
                                " exceeds tolerance " + detail::format_double(tolerance_, "%.6g"));
    }

    const SymmetricOperator& H() const { return h_; }
    const SymmetricOperator& S() const { return s_; }
    double commutator_tolerance() const { return tolerance_; }
    double measured_commutator() const { return measured_; }
    int dim() const { return h_.dim(); }

private:
    SymmetricOperator h_;
    SymmetricOperator s_;
    double tolerance_;
    double measured_ = 0.0;
};

} // namespace copower
