#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "copower/operators.hpp"

namespace copower {

enum class SolveMethod { direct_gauss, jacobi, gauss_seidel };

inline const char* to_string(SolveMethod m) {
    switch (m) {
        case SolveMethod::direct_gauss: return "direct-gauss";
        case SolveMethod::jacobi: return "jacobi";
        case SolveMethod::gauss_seidel: return "gauss-seidel";
    }
    return "?";
}

struct SolveOptions {
    SolveMethod method = SolveMethod::direct_gauss;
    double tolerance = 1e-12;   // relative residual target for sweeps
    int max_sweeps = 10000;
    double pivot_threshold = 1e-12; // relative to the largest initial entry
    // Optional warm start for the iterative methods (zero vector otherwise).
    std::optional<Vector> initial_guess;

    void validate() const {
        if (!(tolerance > 0.0)) throw ContractError("SolveOptions: tolerance must be > 0");
        if (max_sweeps < 1) throw ContractError("SolveOptions: max_sweeps must be >= 1");
        if (!(pivot_threshold > 0.0)) throw ContractError("SolveOptions: pivot_threshold must be > 0");
    }
};

struct SolveReport {
    Vector solution;
    double relative_residual = 0.0;
    int sweeps_used = 0; // 0 for the direct method
};

namespace detail {

inline double relative_residual(const SymmetricOperator& a, const Vector& x, const Vector& b) {
    const Vector r = subtracted(a.apply(x), b);
    return norm2(r) / std::max(norm2(b), 1e-300);
}

inline void check_system(const SymmetricOperator& a, const Vector& b) {
    if (static_cast<int>(b.size()) != a.dim())
        throw ContractError("solve: operator dim " + std::to_string(a.dim()) +
                            " vs rhs dim " + std::to_string(b.size()));
}

} // namespace detail

/// Gaussian elimination with partial pivoting. A pivot below
/// pivot_threshold * max|A_ij| flags the system as singular, which in the
/// iteration context means the spectral shift sits on an eigenvalue.
inline SolveReport solve_gauss(const SymmetricOperator& a, const Vector& b,
                               const SolveOptions& opts = {}) {
    detail::check_system(a, b);
    opts.validate();
    const int n = a.dim();
    Vector m = a.dense();
    Vector x = b;

    double max_abs = 0.0;
    for (const double v : m) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0)
        throw SingularSystemError("solve_gauss: zero matrix");
    const double threshold = opts.pivot_threshold * max_abs;

    auto at = [&](int i, int j) -> double& { return m[static_cast<std::size_t>(i) * n + j]; };

    for (int k = 0; k < n; ++k) {
        int pivot_row = k;
        double pivot_mag = std::abs(at(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double mag = std::abs(at(i, k));
            if (mag > pivot_mag) {
                pivot_mag = mag;
                pivot_row = i;
            }
        }
        if (pivot_mag < threshold)
            throw SingularSystemError("solve_gauss: pivot " + detail::format_double(pivot_mag, "%.3g") +
                                      " in column " + std::to_string(k) +
                                      " below threshold " + detail::format_double(threshold, "%.3g"));
        if (pivot_row != k) {
            for (int j = k; j < n; ++j) std::swap(at(k, j), at(pivot_row, j));
            std::swap(x[static_cast<std::size_t>(k)], x[static_cast<std::size_t>(pivot_row)]);
        }
        for (int i = k + 1; i < n; ++i) {
            const double f = at(i, k) / at(k, k);
            if (f == 0.0) continue;
            at(i, k) = 0.0;
            for (int j = k + 1; j < n; ++j) at(i, j) -= f * at(k, j);
            x[static_cast<std::size_t>(i)] -= f * x[static_cast<std::size_t>(k)];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) s -= at(i, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = s / at(i, i);
    }

    SolveReport report;
    report.relative_residual = detail::relative_residual(a, x, b);
    report.solution = std::move(x);
    report.sweeps_used = 0;
    return report;
}

namespace detail {

enum class SweepKind { jacobi, gauss_seidel };

inline SolveReport solve_by_sweeps(const SymmetricOperator& a, const Vector& b,
                                   const SolveOptions& opts, SweepKind kind) {
    check_system(a, b);
    opts.validate();
    const int n = a.dim();
    for (int i = 0; i < n; ++i)
        if (a(i, i) == 0.0)
            throw SplittingError(std::string(kind == SweepKind::jacobi ? "solve_jacobi" : "solve_gauss_seidel") +
                                 ": zero diagonal entry at row " + std::to_string(i));

    Vector x(static_cast<std::size_t>(n), 0.0);
    if (opts.initial_guess) {
        if (static_cast<int>(opts.initial_guess->size()) != n)
            throw ContractError("solve: initial guess has wrong dimension");
        x = *opts.initial_guess;
    }

    Vector next(static_cast<std::size_t>(n), 0.0);
    double residual = relative_residual(a, x, b);
    for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
        if (kind == SweepKind::jacobi) {
            for (int i = 0; i < n; ++i) {
                double s = b[static_cast<std::size_t>(i)];
                for (int j = 0; j < n; ++j)
                    if (j != i) s -= a(i, j) * x[static_cast<std::size_t>(j)];
                next[static_cast<std::size_t>(i)] = s / a(i, i);
            }
            x = next;
        } else {
            for (int i = 0; i < n; ++i) {
                double s = b[static_cast<std::size_t>(i)];
                for (int j = 0; j < n; ++j)
                    if (j != i) s -= a(i, j) * x[static_cast<std::size_t>(j)];
                x[static_cast<std::size_t>(i)] = s / a(i, i);
            }
        }
        residual = relative_residual(a, x, b);
        if (!std::isfinite(residual))
            throw NonConvergenceError(std::string(kind == SweepKind::jacobi ? "solve_jacobi" : "solve_gauss_seidel") +
                                          ": iteration diverged (non-finite residual) at sweep " +
                                          std::to_string(sweep),
                                      x, residual, sweep);
        if (residual <= opts.tolerance)
            return {x, residual, sweep};
    }
    throw NonConvergenceError(std::string(kind == SweepKind::jacobi ? "solve_jacobi" : "solve_gauss_seidel") +
                                  ": residual " + format_double(residual, "%.3g") +
                                  " above tolerance after " + std::to_string(opts.max_sweeps) + " sweeps",
                              x, residual, opts.max_sweeps);
}

} // namespace detail

/// Classical Jacobi sweeps from the zero vector (or the warm start).
inline SolveReport solve_jacobi(const SymmetricOperator& a, const Vector& b,
                                const SolveOptions& opts = {}) {
    return detail::solve_by_sweeps(a, b, opts, detail::SweepKind::jacobi);
}

/// Gauss-Seidel forward sweeps, updating in place.
inline SolveReport solve_gauss_seidel(const SymmetricOperator& a, const Vector& b,
                                      const SolveOptions& opts = {}) {
    return detail::solve_by_sweeps(a, b, opts, detail::SweepKind::gauss_seidel);
}

/// Dispatch on opts.method.
inline SolveReport solve(const SymmetricOperator& a, const Vector& b, const SolveOptions& opts = {}) {
    switch (opts.method) {
        case SolveMethod::direct_gauss: return solve_gauss(a, b, opts);
        case SolveMethod::jacobi: return solve_jacobi(a, b, opts);
        case SolveMethod::gauss_seidel: return solve_gauss_seidel(a, b, opts);
    }
    throw ContractError("solve: unknown method");
}

} // namespace copower
