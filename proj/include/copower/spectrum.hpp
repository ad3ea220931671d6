#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "copower/operators.hpp"

namespace copower {

// ---------------------------------------------------------------------------
// Declarative problems
// ---------------------------------------------------------------------------

/// Paired simultaneous eigenvalues (e_i, s_i) plus an optional rotation seed.
/// Without a seed the built operators are diagonal in the given order.
struct SpectrumSpec {
    std::vector<std::pair<double, double>> pairs; // (e_i, s_i)
    std::optional<std::uint64_t> rotation_seed;

    int dim() const { return static_cast<int>(pairs.size()); }

    Vector e_values() const {
        Vector v(pairs.size());
        for (std::size_t i = 0; i < pairs.size(); ++i) v[i] = pairs[i].first;
        return v;
    }
    Vector s_values() const {
        Vector v(pairs.size());
        for (std::size_t i = 0; i < pairs.size(); ++i) v[i] = pairs[i].second;
        return v;
    }
};

// ---------------------------------------------------------------------------
// Deterministic random sources
// ---------------------------------------------------------------------------

/// mt19937_64 with explicit uniform/normal mappings. The standard pins the
/// generator's output sequence, so the same seed reproduces the same stream
/// on every conforming implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] keeps the log finite.
        const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Orthonormalizes a seeded standard-normal matrix (modified Gram-Schmidt
/// with one re-orthogonalization pass). Deterministic in (n, seed).
inline Matrix random_orthogonal(int n, std::uint64_t seed) {
    if (n < 1) throw ContractError("random_orthogonal: n must be >= 1");
    Rng rng(seed);
    Matrix q(n, n);
    for (int j = 0; j < n; ++j) {
        Vector v(static_cast<std::size_t>(n));
        for (;;) {
            for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = rng.normal();
            for (int pass = 0; pass < 2; ++pass) {
                for (int k = 0; k < j; ++k) {
                    const Vector qk = q.column(k);
                    const double proj = dot(qk, v);
                    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] -= proj * qk[static_cast<std::size_t>(i)];
                }
            }
            const double nv = norm2(v);
            if (nv > 1e-8 * std::sqrt(static_cast<double>(n))) {
                for (double& c : v) c /= nv;
                break;
            }
            // astronomically unlikely rank collision; draw a fresh column
        }
        q.set_column(j, v);
    }
    return q;
}

// ---------------------------------------------------------------------------
// Construction of commuting pairs
// ---------------------------------------------------------------------------

namespace detail {

inline SymmetricOperator conjugate_diagonal(const Matrix& q, const Vector& d) {
    const int n = q.rows;
    Vector flat(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += q(i, k) * d[static_cast<std::size_t>(k)] * q(j, k);
            flat[static_cast<std::size_t>(i) * n + j] = s;
            flat[static_cast<std::size_t>(j) * n + i] = s; // exact symmetry by construction
        }
    }
    return SymmetricOperator::from_flat(n, flat);
}

} // namespace detail

/// Builds H = Q diag(e) Q^T and S = Q diag(s) Q^T sharing the eigenbasis Q;
/// returns the pair and Q itself.
inline std::pair<CommutingPair, Matrix> build_commuting_pair(const SpectrumSpec& spec) {
    if (spec.pairs.empty()) throw ContractError("build_commuting_pair: empty spectrum");
    const int n = spec.dim();
    if (!spec.rotation_seed) {
        CommutingPair pair(SymmetricOperator::diagonal(spec.e_values()),
                           SymmetricOperator::diagonal(spec.s_values()));
        return {std::move(pair), Matrix::identity(n)};
    }
    const Matrix q = random_orthogonal(n, *spec.rotation_seed);
    CommutingPair pair(detail::conjugate_diagonal(q, spec.e_values()),
                       detail::conjugate_diagonal(q, spec.s_values()));
    return {std::move(pair), q};
}

// ---------------------------------------------------------------------------
// Brute-force eigensolver (verification oracle)
// ---------------------------------------------------------------------------

struct EigenDecomposition {
    Vector eigenvalues;  // ascending
    Matrix eigenvectors; // orthonormal columns, matching order
    double residual = 0.0; // ||A V - V diag||_F against the input
};

/// Cyclic Jacobi rotations, swept until the off-diagonal Frobenius norm falls
/// below 1e-12 * ||A||_F. Independent of every iterative scheme in this
/// library, which is the point: it is the test oracle.
inline EigenDecomposition jacobi_eigensolve(const SymmetricOperator& a) {
    const int n = a.dim();
    Vector m = a.dense();
    Matrix v = Matrix::identity(n);
    auto at = [&](int i, int j) -> double& { return m[static_cast<std::size_t>(i) * n + j]; };

    double frob = 0.0;
    for (const double x : m) frob += x * x;
    frob = std::sqrt(frob);
    const double target = 1e-12 * frob;

    auto off_norm = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += at(i, j) * at(i, j);
        return std::sqrt(2.0 * s);
    };

    bool done = (n == 1) || frob == 0.0 || off_norm() <= target;
    for (int sweep = 0; sweep < 100 && !done; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double tau = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                for (int k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
        done = off_norm() <= target;
    }
    if (!done)
        throw OracleError("jacobi_eigensolve: off-diagonal norm still above target after 100 sweeps");

    // ascending eigenvalue order
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return at(i, i) < at(j, j); });

    EigenDecomposition dec;
    dec.eigenvalues.resize(static_cast<std::size_t>(n));
    dec.eigenvectors = Matrix(n, n);
    for (int j = 0; j < n; ++j) {
        dec.eigenvalues[static_cast<std::size_t>(j)] = at(order[static_cast<std::size_t>(j)], order[static_cast<std::size_t>(j)]);
        dec.eigenvectors.set_column(j, v.column(order[static_cast<std::size_t>(j)]));
    }

    double res = 0.0;
    for (int j = 0; j < n; ++j) {
        const Vector col = dec.eigenvectors.column(j);
        const Vector av = a.apply(col);
        for (int i = 0; i < n; ++i) {
            const double d = av[static_cast<std::size_t>(i)] - dec.eigenvalues[static_cast<std::size_t>(j)] * col[static_cast<std::size_t>(i)];
            res += d * d;
        }
    }
    dec.residual = std::sqrt(res);
    return dec;
}

// ---------------------------------------------------------------------------
// Simultaneous diagonalization of a certified commuting pair
// ---------------------------------------------------------------------------

struct SimultaneousDecomposition {
    Vector e_values;  // <q_i|H|q_i>, exact H-eigenvalues of the shared basis
    Vector s_values;  // S-eigenvalues, ascending
    Matrix basis;     // shared orthonormal eigenbasis, columns
    double residual = 0.0; // max of the two ||A Q - Q diag||_F residuals
};

/// Diagonalizes S, then re-diagonalizes H inside each (near-)degenerate
/// S-eigenspace so every basis column is an eigenvector of both operators.
inline SimultaneousDecomposition simultaneous_eigensolve(const CommutingPair& pair,
                                                         double cluster_tol = 1e-8) {
    const int n = pair.dim();
    EigenDecomposition ds = jacobi_eigensolve(pair.S());
    Matrix basis = ds.eigenvectors;
    Vector e_vals(static_cast<std::size_t>(n), 0.0);

    int begin = 0;
    while (begin < n) {
        int end = begin + 1;
        while (end < n && std::abs(ds.eigenvalues[static_cast<std::size_t>(end)] -
                                   ds.eigenvalues[static_cast<std::size_t>(end - 1)]) <= cluster_tol)
            ++end;
        const int m = end - begin;
        if (m == 1) {
            e_vals[static_cast<std::size_t>(begin)] = dot(basis.column(begin), pair.H().apply(basis.column(begin)));
        } else {
            // restrict H to the cluster and diagonalize the block
            std::vector<Vector> cols(static_cast<std::size_t>(m));
            std::vector<Vector> h_cols(static_cast<std::size_t>(m));
            for (int k = 0; k < m; ++k) {
                cols[static_cast<std::size_t>(k)] = basis.column(begin + k);
                h_cols[static_cast<std::size_t>(k)] = pair.H().apply(cols[static_cast<std::size_t>(k)]);
            }
            Vector block(static_cast<std::size_t>(m) * m, 0.0);
            for (int r = 0; r < m; ++r)
                for (int c = 0; c < m; ++c)
                    block[static_cast<std::size_t>(r) * m + c] =
                        0.5 * (dot(cols[static_cast<std::size_t>(r)], h_cols[static_cast<std::size_t>(c)]) +
                               dot(cols[static_cast<std::size_t>(c)], h_cols[static_cast<std::size_t>(r)]));
            EigenDecomposition db = jacobi_eigensolve(SymmetricOperator::from_flat(m, block));
            for (int k = 0; k < m; ++k) {
                Vector rotated(static_cast<std::size_t>(n), 0.0);
                for (int c = 0; c < m; ++c)
                    for (int i = 0; i < n; ++i)
                        rotated[static_cast<std::size_t>(i)] += db.eigenvectors(c, k) * cols[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
                basis.set_column(begin + k, rotated);
                e_vals[static_cast<std::size_t>(begin + k)] = db.eigenvalues[static_cast<std::size_t>(k)];
            }
        }
        begin = end;
    }

    SimultaneousDecomposition dec;
    dec.s_values = std::move(ds.eigenvalues);
    dec.e_values = std::move(e_vals);
    dec.basis = std::move(basis);

    double res_h = 0.0, res_s = 0.0;
    for (int j = 0; j < n; ++j) {
        const Vector col = dec.basis.column(j);
        const Vector hv = pair.H().apply(col);
        const Vector sv = pair.S().apply(col);
        for (int i = 0; i < n; ++i) {
            const double dh = hv[static_cast<std::size_t>(i)] - dec.e_values[static_cast<std::size_t>(j)] * col[static_cast<std::size_t>(i)];
            const double dsv = sv[static_cast<std::size_t>(i)] - dec.s_values[static_cast<std::size_t>(j)] * col[static_cast<std::size_t>(i)];
            res_h += dh * dh;
            res_s += dsv * dsv;
        }
    }
    dec.residual = std::sqrt(std::max(res_h, res_s));
    return dec;
}

// ---------------------------------------------------------------------------
// Built-in fixtures
// ---------------------------------------------------------------------------

/// 3-state reference problem: e = (1, 2, 3) paired with s = (1.5, 1, 0.5).
inline SpectrumSpec table1_fixture() {
    return SpectrumSpec{{{1.0, 1.5}, {2.0, 1.0}, {3.0, 0.5}}, std::nullopt};
}

/// 15-state reference problem. Seven positions are pinned anchors; the rest
/// are filled by linear interpolation between flanking anchors, which keeps
/// s strictly increasing and e strictly decreasing.
inline SpectrumSpec table2_fixture() {
    struct Anchor { int pos; double e, s; }; // 1-based positions
    const Anchor anchors[] = {
        {1, 3.4, 0.3}, {5, 1.0, 1.5}, {6, -0.1, 1.8}, {7, -0.2, 1.9},
        {8, -2.0, 2.0}, {11, -3.8, 2.9}, {15, -5.4, 4.1},
    };
    SpectrumSpec spec;
    spec.pairs.resize(15);
    const int count = static_cast<int>(sizeof(anchors) / sizeof(anchors[0]));
    for (int a = 0; a + 1 < count; ++a) {
        const Anchor& lo = anchors[a];
        const Anchor& hi = anchors[a + 1];
        for (int pos = lo.pos + 1; pos < hi.pos; ++pos) {
            const double t = static_cast<double>(pos - lo.pos) / static_cast<double>(hi.pos - lo.pos);
            spec.pairs[static_cast<std::size_t>(pos - 1)] = {lo.e + t * (hi.e - lo.e),
                                                             lo.s + t * (hi.s - lo.s)};
        }
    }
    for (int a = 0; a < count; ++a) // anchors are pinned exactly
        spec.pairs[static_cast<std::size_t>(anchors[a].pos - 1)] = {anchors[a].e, anchors[a].s};
    return spec;
}

} // namespace copower
