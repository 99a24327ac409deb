#pragma once

// Alternating fit of U, V against f_T(A): each sweep updates every row of
// one factor independently by sampling the matching column/row of f_T(A),
// restricting to its support and solving a small ridge problem on the k x k
// normal equations with conjugate gradients.
//
// Determinism contract: for a fixed seed the fitted embeddings are bitwise
// identical for any worker count. Per-index updates read only the factor
// snapshots from the previous pass, write disjoint output rows, and follow
// a fixed accumulation order everywhere.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "homf/dense.hpp"
#include "homf/parallel.hpp"
#include "homf/rng.hpp"
#include "homf/sparse.hpp"
#include "homf/walk.hpp"

namespace homf {

struct EmbeddingPair {
    std::size_t m = 0;  // row-entity count
    std::size_t n = 0;  // column-entity count
    std::size_t k = 0;  // rank
    DenseMatrix u;      // (m+n) x k
    DenseMatrix v;      // (m+n) x k
};

struct FitConfig {
    std::size_t k = 10;
    double lambda = 0.1;  // ridge weight in the normal equations
    WalkConfig walk{};
    std::size_t outer_sweeps = 20;
    double objective_rel_tol = 1e-4;
    std::size_t objective_sample_size = 1000;
    double cg_tol = 1e-8;
    std::size_t cg_max_iter = 100;
    std::uint64_t seed = 0;
    std::size_t workers = 0;  // 0 = resolve via HOMF_WORKERS, then hardware
    bool update_u_first = false;
    bool symmetrized_prediction = false;
};

struct ObjectiveTrace {
    std::vector<double> objective;  // sampled estimate after each sweep
    bool converged = false;
    std::size_t v_passes = 0;
    std::size_t u_passes = 0;
};

enum class FactorSide {
    rows,     // U: fit rows of f_T(A) against the V snapshot
    columns,  // V: fit columns of f_T(A) against the U snapshot
};

/// Uniform [0,1] entries from the seeded generator, U first then V,
/// row-major. Deterministic per seed.
inline EmbeddingPair init_embeddings(std::size_t m, std::size_t n, std::size_t k,
                                     std::uint64_t seed) {
    if (k < 1 || m + n < 1) {
        throw std::invalid_argument("init_embeddings: dimensions must be positive");
    }
    EmbeddingPair e;
    e.m = m;
    e.n = n;
    e.k = k;
    e.u = DenseMatrix(m + n, k);
    e.v = DenseMatrix(m + n, k);
    Rng rng(seed);
    for (double& x : e.u.data) x = rng.uniform01();
    for (double& x : e.v.data) x = rng.uniform01();
    return e;
}

/// Ridge solve (X^T X + lambda I) v = X^T y on the k x k normal equations
/// by conjugate gradients, warm-started when a previous coordinate value is
/// supplied. s = 0 rows (empty support) shrinks to the zero vector. Stops
/// at residual norm <= cg_tol * ||X^T y|| or after cg_max_iter iterations.
inline DenseVector solve_ridge(const DenseMatrix& x, std::span<const double> y,
                               double lambda, double cg_tol, std::size_t cg_max_iter,
                               std::span<const double> warm_start = {}) {
    const std::size_t s = x.rows;
    const std::size_t k = x.cols;
    if (y.size() != s) {
        throw std::invalid_argument("solve_ridge: y length " + std::to_string(y.size()) +
                                    " != design rows " + std::to_string(s));
    }
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("solve_ridge: lambda must be > 0");
    }
    if (s == 0) return DenseVector(k, 0.0);

    // b = X^T y and H = X^T X + lambda I, accumulated row by row in a
    // fixed order.
    DenseVector b(k, 0.0);
    DenseMatrix h(k, k, 0.0);
    for (std::size_t r = 0; r < s; ++r) {
        const double* xr = x.row(r);
        const double yr = y[r];
        for (std::size_t i = 0; i < k; ++i) {
            b[i] += xr[i] * yr;
            const double xi = xr[i];
            double* hrow = h.row(i);
            for (std::size_t j = i; j < k; ++j) {
                hrow[j] += xi * xr[j];
            }
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        h.at(i, i) += lambda;
        for (std::size_t j = i + 1; j < k; ++j) {
            h.at(j, i) = h.at(i, j);
        }
    }
    for (double v : b) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("solve_ridge: non-finite inputs");
        }
    }
    for (double v : h.data) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("solve_ridge: non-finite inputs");
        }
    }

    const double b_norm = std::sqrt(dot(b.data(), b.data(), k));
    if (b_norm == 0.0) return DenseVector(k, 0.0);
    const double target = cg_tol * b_norm;

    DenseVector v(k, 0.0);
    if (!warm_start.empty()) {
        if (warm_start.size() != k) {
            throw std::invalid_argument("solve_ridge: warm start length mismatch");
        }
        std::copy(warm_start.begin(), warm_start.end(), v.begin());
    }

    DenseVector r(k), p(k), hp(k);
    for (std::size_t i = 0; i < k; ++i) {
        r[i] = b[i] - dot(h.row(i), v.data(), k);
    }
    p = r;
    double rs = dot(r.data(), r.data(), k);
    for (std::size_t iter = 0; iter < cg_max_iter && std::sqrt(rs) > target; ++iter) {
        for (std::size_t i = 0; i < k; ++i) {
            hp[i] = dot(h.row(i), p.data(), k);
        }
        const double php = dot(p.data(), hp.data(), k);
        if (php <= 0.0) break;  // numerically degenerate direction
        const double alpha = rs / php;
        for (std::size_t i = 0; i < k; ++i) {
            v[i] += alpha * p[i];
            r[i] -= alpha * hp[i];
        }
        const double rs_next = dot(r.data(), r.data(), k);
        const double beta = rs_next / rs;
        rs = rs_next;
        for (std::size_t i = 0; i < k; ++i) {
            p[i] = r[i] + beta * p[i];
        }
    }
    return v;
}

namespace detail {

/// One coordinate update: sample the target vector of f_T(A) for index i,
/// restrict the fixed factor to its support and ridge-solve.
inline void update_one_index(const SparseMatrix& a, const SparseMatrix& a_transpose,
                             const DenseMatrix& fixed, FactorSide side,
                             const FitConfig& cfg, const DenseMatrix& current,
                             std::size_t i, DenseMatrix& result, DenseMatrix& design,
                             DenseVector& target) {
    const DenseVector x = side == FactorSide::columns
                              ? sample_column(a, a_transpose, i, cfg.walk)
                              : sample_row(a, a_transpose, i, cfg.walk);
    const std::vector<std::size_t> omega = support(x, cfg.walk);

    const std::size_t s = omega.size();
    const std::size_t k = cfg.k;
    design.rows = s;
    design.cols = k;
    design.data.resize(s * k);
    target.resize(s);
    for (std::size_t r = 0; r < s; ++r) {
        const double* src = fixed.row(omega[r]);
        std::copy(src, src + k, design.row(r));
        target[r] = x[omega[r]];
    }
    const DenseVector solution =
        solve_ridge(design, target, cfg.lambda, cfg.cg_tol, cfg.cg_max_iter,
                    std::span<const double>(current.row(i), k));
    std::copy(solution.begin(), solution.end(), result.row(i));
}

}  // namespace detail

/// One full coordinate-descent pass over all m+n indices of one factor.
/// `fixed` is the other factor, `current` the previous value of the updated
/// factor (used for CG warm starts only). Indices are distributed across
/// cfg.workers threads; the result is identical for any worker count.
inline DenseMatrix update_factor(const SparseMatrix& a, const SparseMatrix& a_transpose,
                                 const DenseMatrix& fixed, FactorSide side,
                                 const FitConfig& cfg, const DenseMatrix& current) {
    const std::size_t total = a.n_rows;
    if (a.n_rows != a.n_cols) {
        throw std::invalid_argument("update_factor: transition matrix must be square");
    }
    if (fixed.rows != total || current.rows != total || fixed.cols != cfg.k ||
        current.cols != cfg.k) {
        throw std::invalid_argument("update_factor: factor shape mismatch");
    }
    DenseMatrix result = current;
    parallel_chunks(0, total, cfg.workers, [&](std::size_t lo, std::size_t hi) {
        DenseMatrix design;
        DenseVector target;
        for (std::size_t i = lo; i < hi; ++i) {
            detail::update_one_index(a, a_transpose, fixed, side, cfg, current, i,
                                     result, design, target);
        }
    });
    return result;
}

/// Convenience overload that materializes the transpose for one pass.
inline DenseMatrix update_factor(const SparseMatrix& a, const DenseMatrix& fixed,
                                 FactorSide side, const FitConfig& cfg,
                                 const DenseMatrix& current) {
    const SparseMatrix at = transpose(a);
    return update_factor(a, at, fixed, side, cfg, current);
}

/// Unbiased estimate of the objective
///   1/2 ||P_Omega(f_T(A) - U V^T)||_F^2 + (lambda/2)(||U||_F^2 + ||V||_F^2)
/// over a fixed sample of columns: the data term is summed over the sampled
/// columns' supports and rescaled by (m+n)/|sample|. Per-column terms are
/// reduced in index order so the estimate is worker-count independent.
inline double sampled_objective(const SparseMatrix& a, const SparseMatrix& a_transpose,
                                const EmbeddingPair& e, const FitConfig& cfg,
                                const std::vector<std::size_t>& sample_columns) {
    const std::size_t total = a.n_rows;
    std::vector<double> column_error(sample_columns.size(), 0.0);
    parallel_chunks(0, sample_columns.size(), cfg.workers,
                    [&](std::size_t lo, std::size_t hi) {
                        for (std::size_t s = lo; s < hi; ++s) {
                            const std::size_t j = sample_columns[s];
                            const DenseVector x = sample_column(a, a_transpose, j, cfg.walk);
                            const double* vj = e.v.row(j);
                            double err = 0.0;
                            for (std::size_t i = 0; i < total; ++i) {
                                if (std::abs(x[i]) <= cfg.walk.support_epsilon) continue;
                                const double d = x[i] - dot(e.u.row(i), vj, e.k);
                                err += d * d;
                            }
                            column_error[s] = err;
                        }
                    });
    double data_term = 0.0;
    for (double err : column_error) data_term += err;
    const double scale =
        static_cast<double>(total) / static_cast<double>(sample_columns.size());
    return 0.5 * scale * data_term +
           0.5 * cfg.lambda * (frobenius_squared(e.u) + frobenius_squared(e.v));
}

/// Alternating fit. A must be the row-stochastic transition matrix of a
/// graph with m row entities followed by n column entities. Runs V then U
/// passes (or the reverse when cfg.update_u_first) for up to outer_sweeps,
/// stopping early when the sampled objective's relative change drops below
/// cfg.objective_rel_tol.
inline std::pair<EmbeddingPair, ObjectiveTrace> fit(const SparseMatrix& a,
                                                    std::size_t m, std::size_t n,
                                                    const FitConfig& cfg) {
    if (a.n_rows != a.n_cols || a.n_rows != m + n) {
        throw std::invalid_argument("fit: transition matrix must be (m+n) x (m+n)");
    }
    if (cfg.outer_sweeps < 1) {
        throw std::invalid_argument("fit: outer_sweeps must be >= 1");
    }
    for (std::size_t i = 0; i < a.n_rows; ++i) {
        double s = 0.0;
        for (std::size_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
            s += a.values[p];
        }
        if (std::abs(s - 1.0) > 1e-6) {
            throw std::invalid_argument("fit: matrix is not row-stochastic (row " +
                                        std::to_string(i) + " sums to " +
                                        std::to_string(s) + ")");
        }
    }

    const SparseMatrix at = transpose(a);
    EmbeddingPair e = init_embeddings(m, n, cfg.k, cfg.seed);

    // Fixed seeded sample of columns for the objective estimate, drawn from
    // a sub-stream so it never perturbs the init draws.
    const std::size_t total = m + n;
    const std::size_t sample_size =
        std::min<std::size_t>(std::max<std::size_t>(cfg.objective_sample_size, 1), total);
    std::vector<std::size_t> sample_columns(total);
    for (std::size_t i = 0; i < total; ++i) sample_columns[i] = i;
    if (sample_size < total) {
        Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
        rng.shuffle(sample_columns);
        sample_columns.resize(sample_size);
        std::sort(sample_columns.begin(), sample_columns.end());
    }

    ObjectiveTrace trace;
    for (std::size_t sweep = 0; sweep < cfg.outer_sweeps; ++sweep) {
        if (cfg.update_u_first) {
            e.u = update_factor(a, at, e.v, FactorSide::rows, cfg, e.u);
            ++trace.u_passes;
            e.v = update_factor(a, at, e.u, FactorSide::columns, cfg, e.v);
            ++trace.v_passes;
        } else {
            e.v = update_factor(a, at, e.u, FactorSide::columns, cfg, e.v);
            ++trace.v_passes;
            e.u = update_factor(a, at, e.v, FactorSide::rows, cfg, e.u);
            ++trace.u_passes;
        }
        const double obj = sampled_objective(a, at, e, cfg, sample_columns);
        trace.objective.push_back(obj);
        if (trace.objective.size() >= 2) {
            const double prev = trace.objective[trace.objective.size() - 2];
            const double rel = std::abs(prev - obj) / std::max(std::abs(prev), 1e-30);
            if (rel < cfg.objective_rel_tol) {
                trace.converged = true;
                break;
            }
        }
    }
    return {std::move(e), std::move(trace)};
}

/// Predicted affinity of a (row entity, column entity) pair: the inner
/// product of the user's U row with the item's V row. The symmetrized
/// variant averages in the transposed pairing; it is experimental and off
/// by default.
inline double predict(const EmbeddingPair& e, std::size_t user, std::size_t item,
                      bool symmetrized = false) {
    if (user >= e.m || item >= e.n) {
        throw std::invalid_argument("predict: index out of range (user " +
                                    std::to_string(user) + ", item " +
                                    std::to_string(item) + ")");
    }
    const double forward = dot(e.u.row(user), e.v.row(e.m + item), e.k);
    if (!symmetrized) return forward;
    const double backward = dot(e.v.row(user), e.u.row(e.m + item), e.k);
    return 0.5 * (forward + backward);
}

enum class NeighborPool { users, items, all };

/// K nearest rows of U by Euclidean distance within the pool, excluding the
/// query node. Ties break by ascending node index; asking for more
/// neighbors than the pool holds truncates.
inline std::vector<std::pair<std::size_t, double>> neighbors(const EmbeddingPair& e,
                                                             std::size_t node,
                                                             std::size_t count,
                                                             NeighborPool pool) {
    const std::size_t total = e.m + e.n;
    if (node >= total) {
        throw std::invalid_argument("neighbors: node index out of range");
    }
    std::size_t lo = 0, hi = total;
    if (pool == NeighborPool::users) hi = e.m;
    if (pool == NeighborPool::items) lo = e.m;

    std::vector<std::pair<std::size_t, double>> ranked;
    for (std::size_t i = lo; i < hi; ++i) {
        if (i == node) continue;
        double d2 = 0.0;
        const double* xi = e.u.row(i);
        const double* xq = e.u.row(node);
        for (std::size_t c = 0; c < e.k; ++c) {
            const double d = xi[c] - xq[c];
            d2 += d * d;
        }
        ranked.emplace_back(i, std::sqrt(d2));
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second < b.second : a.first < b.first;
    });
    if (ranked.size() > count) ranked.resize(count);
    return ranked;
}

}  // namespace homf
