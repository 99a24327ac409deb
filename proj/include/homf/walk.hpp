#pragma once

// Column/row sampling of f_T(A) = (A + A^2 + ... + A^T) / T via the
// recursion a_1 = column of A, a_t = a_1 + A a_{t-1}, without ever
// materializing a matrix power. The recursion runs in a dense work vector;
// columns densify quickly with T, so sparse accumulation buys nothing and
// would complicate determinism.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "homf/sparse.hpp"

namespace homf {

struct WalkConfig {
    unsigned walk_length = 2;       // T >= 1
    double support_epsilon = 0.0;   // entries with |v| <= epsilon are outside the support
};

namespace detail {

inline void check_walk(const WalkConfig& cfg) {
    if (cfg.walk_length < 1) {
        throw std::invalid_argument("walk_length must be >= 1");
    }
    if (cfg.support_epsilon < 0.0) {
        throw std::invalid_argument("support_epsilon must be >= 0");
    }
}

/// a_T / T with a_t = seed + step * a_{t-1}; exactly T-1 matvecs.
inline DenseVector walk_from_seed(const SparseMatrix& step, DenseVector seed,
                                  unsigned walk_length) {
    DenseVector cur = seed;
    DenseVector next;
    for (unsigned t = 2; t <= walk_length; ++t) {
        spmv_into(step, cur, next);
        for (std::size_t j = 0; j < next.size(); ++j) {
            next[j] = seed[j] + next[j];
        }
        std::swap(cur, next);
    }
    const double denom = static_cast<double>(walk_length);
    for (double& v : cur) v /= denom;
    return cur;
}

/// Same recursion driven by transpose-matvec on `a` (for rows of f_T(A)).
inline DenseVector walk_from_seed_transposed(const SparseMatrix& a, DenseVector seed,
                                             unsigned walk_length) {
    DenseVector cur = seed;
    DenseVector next;
    for (unsigned t = 2; t <= walk_length; ++t) {
        spmv_transpose_into(a, cur, next);
        for (std::size_t j = 0; j < next.size(); ++j) {
            next[j] = seed[j] + next[j];
        }
        std::swap(cur, next);
    }
    const double denom = static_cast<double>(walk_length);
    for (double& v : cur) v /= denom;
    return cur;
}

/// Column i of a CSR matrix as a dense vector (binary search per row).
inline DenseVector extract_column(const SparseMatrix& a, std::size_t i) {
    DenseVector col(a.n_rows, 0.0);
    for (std::size_t r = 0; r < a.n_rows; ++r) {
        const auto cols = a.row_cols(r);
        const auto it = std::lower_bound(cols.begin(), cols.end(), i);
        if (it != cols.end() && *it == i) {
            col[r] = a.values[a.row_offsets[r] + static_cast<std::size_t>(it - cols.begin())];
        }
    }
    return col;
}

/// Row i of a CSR matrix as a dense vector.
inline DenseVector extract_row(const SparseMatrix& a, std::size_t i) {
    DenseVector row(a.n_cols, 0.0);
    for (std::size_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
        row[a.col_indices[p]] = a.values[p];
    }
    return row;
}

inline void check_node(const SparseMatrix& a, std::size_t i) {
    if (i >= a.n_rows || i >= a.n_cols) {
        throw std::invalid_argument("node index " + std::to_string(i) +
                                    " out of range for " + std::to_string(a.n_rows) +
                                    "x" + std::to_string(a.n_cols) + " matrix");
    }
}

}  // namespace detail

/// Column i of f_T(A). Performs exactly walk_length - 1 matvecs.
inline DenseVector sample_column(const SparseMatrix& a, std::size_t i,
                                 const WalkConfig& cfg) {
    detail::check_walk(cfg);
    detail::check_node(a, i);
    return detail::walk_from_seed(a, detail::extract_column(a, i), cfg.walk_length);
}

/// Column i of f_T(A) when the transpose of A is already materialized;
/// bitwise identical to the single-matrix overload, but the seed column is
/// read in O(degree) instead of a scan.
inline DenseVector sample_column(const SparseMatrix& a, const SparseMatrix& a_transpose,
                                 std::size_t i, const WalkConfig& cfg) {
    detail::check_walk(cfg);
    detail::check_node(a, i);
    return detail::walk_from_seed(a, detail::extract_row(a_transpose, i), cfg.walk_length);
}

/// Row i of f_T(A), via f_T(A)^T = f_T(A^T): the same recursion with
/// transpose-matvecs seeded by row i of A. The entries of a sampled row
/// sum to 1 up to roundoff (an average of row-stochastic matrices is
/// row-stochastic).
inline DenseVector sample_row(const SparseMatrix& a, std::size_t i,
                              const WalkConfig& cfg) {
    detail::check_walk(cfg);
    detail::check_node(a, i);
    return detail::walk_from_seed_transposed(a, detail::extract_row(a, i),
                                             cfg.walk_length);
}

/// Row i of f_T(A) using the materialized transpose for the steps;
/// bitwise identical to the single-matrix overload.
inline DenseVector sample_row(const SparseMatrix& a, const SparseMatrix& a_transpose,
                              std::size_t i, const WalkConfig& cfg) {
    detail::check_walk(cfg);
    detail::check_node(a, i);
    return detail::walk_from_seed(a_transpose, detail::extract_row(a, i),
                                  cfg.walk_length);
}

/// Indices with |v_j| > support_epsilon, ascending. Truncation applies only
/// to the reported support, never inside the recursion.
inline std::vector<std::size_t> support(const DenseVector& v, const WalkConfig& cfg) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (std::abs(v[j]) > cfg.support_epsilon) idx.push_back(j);
    }
    return idx;
}

/// Eigenvalue transport h(lambda, T) = (sum_{t=1..T} lambda^t) / T: an
/// eigenvalue lambda of A maps to h(lambda, T) of f_T(A). Closed form
/// lambda (1 - lambda^T) / ((1 - lambda) T) away from 1; direct summation
/// near 1 where the closed form cancels catastrophically.
inline double eigen_map(double lambda, unsigned walk_length) {
    if (walk_length < 1) throw std::invalid_argument("walk length must be >= 1");
    if (std::abs(lambda) > 1.0 + 1e-12) {
        throw std::invalid_argument("eigen_map requires |lambda| <= 1, got " +
                                    std::to_string(lambda));
    }
    if (lambda == 1.0) return 1.0;
    if (std::abs(1.0 - lambda) > 1e-9) {
        return lambda * (1.0 - std::pow(lambda, static_cast<double>(walk_length))) /
               ((1.0 - lambda) * static_cast<double>(walk_length));
    }
    double sum = 0.0;
    double power = 1.0;
    for (unsigned t = 1; t <= walk_length; ++t) {
        power *= lambda;
        sum += power;
    }
    return sum / static_cast<double>(walk_length);
}

}  // namespace homf
