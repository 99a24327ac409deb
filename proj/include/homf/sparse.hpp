#pragma once

// Compressed sparse row storage and the three kernels the rest of the
// library is built from: matvec, transpose-matvec and row normalization.
//
// Accumulation order in every kernel is fixed (row-major, increasing
// column) so results are bitwise reproducible regardless of how calls
// are distributed across worker threads.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace homf {

using DenseVector = std::vector<double>;

struct Triplet {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
};

/// CSR matrix. col_indices within each row are strictly increasing,
/// row_offsets is non-decreasing with row_offsets[0] == 0 and
/// row_offsets[n_rows] == nnz.
struct SparseMatrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<std::size_t> row_offsets;  // length n_rows + 1
    std::vector<std::size_t> col_indices;  // length nnz
    std::vector<double> values;            // length nnz

    std::size_t nnz() const { return values.size(); }

    std::span<const std::size_t> row_cols(std::size_t i) const {
        return {col_indices.data() + row_offsets[i],
                row_offsets[i + 1] - row_offsets[i]};
    }
    std::span<const double> row_values(std::size_t i) const {
        return {values.data() + row_offsets[i],
                row_offsets[i + 1] - row_offsets[i]};
    }
};

namespace detail {
inline std::atomic<std::uint64_t> matvec_calls{0};
}

/// Number of matvec kernel invocations (spmv + spmv_transpose) since the
/// last reset. Used by the complexity instrumentation tests.
inline std::uint64_t matvec_count() {
    return detail::matvec_calls.load(std::memory_order_relaxed);
}

inline void reset_matvec_count() {
    detail::matvec_calls.store(0, std::memory_order_relaxed);
}

/// Builds a canonical CSR matrix from (row, col, value) entries.
/// Duplicate (row, col) pairs are summed in input order.
inline SparseMatrix from_triplets(std::vector<Triplet> entries,
                                  std::size_t n_rows, std::size_t n_cols) {
    for (const Triplet& t : entries) {
        if (t.row >= n_rows) {
            throw std::invalid_argument(
                "from_triplets: row index " + std::to_string(t.row) + " >= " +
                std::to_string(n_rows) + " for triplet (" + std::to_string(t.row) +
                ", " + std::to_string(t.col) + ", " + std::to_string(t.value) + ")");
        }
        if (t.col >= n_cols) {
            throw std::invalid_argument(
                "from_triplets: column index " + std::to_string(t.col) + " >= " +
                std::to_string(n_cols) + " for triplet (" + std::to_string(t.row) +
                ", " + std::to_string(t.col) + ", " + std::to_string(t.value) + ")");
        }
        if (!std::isfinite(t.value)) {
            throw std::invalid_argument(
                "from_triplets: non-finite value for triplet (" +
                std::to_string(t.row) + ", " + std::to_string(t.col) + ")");
        }
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Triplet& a, const Triplet& b) {
                         return a.row != b.row ? a.row < b.row : a.col < b.col;
                     });

    SparseMatrix m;
    m.n_rows = n_rows;
    m.n_cols = n_cols;
    m.row_offsets.assign(n_rows + 1, 0);
    m.col_indices.reserve(entries.size());
    m.values.reserve(entries.size());

    for (std::size_t p = 0; p < entries.size();) {
        std::size_t q = p + 1;
        double sum = entries[p].value;
        while (q < entries.size() && entries[q].row == entries[p].row &&
               entries[q].col == entries[p].col) {
            sum += entries[q].value;
            ++q;
        }
        m.col_indices.push_back(entries[p].col);
        m.values.push_back(sum);
        m.row_offsets[entries[p].row + 1] += 1;
        p = q;
    }
    for (std::size_t i = 0; i < n_rows; ++i) {
        m.row_offsets[i + 1] += m.row_offsets[i];
    }
    return m;
}

/// Stored entries in row-major order. Round-trips the summed entry set
/// of from_triplets exactly.
inline std::vector<Triplet> to_triplets(const SparseMatrix& m) {
    std::vector<Triplet> out;
    out.reserve(m.nnz());
    for (std::size_t i = 0; i < m.n_rows; ++i) {
        for (std::size_t p = m.row_offsets[i]; p < m.row_offsets[i + 1]; ++p) {
            out.push_back({i, m.col_indices[p], m.values[p]});
        }
    }
    return out;
}

/// y = A x with strict row-major, increasing-column accumulation.
inline void spmv_into(const SparseMatrix& a, const DenseVector& x, DenseVector& y) {
    if (x.size() != a.n_cols) {
        throw std::invalid_argument("spmv: vector length " + std::to_string(x.size()) +
                                    " != n_cols " + std::to_string(a.n_cols));
    }
    y.assign(a.n_rows, 0.0);
    for (std::size_t i = 0; i < a.n_rows; ++i) {
        double acc = 0.0;
        for (std::size_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
            acc += a.values[p] * x[a.col_indices[p]];
        }
        y[i] = acc;
    }
    detail::matvec_calls.fetch_add(1, std::memory_order_relaxed);
}

inline DenseVector spmv(const SparseMatrix& a, const DenseVector& x) {
    DenseVector y;
    spmv_into(a, x, y);
    return y;
}

/// y = A^T x without materializing the transpose. Scatters row by row, so
/// each output component accumulates terms in increasing source-row order;
/// this matches spmv over the materialized transpose bitwise.
inline void spmv_transpose_into(const SparseMatrix& a, const DenseVector& x,
                                DenseVector& y) {
    if (x.size() != a.n_rows) {
        throw std::invalid_argument("spmv_transpose: vector length " +
                                    std::to_string(x.size()) + " != n_rows " +
                                    std::to_string(a.n_rows));
    }
    y.assign(a.n_cols, 0.0);
    for (std::size_t i = 0; i < a.n_rows; ++i) {
        const double xi = x[i];
        for (std::size_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
            y[a.col_indices[p]] += a.values[p] * xi;
        }
    }
    detail::matvec_calls.fetch_add(1, std::memory_order_relaxed);
}

inline DenseVector spmv_transpose(const SparseMatrix& a, const DenseVector& x) {
    DenseVector y;
    spmv_transpose_into(a, x, y);
    return y;
}

/// Materialized transpose in canonical CSR (counting sort, stable in the
/// source row order, so each output row has increasing column indices).
inline SparseMatrix transpose(const SparseMatrix& a) {
    SparseMatrix t;
    t.n_rows = a.n_cols;
    t.n_cols = a.n_rows;
    t.row_offsets.assign(a.n_cols + 1, 0);
    t.col_indices.resize(a.nnz());
    t.values.resize(a.nnz());

    for (std::size_t p = 0; p < a.nnz(); ++p) {
        t.row_offsets[a.col_indices[p] + 1] += 1;
    }
    for (std::size_t j = 0; j < a.n_cols; ++j) {
        t.row_offsets[j + 1] += t.row_offsets[j];
    }
    std::vector<std::size_t> fill(t.row_offsets.begin(), t.row_offsets.end() - 1);
    for (std::size_t i = 0; i < a.n_rows; ++i) {
        for (std::size_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
            const std::size_t dst = fill[a.col_indices[p]]++;
            t.col_indices[dst] = i;
            t.values[dst] = a.values[p];
        }
    }
    return t;
}

/// Divides each row by its sum. Rows with zero sum (dangling nodes) get a
/// unit self-loop so the result is always row-stochastic.
inline SparseMatrix row_normalize(const SparseMatrix& g) {
    for (double v : g.values) {
        if (v < 0.0) {
            throw std::invalid_argument(
                "row_normalize: negative value " + std::to_string(v) +
                "; graph weights must be non-negative");
        }
    }
    std::vector<double> row_sum(g.n_rows, 0.0);
    std::size_t zero_rows = 0;
    for (std::size_t i = 0; i < g.n_rows; ++i) {
        double s = 0.0;
        for (std::size_t p = g.row_offsets[i]; p < g.row_offsets[i + 1]; ++p) {
            s += g.values[p];
        }
        row_sum[i] = s;
        if (s == 0.0) ++zero_rows;
    }

    SparseMatrix a;
    a.n_rows = g.n_rows;
    a.n_cols = g.n_cols;
    a.row_offsets.assign(g.n_rows + 1, 0);
    a.col_indices.reserve(g.nnz() + zero_rows);
    a.values.reserve(g.nnz() + zero_rows);

    for (std::size_t i = 0; i < g.n_rows; ++i) {
        if (row_sum[i] == 0.0) {
            if (i >= g.n_cols) {
                throw std::invalid_argument(
                    "row_normalize: zero-sum row " + std::to_string(i) +
                    " cannot take a self-loop in a non-square matrix");
            }
            a.col_indices.push_back(i);
            a.values.push_back(1.0);
            a.row_offsets[i + 1] = 1;
            continue;
        }
        for (std::size_t p = g.row_offsets[i]; p < g.row_offsets[i + 1]; ++p) {
            a.col_indices.push_back(g.col_indices[p]);
            a.values.push_back(g.values[p] / row_sum[i]);
        }
        a.row_offsets[i + 1] = g.row_offsets[i + 1] - g.row_offsets[i];
    }
    for (std::size_t i = 0; i < g.n_rows; ++i) {
        a.row_offsets[i + 1] += a.row_offsets[i];
    }
    return a;
}

}  // namespace homf
