#pragma once

// Eigen-decay report for the CLI `spectrum` subcommand: computes the
// eigenvalues of a (small, dense-able) transition matrix A and maps each
// through the walk-averaging polynomial p_T(z) = (z + z^2 + ... + z^T)/T,
// whose values are the eigenvalues of the averaged walk matrix. Sorting
// the magnitudes shows how longer walks compress the spectrum.
//
// This helper depends on Eigen and is deliberately kept out of the
// library's include tree; only the CLI and tests use it.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <complex>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "homf/sparse.hpp"

namespace homf::tools {

inline Eigen::MatrixXd to_dense(const SparseMatrix& a) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.n_rows),
                                              static_cast<Eigen::Index>(a.n_cols));
    for (std::size_t i = 0; i < a.n_rows; ++i) {
        for (std::size_t p = a.row_offsets[i]; p < a.row_offsets[i + 1]; ++p) {
            d(static_cast<Eigen::Index>(i),
              static_cast<Eigen::Index>(a.col_indices[p])) = a.values[p];
        }
    }
    return d;
}

/// Magnitudes of p_T(lambda) over all eigenvalues of A, descending.
inline std::vector<double> eigen_decay(const SparseMatrix& a, std::size_t walk_length) {
    if (a.n_rows != a.n_cols) {
        throw std::invalid_argument("eigen_decay: matrix must be square");
    }
    if (a.n_rows > 2000) {
        throw std::invalid_argument("eigen_decay: dense eigensolve capped at 2000 "
                                    "nodes; got " + std::to_string(a.n_rows));
    }
    const Eigen::MatrixXd dense = to_dense(a);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(dense, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigen_decay: eigensolver failed");
    }
    std::vector<double> mags;
    mags.reserve(a.n_rows);
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const std::complex<double> lambda = solver.eigenvalues()[i];
        std::complex<double> sum = 0.0;
        std::complex<double> power = 1.0;
        for (std::size_t t = 1; t <= walk_length; ++t) {
            power *= lambda;
            sum += power;
        }
        mags.push_back(std::abs(sum / static_cast<double>(walk_length)));
    }
    std::sort(mags.begin(), mags.end(), std::greater<double>());
    return mags;
}

/// Text table: rank column plus one magnitude column per walk length.
inline std::string spectrum_table(const SparseMatrix& a,
                                  const std::vector<std::size_t>& walk_lengths,
                                  std::size_t top) {
    std::vector<std::vector<double>> columns;
    for (std::size_t t : walk_lengths) columns.push_back(eigen_decay(a, t));

    std::string out = "rank";
    for (std::size_t t : walk_lengths) out += "\tT=" + std::to_string(t);
    out += "\n";
    const std::size_t rows = std::min(top, static_cast<std::size_t>(a.n_rows));
    char buf[64];
    for (std::size_t r = 0; r < rows; ++r) {
        out += std::to_string(r + 1);
        for (const std::vector<double>& col : columns) {
            std::snprintf(buf, sizeof buf, "\t%.6f", col[r]);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

}  // namespace homf::tools
