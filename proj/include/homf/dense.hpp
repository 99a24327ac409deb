#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace homf {

/// Row-major dense matrix; just enough for factor blocks and ridge
/// design matrices.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // rows * cols, row-major

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    const double* row(std::size_t i) const { return data.data() + i * cols; }
    double* row(std::size_t i) { return data.data() + i * cols; }
};

inline double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

inline double squared_norm(const std::vector<double>& v) {
    return dot(v.data(), v.data(), v.size());
}

inline double frobenius_squared(const DenseMatrix& m) {
    return dot(m.data.data(), m.data.data(), m.data.size());
}

}  // namespace homf
