#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "homf/sparse.hpp"
#include "oracles.hpp"

using homf::DenseVector;
using homf::SparseMatrix;
using homf::Triplet;

TEST_CASE("from_triplets lays out entries in canonical CSR") {
    const SparseMatrix m =
        homf::from_triplets({{0, 1, 2.0}, {1, 0, 3.0}}, 2, 2);
    REQUIRE(m.n_rows == 2);
    REQUIRE(m.n_cols == 2);
    REQUIRE(m.row_offsets == std::vector<std::size_t>{0, 1, 2});
    REQUIRE(m.col_indices == std::vector<std::size_t>{1, 0});
    REQUIRE(m.values == std::vector<double>{2.0, 3.0});
}

TEST_CASE("from_triplets sums duplicate cells") {
    const SparseMatrix m = homf::from_triplets({{0, 0, 1.0}, {0, 0, 2.0}}, 1, 1);
    REQUIRE(m.nnz() == 1);
    REQUIRE(m.values[0] == 3.0);
}

TEST_CASE("from_triplets rejects out-of-range and non-finite entries") {
    REQUIRE_THROWS_WITH(homf::from_triplets({{0, 2, 1.0}}, 1, 2),
                        Catch::Matchers::ContainsSubstring("column index 2 >= 2"));
    REQUIRE_THROWS_WITH(homf::from_triplets({{3, 0, 1.0}}, 2, 2),
                        Catch::Matchers::ContainsSubstring("row index 3 >= 2"));
    REQUIRE_THROWS(homf::from_triplets(
        {{0, 0, std::numeric_limits<double>::quiet_NaN()}}, 1, 1));
}

TEST_CASE("from_triplets round-trips the summed entry set") {
    std::mt19937 gen(7);
    std::uniform_int_distribution<std::size_t> idx(0, 9);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    std::vector<Triplet> entries;
    for (int t = 0; t < 60; ++t) entries.push_back({idx(gen), idx(gen), val(gen)});

    const SparseMatrix m = homf::from_triplets(entries, 10, 10);
    const std::vector<Triplet> round = homf::to_triplets(m);
    const SparseMatrix again = homf::from_triplets(round, 10, 10);
    REQUIRE(again.row_offsets == m.row_offsets);
    REQUIRE(again.col_indices == m.col_indices);
    REQUIRE(again.values == m.values);
    for (std::size_t i = 0; i < 10; ++i) {
        const auto cols = m.row_cols(i);
        for (std::size_t p = 1; p < cols.size(); ++p) {
            REQUIRE(cols[p - 1] < cols[p]);  // strictly increasing per row
        }
    }
}

TEST_CASE("spmv matches hand-computed products") {
    const SparseMatrix swap = homf::from_triplets({{0, 1, 1.0}, {1, 0, 1.0}}, 2, 2);
    REQUIRE(homf::spmv(swap, {3.0, 5.0}) == DenseVector{5.0, 3.0});

    const SparseMatrix eye =
        homf::from_triplets({{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}}, 3, 3);
    REQUIRE(homf::spmv(eye, {1.0, 2.0, 3.0}) == DenseVector{1.0, 2.0, 3.0});

    const SparseMatrix upper =
        homf::from_triplets({{0, 0, 0.5}, {0, 1, 0.5}, {1, 1, 1.0}}, 2, 2);
    REQUIRE(homf::spmv(upper, {2.0, 4.0}) == DenseVector{3.0, 4.0});

    REQUIRE_THROWS_AS(homf::spmv(swap, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("spmv_transpose matches hand products, symmetry, and a dense oracle") {
    const SparseMatrix single = homf::from_triplets({{0, 1, 1.0}}, 2, 2);
    REQUIRE(homf::spmv_transpose(single, {1.0, 1.0}) == DenseVector{0.0, 1.0});

    const SparseMatrix symmetric = homf::from_triplets(
        {{0, 1, 2.0}, {1, 0, 2.0}, {0, 0, 1.0}, {1, 1, 3.0}}, 2, 2);
    const DenseVector x{0.3, 0.7};
    REQUIRE(homf::spmv_transpose(symmetric, x) == homf::spmv(symmetric, x));

    std::mt19937 gen(11);
    std::uniform_real_distribution<double> val(0.0, 1.0);
    std::vector<Triplet> entries;
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            if (val(gen) < 0.5) entries.push_back({i, j, val(gen)});
        }
    }
    const SparseMatrix a = homf::from_triplets(entries, 5, 4);
    const Eigen::MatrixXd dense = oracle::to_dense(a);
    DenseVector y(5);
    for (double& v : y) v = val(gen);
    const DenseVector got = homf::spmv_transpose(a, y);
    const Eigen::VectorXd want =
        dense.transpose() * Eigen::Map<const Eigen::VectorXd>(y.data(), 5);
    for (std::size_t j = 0; j < 4; ++j) {
        REQUIRE(std::abs(got[j] - want[static_cast<Eigen::Index>(j)]) < 1e-12);
    }

    REQUIRE_THROWS_AS(homf::spmv_transpose(a, {1.0}), std::invalid_argument);
}

TEST_CASE("transpose-matvec equals matvec over the materialized transpose bitwise") {
    for (std::uint32_t seed : {1u, 2u, 3u, 4u, 5u}) {
        const SparseMatrix a = oracle::random_stochastic(40, 0.15, seed);
        std::mt19937 gen(seed + 100);
        std::uniform_real_distribution<double> val(-1.0, 1.0);
        DenseVector x(40);
        for (double& v : x) v = val(gen);

        const DenseVector scatter = homf::spmv_transpose(a, x);
        const DenseVector gather = homf::spmv(homf::transpose(a), x);
        REQUIRE(scatter == gather);  // bitwise, not just approximate
    }
}

TEST_CASE("row_normalize divides rows and self-loops dangling nodes") {
    const SparseMatrix g = homf::from_triplets(
        {{0, 0, 2.0}, {0, 1, 2.0}, {1, 1, 4.0}}, 2, 2);
    const SparseMatrix a = homf::row_normalize(g);
    REQUIRE(homf::to_triplets(a).size() == 3);
    REQUIRE(a.values == std::vector<double>{0.5, 0.5, 1.0});

    const SparseMatrix dangling =
        homf::row_normalize(homf::from_triplets({{1, 0, 1.0}, {1, 1, 1.0}}, 2, 2));
    const std::vector<Triplet> entries = homf::to_triplets(dangling);
    REQUIRE(entries.size() == 3);
    REQUIRE(entries[0].row == 0);
    REQUIRE(entries[0].col == 0);
    REQUIRE(entries[0].value == 1.0);
    REQUIRE(entries[1].value == 0.5);
    REQUIRE(entries[2].value == 0.5);

    REQUIRE_THROWS_WITH(
        homf::row_normalize(homf::from_triplets({{0, 0, -1.0}}, 1, 1)),
        Catch::Matchers::ContainsSubstring("non-negative"));
}

TEST_CASE("row_normalize reproduces the two-user/two-item worked example") {
    // Ratings R = [[2,4],[.,3]] exponentially weighted into the joint
    // 4-node adjacency, then normalized.
    const double e2 = std::exp(2.0), e3 = std::exp(3.0), e4 = std::exp(4.0);
    const SparseMatrix g = homf::from_triplets(
        {{0, 2, e2}, {0, 3, e4}, {1, 3, e3}, {2, 0, e2}, {3, 0, e4}, {3, 1, e3}}, 4,
        4);
    const SparseMatrix a = homf::row_normalize(g);

    auto entry = [&](std::size_t i, std::size_t j) {
        const auto cols = a.row_cols(i);
        const auto vals = a.row_values(i);
        for (std::size_t p = 0; p < cols.size(); ++p) {
            if (cols[p] == j) return vals[p];
        }
        return 0.0;
    };
    REQUIRE(entry(0, 2) == Catch::Approx(e2 / (e2 + e4)).margin(1e-12));
    REQUIRE(entry(0, 3) == Catch::Approx(e4 / (e2 + e4)).margin(1e-12));
    REQUIRE(entry(1, 3) == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(entry(2, 0) == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(entry(3, 0) == Catch::Approx(e4 / (e3 + e4)).margin(1e-12));
    REQUIRE(entry(3, 1) == Catch::Approx(e3 / (e3 + e4)).margin(1e-12));
}

TEST_CASE("row_normalize output rows sum to one") {
    for (std::uint32_t seed : {10u, 20u, 30u}) {
        const SparseMatrix a = oracle::random_stochastic(60, 0.1, seed);
        for (std::size_t i = 0; i < a.n_rows; ++i) {
            double s = 0.0;
            for (double v : a.row_values(i)) s += v;
            REQUIRE(s == Catch::Approx(1.0).margin(1e-12));
        }
    }
}

TEST_CASE("spectral norm of a row-stochastic matrix is at least one") {
    // Power iteration on A^T A; the top singular value of a stochastic
    // matrix is >= 1 because A maps the all-ones vector to itself.
    const SparseMatrix a = oracle::random_stochastic(80, 0.08, 42);
    DenseVector v(a.n_rows, 1.0);
    double sigma2 = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        DenseVector w = homf::spmv_transpose(a, homf::spmv(a, v));
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        REQUIRE(norm > 0.0);
        for (double& x : w) x /= norm;
        sigma2 = norm;
        v = std::move(w);
    }
    REQUIRE(std::sqrt(sigma2) >= 1.0 - 1e-9);
}
