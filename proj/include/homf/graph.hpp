#pragma once

// Joint adjacency construction: the (m+n) x (m+n) block matrix
//
//     [ alpha*g1(Gr)        (1-alpha)*g2(R) ]
//     [ (1-alpha)*g2(R)^T   alpha*g3(Gc)    ]
//
// followed by row normalization into the transition matrix. Row entities
// occupy joint indices 0..m-1, column entities m..m+n-1.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "homf/sparse.hpp"

namespace homf {

enum class WeightKind { exponential, linear, step };

/// Non-negative monotone map from rating/edge weight to graph edge weight.
struct WeightFn {
    WeightKind kind = WeightKind::exponential;
    double linear_coeff = 1.0;

    double operator()(double x) const {
        switch (kind) {
            case WeightKind::exponential:
                if (std::abs(x) > 700.0) {
                    throw std::domain_error(
                        "exponential weight overflow: |" + std::to_string(x) +
                        "| > 700");
                }
                return std::exp(x);
            case WeightKind::linear:
                return linear_coeff * x;
            case WeightKind::step:
                return x > 0.0 ? 1.0 : 0.0;
        }
        return 0.0;
    }

    std::string name() const {
        switch (kind) {
            case WeightKind::exponential: return "exponential";
            case WeightKind::linear:
                return linear_coeff == 1.0 ? "linear"
                                           : "linear:" + std::to_string(linear_coeff);
            case WeightKind::step: return "step";
        }
        return "";
    }
};

/// Parses "exponential", "linear", "linear:<c>" or "step".
inline WeightFn parse_weight_fn(const std::string& text) {
    if (text == "exponential" || text == "exp") return {WeightKind::exponential, 1.0};
    if (text == "step") return {WeightKind::step, 1.0};
    if (text == "linear") return {WeightKind::linear, 1.0};
    if (text.rfind("linear:", 0) == 0) {
        const double c = std::stod(text.substr(7));
        if (c <= 0.0) {
            throw std::invalid_argument("linear weight constant must be positive: " + text);
        }
        return {WeightKind::linear, c};
    }
    throw std::invalid_argument("unknown weight function '" + text +
                                "' (want exponential, linear[:c] or step)");
}

/// Recipe for assembling the joint graph. alpha mixes side-information
/// edges (alpha) against rating edges (1-alpha); it must be 0 exactly when
/// no side graph is supplied and in (0,1) otherwise.
struct GraphSpec {
    std::size_t m = 0;  // row-entity count
    std::size_t n = 0;  // column-entity count
    double alpha = 0.0;
    WeightFn g1{};  // row side graph
    WeightFn g2{};  // ratings
    WeightFn g3{};  // column side graph; conventionally same as g1
};

namespace detail {

inline void check_symmetric(const SparseMatrix& g, const std::string& which) {
    const SparseMatrix t = transpose(g);
    if (t.row_offsets != g.row_offsets || t.col_indices != g.col_indices ||
        t.values != g.values) {
        throw std::invalid_argument(which + " side graph is not symmetric");
    }
}

}  // namespace detail

/// Assembles the joint adjacency. Weight functions act element-wise on
/// stored entries only; absent entries stay absent, and a stored entry
/// whose step weight is 0 is dropped (no edge).
inline SparseMatrix build_adjacency(const SparseMatrix& ratings,
                                    const SparseMatrix* row_graph,
                                    const SparseMatrix* col_graph,
                                    const GraphSpec& spec) {
    if (ratings.n_rows != spec.m || ratings.n_cols != spec.n) {
        throw std::invalid_argument("build_adjacency: rating matrix is " +
                                    std::to_string(ratings.n_rows) + "x" +
                                    std::to_string(ratings.n_cols) + ", spec says " +
                                    std::to_string(spec.m) + "x" + std::to_string(spec.n));
    }
    const bool has_side = (row_graph != nullptr) || (col_graph != nullptr);
    if (!has_side && spec.alpha != 0.0) {
        throw std::invalid_argument(
            "build_adjacency: alpha must be 0 without side graphs, got " +
            std::to_string(spec.alpha));
    }
    if (has_side && !(spec.alpha > 0.0 && spec.alpha < 1.0)) {
        throw std::invalid_argument(
            "build_adjacency: alpha must lie in (0,1) when side graphs are present, got " +
            std::to_string(spec.alpha));
    }
    if (row_graph) {
        if (row_graph->n_rows != spec.m || row_graph->n_cols != spec.m) {
            throw std::invalid_argument("build_adjacency: row side graph must be m x m");
        }
        detail::check_symmetric(*row_graph, "row");
    }
    if (col_graph) {
        if (col_graph->n_rows != spec.n || col_graph->n_cols != spec.n) {
            throw std::invalid_argument("build_adjacency: column side graph must be n x n");
        }
        detail::check_symmetric(*col_graph, "column");
    }

    const std::size_t total = spec.m + spec.n;
    std::vector<Triplet> entries;
    entries.reserve(2 * ratings.nnz() + (row_graph ? row_graph->nnz() : 0) +
                    (col_graph ? col_graph->nnz() : 0));

    const double rating_scale = has_side ? 1.0 - spec.alpha : 1.0;
    for (std::size_t i = 0; i < ratings.n_rows; ++i) {
        for (std::size_t p = ratings.row_offsets[i]; p < ratings.row_offsets[i + 1]; ++p) {
            const double w = spec.g2(ratings.values[p]);
            if (spec.g2.kind == WeightKind::step && w == 0.0) continue;
            const std::size_t j = spec.m + ratings.col_indices[p];
            entries.push_back({i, j, rating_scale * w});
            entries.push_back({j, i, rating_scale * w});
        }
    }
    if (row_graph) {
        for (std::size_t i = 0; i < row_graph->n_rows; ++i) {
            for (std::size_t p = row_graph->row_offsets[i];
                 p < row_graph->row_offsets[i + 1]; ++p) {
                const double w = spec.g1(row_graph->values[p]);
                if (spec.g1.kind == WeightKind::step && w == 0.0) continue;
                entries.push_back({i, row_graph->col_indices[p], spec.alpha * w});
            }
        }
    }
    if (col_graph) {
        for (std::size_t i = 0; i < col_graph->n_rows; ++i) {
            for (std::size_t p = col_graph->row_offsets[i];
                 p < col_graph->row_offsets[i + 1]; ++p) {
                const double w = spec.g3(col_graph->values[p]);
                if (spec.g3.kind == WeightKind::step && w == 0.0) continue;
                entries.push_back({spec.m + i, spec.m + col_graph->col_indices[p],
                                   spec.alpha * w});
            }
        }
    }
    return from_triplets(std::move(entries), total, total);
}

/// Row-normalized adjacency: the transition probability matrix.
inline SparseMatrix build_tpm(const SparseMatrix& ratings,
                              const SparseMatrix* row_graph,
                              const SparseMatrix* col_graph,
                              const GraphSpec& spec) {
    return row_normalize(build_adjacency(ratings, row_graph, col_graph, spec));
}

}  // namespace homf
