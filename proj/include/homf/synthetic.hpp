#pragma once

// Synthetic instance generators: the planted-cluster bipartite dataset
// used to demonstrate the higher-order-walk benefit under sparsity, and
// random stochastic matrices for benchmarks.

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "homf/rng.hpp"
#include "homf/sparse.hpp"

namespace homf {

struct PlantedClusterSpec {
    std::size_t n_users = 400;
    std::size_t n_items = 1600;
    std::size_t n_clusters = 4;
    double observed_fraction = 0.01;  // of the full n_users x n_items grid
    double in_cluster_bias = 0.75;    // probability an observation stays in-cluster
    std::uint64_t seed = 0;
};

/// Bipartite ratings with planted co-cluster structure: users and items
/// are assigned to clusters round-robin; each observed cell lands inside
/// the user's cluster with probability `in_cluster_bias`, rating 5, and
/// otherwise on an item of a *different* cluster with rating drawn from
/// {1,...,4} — so relevance (rating 5) coincides exactly with cluster
/// membership and a perfect cluster ranker scores 1. Exactly
/// floor(observed_fraction * n_users * n_items) distinct cells are drawn.
inline std::vector<Triplet> planted_cluster_ratings(const PlantedClusterSpec& spec) {
    if (spec.n_clusters < 2 || spec.n_users < spec.n_clusters ||
        spec.n_items < spec.n_clusters) {
        throw std::invalid_argument("planted_cluster_ratings: need >= 2 clusters and "
                                    "at least one user/item per cluster");
    }
    if (!(spec.observed_fraction > 0.0 && spec.observed_fraction < 1.0)) {
        throw std::invalid_argument(
            "planted_cluster_ratings: observed_fraction must be in (0,1)");
    }
    const std::uint64_t total =
        static_cast<std::uint64_t>(spec.n_users) * spec.n_items;
    const std::size_t target = static_cast<std::size_t>(
        static_cast<double>(total) * spec.observed_fraction);
    if (target == 0) {
        throw std::invalid_argument("planted_cluster_ratings: zero observed cells");
    }

    // cluster(u) = u mod n_clusters, likewise for items.
    const std::size_t c = spec.n_clusters;
    Rng rng(spec.seed);
    std::unordered_set<std::uint64_t> used;
    used.reserve(target * 2);
    std::vector<Triplet> out;
    out.reserve(target);
    const std::size_t items_per_cluster = spec.n_items / c;  // floor; remainder spills
    while (out.size() < target) {
        const std::size_t u = static_cast<std::size_t>(rng.uniform_index(spec.n_users));
        const std::size_t cu = u % c;
        std::size_t item;
        double value;
        const auto pick_in_cluster = [&](std::size_t cluster) {
            const std::size_t span =
                items_per_cluster + (cluster < spec.n_items % c ? 1 : 0);
            const std::size_t j = static_cast<std::size_t>(rng.uniform_index(span));
            return cluster + j * c;
        };
        if (rng.uniform01() < spec.in_cluster_bias) {
            item = pick_in_cluster(cu);
            value = 5.0;
        } else {
            // Noise: an item of one of the other c-1 clusters.
            const std::size_t other =
                (cu + 1 + static_cast<std::size_t>(rng.uniform_index(c - 1))) % c;
            item = pick_in_cluster(other);
            value = 1.0 + static_cast<double>(rng.uniform_index(4));  // 1..4
        }
        const std::uint64_t key =
            static_cast<std::uint64_t>(u) * spec.n_items + item;
        if (!used.insert(key).second) continue;
        out.push_back({u, item, value});
    }
    return out;
}

/// Random row-stochastic matrix: `row_degree` distinct entries per row
/// with uniform positive weights, normalized to sum 1. Always nonempty
/// rows, so the result is a valid transition matrix.
inline SparseMatrix random_stochastic(std::size_t n, std::size_t row_degree,
                                      std::uint64_t seed) {
    if (row_degree < 1 || row_degree > n) {
        throw std::invalid_argument("random_stochastic: degree out of range");
    }
    Rng rng(seed);
    std::vector<Triplet> entries;
    entries.reserve(n * row_degree);
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < n; ++i) {
        cols.clear();
        std::unordered_set<std::size_t> picked;
        while (cols.size() < row_degree) {
            const std::size_t j = static_cast<std::size_t>(rng.uniform_index(n));
            if (picked.insert(j).second) cols.push_back(j);
        }
        double sum = 0.0;
        std::vector<double> w(row_degree);
        for (std::size_t t = 0; t < row_degree; ++t) {
            w[t] = rng.uniform01() + 1e-3;
            sum += w[t];
        }
        for (std::size_t t = 0; t < row_degree; ++t) {
            entries.push_back({i, cols[t], w[t] / sum});
        }
    }
    return from_triplets(entries, n, n);
}

/// Random bipartite rating triplets: `count` distinct uniformly random
/// cells of an m x n grid with ratings uniform in {1,...,5}.
inline std::vector<Triplet> random_ratings(std::size_t m, std::size_t n,
                                           std::size_t count, std::uint64_t seed) {
    const std::uint64_t total = static_cast<std::uint64_t>(m) * n;
    if (count == 0 || count > total) {
        throw std::invalid_argument("random_ratings: count out of range");
    }
    Rng rng(seed);
    std::unordered_set<std::uint64_t> used;
    used.reserve(count * 2);
    std::vector<Triplet> out;
    out.reserve(count);
    while (out.size() < count) {
        const std::uint64_t cell = rng.uniform_index(total);
        if (!used.insert(cell).second) continue;
        out.push_back({static_cast<std::size_t>(cell / n),
                       static_cast<std::size_t>(cell % n),
                       1.0 + static_cast<double>(rng.uniform_index(5))});
    }
    return out;
}

/// Write triplets as a tab-delimited ratings file (row, col, value per
/// line), usable by the dataset loader.
inline std::string ratings_to_tsv(const std::vector<Triplet>& triplets) {
    std::string out;
    char buf[96];
    for (const Triplet& t : triplets) {
        const int len = std::snprintf(buf, sizeof buf, "%zu\t%zu\t%.17g\n", t.row,
                                      t.col, t.value);
        out.append(buf, static_cast<std::size_t>(len));
    }
    return out;
}

}  // namespace homf
