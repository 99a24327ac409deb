#pragma once

// Independent reference implementations used to cross-check the library:
// dense matrix-power walk averages, a direct dense ridge solve, clean-room
// ranking metrics, and brute-force neighbor scans. These deliberately use
// Eigen and different algorithms/generators from the library so agreement
// is meaningful.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "homf/dense.hpp"
#include "homf/metrics.hpp"
#include "homf/sparse.hpp"

namespace oracle {

inline Eigen::MatrixXd to_dense(const homf::SparseMatrix& a) {
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

/// Dense (A + A^2 + ... + A^T)/T by explicit matrix powers.
inline Eigen::MatrixXd dense_walk_average(const Eigen::MatrixXd& a, std::size_t t_max) {
    Eigen::MatrixXd power = a;
    Eigen::MatrixXd sum = a;
    for (std::size_t t = 2; t <= t_max; ++t) {
        power = power * a;
        sum += power;
    }
    return sum / static_cast<double>(t_max);
}

/// Direct dense solve of (X^T X + lambda I) v = X^T y.
inline Eigen::VectorXd dense_ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                   double lambda) {
    const Eigen::MatrixXd h =
        x.transpose() * x +
        lambda * Eigen::MatrixXd::Identity(x.cols(), x.cols());
    return h.ldlt().solve(x.transpose() * y);
}

/// Eq.-style global objective against a dense target with observed-set
/// projection: 1/2 sum over nonzero target cells of squared error, plus
/// (lambda/2) times the squared factor norms.
inline double dense_objective(const Eigen::MatrixXd& target, const Eigen::MatrixXd& u,
                              const Eigen::MatrixXd& v, double lambda) {
    double data = 0.0;
    for (Eigen::Index i = 0; i < target.rows(); ++i) {
        for (Eigen::Index j = 0; j < target.cols(); ++j) {
            if (target(i, j) == 0.0) continue;
            const double d = target(i, j) - u.row(i).dot(v.row(j));
            data += d * d;
        }
    }
    return 0.5 * data + 0.5 * lambda * (u.squaredNorm() + v.squaredNorm());
}

inline Eigen::MatrixXd factor_to_eigen(const homf::DenseMatrix& m) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(m.rows),
                        static_cast<Eigen::Index>(m.cols));
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m.at(i, j);
        }
    }
    return out;
}

/// Random row-stochastic matrix built with std::mt19937 (independent of
/// the library's generator): about `density` of each row is filled, at
/// least one entry per row.
inline homf::SparseMatrix random_stochastic(std::size_t n, double density,
                                            std::uint32_t seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    std::uniform_int_distribution<std::size_t> col(0, n - 1);
    std::vector<homf::Triplet> entries;
    for (std::size_t i = 0; i < n; ++i) {
        std::set<std::size_t> cols;
        const std::size_t want = std::max<std::size_t>(
            1, static_cast<std::size_t>(density * static_cast<double>(n)));
        while (cols.size() < want) cols.insert(col(gen));
        double sum = 0.0;
        std::vector<std::pair<std::size_t, double>> row;
        for (std::size_t j : cols) {
            const double w = unit(gen);
            row.emplace_back(j, w);
            sum += w;
        }
        for (const auto& [j, w] : row) entries.push_back({i, j, w / sum});
    }
    return homf::from_triplets(entries, n, n);
}

// ---------------------------------------------------------------------
// Clean-room metrics. Written against the same conventions (score
// descending, ties by ascending item index, gain 2^rel - 1, discount
// log2(rank+1), AP normalized by min(#relevant, K)) but with different
// mechanics: explicit pair objects, selection by std::stable_sort over
// pairs, and AUC by O(n^2) pair enumeration.
// ---------------------------------------------------------------------

struct RankedItem {
    std::size_t item;
    int relevant;
    double score;
};

inline std::vector<RankedItem> ranked(const homf::UserTestSet& u) {
    std::vector<RankedItem> items;
    for (std::size_t i = 0; i < u.items.size(); ++i) {
        items.push_back({u.items[i], u.relevance[i], u.scores[i]});
    }
    std::stable_sort(items.begin(), items.end(),
                     [](const RankedItem& a, const RankedItem& b) {
                         if (a.score != b.score) return a.score > b.score;
                         return a.item < b.item;
                     });
    return items;
}

inline double precision_at_k(const homf::UserTestSet& u, std::size_t k) {
    const auto items = ranked(u);
    double hits = 0;
    for (std::size_t j = 0; j < std::min(k, items.size()); ++j) {
        hits += items[j].relevant ? 1.0 : 0.0;
    }
    return hits / static_cast<double>(k);
}

inline double recall_at_k(const homf::UserTestSet& u, std::size_t k) {
    const auto items = ranked(u);
    double total = 0, hits = 0;
    for (const auto& it : items) total += it.relevant ? 1.0 : 0.0;
    for (std::size_t j = 0; j < std::min(k, items.size()); ++j) {
        hits += items[j].relevant ? 1.0 : 0.0;
    }
    return hits / total;
}

inline double ap_at_k(const homf::UserTestSet& u, std::size_t k) {
    const auto items = ranked(u);
    std::size_t total = 0;
    for (const auto& it : items) total += it.relevant ? 1 : 0;
    double sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t j = 0; j < std::min(k, items.size()); ++j) {
        if (items[j].relevant) {
            ++seen;
            sum += static_cast<double>(seen) / static_cast<double>(j + 1);
        }
    }
    return sum / static_cast<double>(std::min<std::size_t>(total, k));
}

inline double ndcg_at_k(const homf::UserTestSet& u, std::size_t k) {
    const auto items = ranked(u);
    double dcg = 0.0;
    for (std::size_t j = 0; j < std::min(k, items.size()); ++j) {
        dcg += (std::pow(2.0, items[j].relevant) - 1.0) /
               (std::log(static_cast<double>(j + 2)) / std::log(2.0));
    }
    std::vector<int> rel = u.relevance;
    std::sort(rel.rbegin(), rel.rend());
    double idcg = 0.0;
    for (std::size_t j = 0; j < std::min(k, rel.size()); ++j) {
        idcg += (std::pow(2.0, rel[j]) - 1.0) /
                (std::log(static_cast<double>(j + 2)) / std::log(2.0));
    }
    return dcg / idcg;
}

/// AUC by brute-force pair enumeration with half-credit ties.
inline double auc_pairs(const std::vector<double>& scores,
                        const std::vector<int>& labels) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!labels[i]) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j]) continue;
            ++pairs;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    if (pairs == 0) throw std::invalid_argument("auc_pairs: need both classes");
    return wins / static_cast<double>(pairs);
}

/// Brute-force nearest-neighbor scan over embedding rows.
inline std::vector<std::pair<std::size_t, double>> neighbors_scan(
    const homf::DenseMatrix& u, std::size_t node, std::size_t count, std::size_t lo,
    std::size_t hi) {
    std::vector<std::pair<std::size_t, double>> all;
    for (std::size_t i = lo; i < hi; ++i) {
        if (i == node) continue;
        double d2 = 0.0;
        for (std::size_t c = 0; c < u.cols; ++c) {
            const double d = u.at(i, c) - u.at(node, c);
            d2 += d * d;
        }
        all.emplace_back(i, std::sqrt(d2));
    }
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return a.first < b.first;
    });
    if (all.size() > count) all.resize(count);
    return all;
}

}  // namespace oracle
