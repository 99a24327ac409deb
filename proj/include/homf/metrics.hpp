#pragma once

// Ranking and classification metrics averaged over users: Precision@K,
// Recall@K, MAP@K, NDCG@K, and Mann-Whitney AUC. All functions are pure.
//
// Conventions (applied uniformly):
//   - Items are ranked by score descending; ties break by ascending item
//     index, so results are independent of input order.
//   - Users with zero relevant test items are skipped from averaging and
//     counted in the report.
//   - NDCG uses gain 2^rel - 1 and discount log2(j+1) at 1-based rank j,
//     with the ideal ranking truncated at K.
//   - AP@K accumulates precision at the ranks that hold relevant items and
//     divides by min(#relevant, K), keeping AP@K <= 1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace homf {

struct UserTestSet {
    std::size_t user = 0;
    std::vector<std::size_t> items;
    std::vector<int> relevance;  // binary ground-truth flags
    std::vector<double> scores;  // predicted
};

struct MetricReport {
    std::vector<std::size_t> ks;
    // "precision@5" -> 0.4, "map@10" -> ..., "auc" -> ...; all in [0,1].
    std::map<std::string, double> values;
    std::size_t users_evaluated = 0;
    std::size_t users_skipped = 0;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string dataset_id;
};

namespace detail {

inline void validate_user(const UserTestSet& u) {
    if (u.items.empty() || u.items.size() != u.relevance.size() ||
        u.items.size() != u.scores.size()) {
        throw std::invalid_argument(
            "user test set needs equal-length, non-empty items/relevance/scores");
    }
}

/// Positions into u.items sorted by score descending, ties by ascending
/// item index.
inline std::vector<std::size_t> ranked_positions(const UserTestSet& u) {
    std::vector<std::size_t> order(u.items.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (u.scores[a] != u.scores[b]) return u.scores[a] > u.scores[b];
        return u.items[a] < u.items[b];
    });
    return order;
}

inline std::size_t relevant_count(const UserTestSet& u) {
    std::size_t c = 0;
    for (int r : u.relevance) c += r != 0 ? 1 : 0;
    return c;
}

}  // namespace detail

/// (precision, recall) at K: relevant hits in the top K over K, and over
/// the user's total relevant count.
inline std::pair<double, double> precision_recall_at_k(const UserTestSet& u,
                                                       std::size_t k) {
    detail::validate_user(u);
    if (k < 1) throw std::invalid_argument("precision_recall_at_k: K must be >= 1");
    const std::size_t total_relevant = detail::relevant_count(u);
    if (total_relevant == 0) {
        throw std::invalid_argument("precision_recall_at_k: user has no relevant items");
    }
    const std::vector<std::size_t> order = detail::ranked_positions(u);
    std::size_t hits = 0;
    const std::size_t depth = std::min(k, order.size());
    for (std::size_t j = 0; j < depth; ++j) {
        hits += u.relevance[order[j]] != 0 ? 1 : 0;
    }
    return {static_cast<double>(hits) / static_cast<double>(k),
            static_cast<double>(hits) / static_cast<double>(total_relevant)};
}

/// AP@K: mean of precision at relevant ranks within the top K, normalized
/// by min(#relevant, K).
inline double average_precision_at_k(const UserTestSet& u, std::size_t k) {
    detail::validate_user(u);
    if (k < 1) throw std::invalid_argument("average_precision_at_k: K must be >= 1");
    const std::size_t total_relevant = detail::relevant_count(u);
    if (total_relevant == 0) {
        throw std::invalid_argument("average_precision_at_k: user has no relevant items");
    }
    const std::vector<std::size_t> order = detail::ranked_positions(u);
    const std::size_t depth = std::min(k, order.size());
    std::size_t hits = 0;
    double sum = 0.0;
    for (std::size_t j = 0; j < depth; ++j) {
        if (u.relevance[order[j]] != 0) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(j + 1);
        }
    }
    return sum / static_cast<double>(std::min(total_relevant, k));
}

/// NDCG@K with gain 2^rel - 1 and discount log2(j+1) at 1-based rank j.
/// The ideal ranking reorders the same item set and is truncated at K.
inline double ndcg_at_k(const UserTestSet& u, std::size_t k) {
    detail::validate_user(u);
    if (k < 1) throw std::invalid_argument("ndcg_at_k: K must be >= 1");
    if (detail::relevant_count(u) == 0) {
        throw std::invalid_argument("ndcg_at_k: user has no relevant items");
    }
    const std::vector<std::size_t> order = detail::ranked_positions(u);
    const std::size_t depth = std::min(k, order.size());

    auto gain = [](int rel) { return std::exp2(static_cast<double>(rel)) - 1.0; };
    auto discount = [](std::size_t rank1) {
        return std::log2(static_cast<double>(rank1) + 1.0);
    };

    double dcg = 0.0;
    for (std::size_t j = 0; j < depth; ++j) {
        dcg += gain(u.relevance[order[j]]) / discount(j + 1);
    }

    std::vector<int> ideal = u.relevance;
    std::sort(ideal.begin(), ideal.end(), std::greater<int>());
    double idcg = 0.0;
    for (std::size_t j = 0; j < std::min(k, ideal.size()); ++j) {
        idcg += gain(ideal[j]) / discount(j + 1);
    }
    return dcg / idcg;
}

/// Mann-Whitney AUC: probability that a random positive outscores a random
/// negative, ties counted one half (midrank form).
inline double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty()) {
        throw std::invalid_argument("auc: scores and labels must match and be non-empty");
    }
    std::size_t positives = 0;
    for (int l : labels) positives += l != 0 ? 1 : 0;
    const std::size_t negatives = labels.size() - positives;
    if (positives == 0 || negatives == 0) {
        throw std::invalid_argument("auc: need at least one positive and one negative");
    }

    // Midranks: sort by score, average ranks within tie groups, sum the
    // positive ranks.
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] < scores[b];
    });
    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
        for (std::size_t t = i; t < j; ++t) {
            if (labels[order[t]] != 0) positive_rank_sum += midrank;
        }
        i = j;
    }
    const double np = static_cast<double>(positives);
    const double nn = static_cast<double>(negatives);
    return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

/// Unweighted mean of the per-user ranking metrics over users with at
/// least one relevant item, for every K in `ks`. Users without relevant
/// items are skipped and counted.
inline MetricReport aggregate(const std::vector<UserTestSet>& users,
                              const std::vector<std::size_t>& ks) {
    if (ks.empty()) throw std::invalid_argument("aggregate: no K values");
    MetricReport report;
    report.ks = ks;

    std::vector<const UserTestSet*> kept;
    for (const UserTestSet& u : users) {
        detail::validate_user(u);
        if (detail::relevant_count(u) == 0) {
            ++report.users_skipped;
        } else {
            kept.push_back(&u);
        }
    }
    if (kept.empty()) {
        throw std::invalid_argument("aggregate: every user was skipped");
    }
    report.users_evaluated = kept.size();

    const double denom = static_cast<double>(kept.size());
    for (std::size_t k : ks) {
        double precision = 0.0, recall = 0.0, map = 0.0, ndcg = 0.0;
        for (const UserTestSet* u : kept) {
            const auto [p, r] = precision_recall_at_k(*u, k);
            precision += p;
            recall += r;
            map += average_precision_at_k(*u, k);
            ndcg += ndcg_at_k(*u, k);
        }
        const std::string suffix = "@" + std::to_string(k);
        report.values["precision" + suffix] = precision / denom;
        report.values["recall" + suffix] = recall / denom;
        report.values["map" + suffix] = map / denom;
        report.values["ndcg" + suffix] = ndcg / denom;
    }
    return report;
}

namespace detail {

inline std::string format_double(double x) {
    char buf[64];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf, static_cast<std::size_t>(len));
}

}  // namespace detail

/// Structured text: one metric per line as "name<TAB>K<TAB>value" ("-" for
/// metrics without a K), then evaluation counts and run metadata.
inline std::string report_to_text(const MetricReport& report) {
    std::string out;
    for (const auto& [name, value] : report.values) {
        const std::size_t at = name.find('@');
        const std::string metric = at == std::string::npos ? name : name.substr(0, at);
        const std::string k = at == std::string::npos ? "-" : name.substr(at + 1);
        out += metric + "\t" + k + "\t" + detail::format_double(value) + "\n";
    }
    out += "users_evaluated\t-\t" + std::to_string(report.users_evaluated) + "\n";
    out += "users_skipped\t-\t" + std::to_string(report.users_skipped) + "\n";
    if (!report.config_hash.empty()) {
        out += "config_hash\t-\t" + report.config_hash + "\n";
    }
    if (!report.dataset_id.empty()) {
        out += "dataset_id\t-\t" + report.dataset_id + "\n";
    }
    out += "seed\t-\t" + std::to_string(report.seed) + "\n";
    return out;
}

/// Machine-readable flat JSON object with the same content.
inline std::string report_to_json(const MetricReport& report) {
    std::string out = "{\n";
    for (const auto& [name, value] : report.values) {
        out += "  \"" + name + "\": " + detail::format_double(value) + ",\n";
    }
    out += "  \"users_evaluated\": " + std::to_string(report.users_evaluated) + ",\n";
    out += "  \"users_skipped\": " + std::to_string(report.users_skipped) + ",\n";
    out += "  \"config_hash\": \"" + report.config_hash + "\",\n";
    out += "  \"dataset_id\": \"" + report.dataset_id + "\",\n";
    out += "  \"seed\": " + std::to_string(report.seed) + "\n";
    out += "}\n";
    return out;
}

}  // namespace homf
