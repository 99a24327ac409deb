#pragma once

// Dataset ingestion and preparation: delimited ratings files, edge-list
// side graphs, seeded train/validation/test splits, and negative-cell
// sampling for binary data.
//
// External entity ids are kept as strings and mapped to dense indices in
// first-appearance order; all library-internal structures use the dense
// indices, and reports translate back through the id maps.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "homf/rng.hpp"
#include "homf/sparse.hpp"

namespace homf {

enum class ValueKind { star, binary };

enum class RatingsFormat { double_colon, tab, comma };

inline RatingsFormat parse_ratings_format(const std::string& name) {
    if (name == "double-colon" || name == "::") return RatingsFormat::double_colon;
    if (name == "tab") return RatingsFormat::tab;
    if (name == "comma" || name == "csv") return RatingsFormat::comma;
    throw std::invalid_argument("unknown ratings format '" + name +
                                "' (expected double-colon, tab, or comma)");
}

struct RatingDataset {
    std::size_t m = 0;  // row entities (users)
    std::size_t n = 0;  // column entities (items)
    std::vector<Triplet> triplets;          // dense indices, duplicate-free
    std::vector<std::string> user_ids;      // dense index -> external id
    std::vector<std::string> item_ids;
    std::unordered_map<std::string, std::size_t> user_index;  // external -> dense
    std::unordered_map<std::string, std::size_t> item_index;
    ValueKind value_kind = ValueKind::star;
    std::size_t duplicate_count = 0;  // duplicate (row,col) pairs seen (last kept)
};

namespace detail {

inline void strip_carriage_return(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

inline std::vector<std::string> split_fields(const std::string& line,
                                             RatingsFormat format) {
    std::vector<std::string> fields;
    if (format == RatingsFormat::double_colon) {
        std::size_t pos = 0;
        while (true) {
            const std::size_t next = line.find("::", pos);
            if (next == std::string::npos) {
                fields.push_back(line.substr(pos));
                break;
            }
            fields.push_back(line.substr(pos, next - pos));
            pos = next + 2;
        }
    } else {
        const char delim = format == RatingsFormat::tab ? '\t' : ',';
        std::size_t pos = 0;
        while (true) {
            const std::size_t next = line.find(delim, pos);
            if (next == std::string::npos) {
                fields.push_back(line.substr(pos));
                break;
            }
            fields.push_back(line.substr(pos, next - pos));
            pos = next + 1;
        }
    }
    return fields;
}

inline double parse_value(const std::string& field, std::size_t line_no) {
    try {
        std::size_t consumed = 0;
        const double v = std::stod(field, &consumed);
        if (consumed != field.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("line " + std::to_string(line_no) +
                                 ": cannot parse value field '" + field + "'");
    }
}

}  // namespace detail

/// Parse a delimited ratings file: fields are (row entity, column entity,
/// value, [ignored...]). Duplicate pairs keep the last value and are
/// counted. Binary datasets store value 1 for every observed cell.
inline RatingDataset load_ratings(const std::string& path, RatingsFormat format,
                                  ValueKind value_kind) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open ratings file " + path);

    RatingDataset ds;
    ds.value_kind = value_kind;
    // (row, col) -> position in ds.triplets, for the keep-last rule.
    std::unordered_map<std::uint64_t, std::size_t> seen;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_carriage_return(line);
        if (line.empty()) continue;
        const std::vector<std::string> fields = detail::split_fields(line, format);
        if (fields.size() < 3 || fields[0].empty() || fields[1].empty()) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": expected at least 3 fields, got " +
                                     std::to_string(fields.size()));
        }
        const auto [uit, u_new] = ds.user_index.try_emplace(fields[0], ds.user_ids.size());
        if (u_new) ds.user_ids.push_back(fields[0]);
        const auto [iit, i_new] = ds.item_index.try_emplace(fields[1], ds.item_ids.size());
        if (i_new) ds.item_ids.push_back(fields[1]);

        double value = detail::parse_value(fields[2], line_no);
        if (value_kind == ValueKind::binary) value = 1.0;

        const std::uint64_t key =
            (static_cast<std::uint64_t>(uit->second) << 32) | iit->second;
        const auto [sit, fresh] = seen.try_emplace(key, ds.triplets.size());
        if (fresh) {
            ds.triplets.push_back({uit->second, iit->second, value});
        } else {
            ds.triplets[sit->second].value = value;
            ++ds.duplicate_count;
        }
    }
    if (ds.triplets.empty()) {
        throw std::runtime_error("ratings file " + path + " has no entries");
    }
    ds.m = ds.user_ids.size();
    ds.n = ds.item_ids.size();
    return ds;
}

struct GraphLoadResult {
    SparseMatrix matrix;               // n_entities x n_entities, symmetric
    std::size_t edges_ingested = 0;    // lines accepted (before symmetrizing)
    std::size_t unknown_id_skips = 0;  // endpoints missing from the id map
    std::size_t self_loops_dropped = 0;
};

/// Parse a whitespace-delimited edge list (2 or 3 fields; weight defaults
/// to 1). Endpoints resolve through `id_map`; unknown ids and self-loops
/// are skipped with counts. Duplicate undirected pairs keep the last
/// weight. The result contains each surviving edge in both directions.
inline GraphLoadResult load_graph(const std::string& path, std::size_t n_entities,
                                  const std::unordered_map<std::string, std::size_t>& id_map) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file " + path);

    GraphLoadResult result;
    std::unordered_map<std::uint64_t, double> pair_weight;  // canonical (lo,hi)
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        detail::strip_carriage_return(line);
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string a, b, w;
        ss >> a >> b;
        if (a.empty() || b.empty()) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": expected 2 or 3 whitespace-separated fields");
        }
        double weight = 1.0;
        if (ss >> w) weight = detail::parse_value(w, line_no);
        std::string extra;
        if (ss >> extra) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": expected 2 or 3 whitespace-separated fields");
        }
        const auto ait = id_map.find(a);
        const auto bit = id_map.find(b);
        if (ait == id_map.end() || bit == id_map.end()) {
            ++result.unknown_id_skips;
            continue;
        }
        if (ait->second == bit->second) {
            ++result.self_loops_dropped;
            continue;
        }
        ++result.edges_ingested;
        const std::size_t lo = std::min(ait->second, bit->second);
        const std::size_t hi = std::max(ait->second, bit->second);
        pair_weight[(static_cast<std::uint64_t>(lo) << 32) | hi] = weight;
    }

    std::vector<Triplet> entries;
    entries.reserve(2 * pair_weight.size());
    for (const auto& [key, weight] : pair_weight) {
        const std::size_t lo = static_cast<std::size_t>(key >> 32);
        const std::size_t hi = static_cast<std::size_t>(key & 0xffffffffULL);
        entries.push_back({lo, hi, weight});
        entries.push_back({hi, lo, weight});
    }
    result.matrix = from_triplets(entries, n_entities, n_entities);
    return result;
}

struct SplitSpec {
    double train_fraction = 0.8;       // of all entries (test gets the rest)
    double validation_fraction = 0.2;  // of the train pool
    std::uint64_t seed = 0;
};

struct SplitResult {
    std::vector<Triplet> train;
    std::vector<Triplet> validation;
    std::vector<Triplet> test;
};

/// Entry-wise random partition by seeded shuffle. Test size is
/// floor(N * (1 - train_fraction)); validation is floor of the remaining
/// pool times validation_fraction. Partitions are returned in the
/// dataset's original entry order.
inline SplitResult split(const RatingDataset& ds, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction <= 1.0)) {
        throw std::invalid_argument("split: train_fraction must be in (0, 1]");
    }
    if (!(spec.validation_fraction >= 0.0 && spec.validation_fraction < 1.0)) {
        throw std::invalid_argument("split: validation_fraction must be in [0, 1)");
    }
    const std::size_t total = ds.triplets.size();
    std::vector<std::size_t> order(total);
    for (std::size_t i = 0; i < total; ++i) order[i] = i;
    Rng rng(spec.seed);
    rng.shuffle(order);

    // floor(count * fraction), nudged so fractions like 1 - 0.8 (slightly
    // below 0.2 in binary) still floor to the intended integer.
    const auto floor_fraction = [](std::size_t count, double fraction) {
        const double raw = static_cast<double>(count) * fraction + 1e-9;
        return std::min(count, static_cast<std::size_t>(raw));
    };
    const std::size_t n_test = floor_fraction(total, 1.0 - spec.train_fraction);
    const std::size_t pool = total - n_test;
    const std::size_t n_validation = floor_fraction(pool, spec.validation_fraction);

    std::vector<std::size_t> test_idx(order.begin(), order.begin() + n_test);
    std::vector<std::size_t> val_idx(order.begin() + n_test,
                                     order.begin() + n_test + n_validation);
    std::vector<std::size_t> train_idx(order.begin() + n_test + n_validation,
                                       order.end());
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(val_idx.begin(), val_idx.end());
    std::sort(train_idx.begin(), train_idx.end());

    SplitResult result;
    result.test.reserve(n_test);
    result.validation.reserve(n_validation);
    result.train.reserve(train_idx.size());
    for (std::size_t i : train_idx) result.train.push_back(ds.triplets[i]);
    for (std::size_t i : val_idx) result.validation.push_back(ds.triplets[i]);
    for (std::size_t i : test_idx) result.test.push_back(ds.triplets[i]);
    return result;
}

/// Draw `count` distinct unobserved cells of an m x n grid uniformly,
/// avoiding `exclude` (cells encoded row * n + col). Falls back from
/// rejection sampling to explicit enumeration when the free-cell pool is
/// tight. Returned cells are sorted by (row, col).
inline std::vector<std::pair<std::size_t, std::size_t>> sample_negative_cells(
    std::size_t m, std::size_t n, const std::unordered_set<std::uint64_t>& exclude,
    std::size_t count, std::uint64_t seed) {
    const std::uint64_t total = static_cast<std::uint64_t>(m) * n;
    if (exclude.size() > total) {
        throw std::invalid_argument("sample_negative_cells: exclusion set exceeds grid");
    }
    const std::uint64_t free_cells = total - exclude.size();
    if (count > free_cells) {
        throw std::invalid_argument(
            "sample_negative_cells: requested " + std::to_string(count) +
            " negatives but only " + std::to_string(free_cells) + " cells are free");
    }

    std::vector<std::uint64_t> chosen;
    chosen.reserve(count);
    Rng rng(seed);
    if (3 * static_cast<std::uint64_t>(count) >= free_cells) {
        // Dense regime: enumerate the free cells and take a random prefix.
        std::vector<std::uint64_t> free_list;
        free_list.reserve(free_cells);
        for (std::uint64_t cell = 0; cell < total; ++cell) {
            if (!exclude.contains(cell)) free_list.push_back(cell);
        }
        rng.shuffle(free_list);
        chosen.assign(free_list.begin(), free_list.begin() + count);
    } else {
        std::unordered_set<std::uint64_t> picked;
        picked.reserve(count * 2);
        while (chosen.size() < count) {
            const std::uint64_t cell = rng.uniform_index(total);
            if (exclude.contains(cell) || !picked.insert(cell).second) continue;
            chosen.push_back(cell);
        }
    }
    std::sort(chosen.begin(), chosen.end());
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    cells.reserve(count);
    for (std::uint64_t cell : chosen) {
        cells.emplace_back(static_cast<std::size_t>(cell / n),
                           static_cast<std::size_t>(cell % n));
    }
    return cells;
}

/// Augment a binary dataset with one sampled zero-labeled cell per
/// observed positive, excluding every positive in `ds`.
inline std::vector<Triplet> negative_sample(const RatingDataset& ds,
                                            std::uint64_t seed) {
    if (ds.value_kind != ValueKind::binary) {
        throw std::invalid_argument("negative_sample: dataset must be binary");
    }
    std::unordered_set<std::uint64_t> exclude;
    exclude.reserve(ds.triplets.size() * 2);
    for (const Triplet& t : ds.triplets) {
        exclude.insert(static_cast<std::uint64_t>(t.row) * ds.n + t.col);
    }
    const auto cells =
        sample_negative_cells(ds.m, ds.n, exclude, ds.triplets.size(), seed);
    std::vector<Triplet> negatives;
    negatives.reserve(cells.size());
    for (const auto& [row, col] : cells) {
        negatives.push_back({row, col, 0.0});
    }
    return negatives;
}

}  // namespace homf
