#pragma once

// Experiment orchestration: load -> split -> build transition matrix ->
// fit -> score -> persist. Errors carry the stage that raised them
// ("stage graph: ..."), and all file writes are atomic
// (write-temp-then-rename). Identical config + seed produce byte-identical
// reports regardless of worker count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "homf/config.hpp"
#include "homf/dataset.hpp"
#include "homf/embedding_io.hpp"
#include "homf/factorize.hpp"
#include "homf/graph.hpp"
#include "homf/metrics.hpp"
#include "homf/parallel.hpp"
#include "homf/sparse.hpp"
#include "homf/synthetic.hpp"

namespace homf {

namespace detail {

template <typename F>
auto run_stage(const char* stage, F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        throw std::runtime_error("stage " + std::string(stage) + ": " + e.what());
    }
}

/// Positives of every split, encoded row * n + col, for negative-cell
/// exclusion.
inline std::unordered_set<std::uint64_t> all_positive_cells(const SplitResult& parts,
                                                            std::size_t n) {
    std::unordered_set<std::uint64_t> cells;
    cells.reserve(2 * (parts.train.size() + parts.validation.size() + parts.test.size()));
    for (const auto* part : {&parts.train, &parts.validation, &parts.test}) {
        for (const Triplet& t : *part) {
            cells.insert(static_cast<std::uint64_t>(t.row) * n + t.col);
        }
    }
    return cells;
}

}  // namespace detail

/// Per-user candidate lists for ranking metrics. Star data: the user's
/// eval entries, relevant iff value >= threshold. Binary data: the user's
/// eval positives plus their share of the sampled negatives (relevance 0).
/// Scores come from the fitted embeddings.
inline std::vector<UserTestSet> build_user_test_sets(
    const std::vector<Triplet>& eval_triplets, const EmbeddingPair& e,
    const ExperimentConfig& cfg,
    const std::vector<std::pair<std::size_t, std::size_t>>& negative_cells = {}) {
    std::unordered_map<std::size_t, UserTestSet> by_user;
    for (const Triplet& t : eval_triplets) {
        UserTestSet& u = by_user[t.row];
        u.user = t.row;
        u.items.push_back(t.col);
        const bool relevant = cfg.data.value_kind == ValueKind::binary
                                  ? true
                                  : t.value >= cfg.eval.relevance_threshold;
        u.relevance.push_back(relevant ? 1 : 0);
        u.scores.push_back(
            predict(e, t.row, t.col, cfg.fit.symmetrized_prediction));
    }
    for (const auto& [row, col] : negative_cells) {
        const auto it = by_user.find(row);
        if (it == by_user.end()) continue;  // user has no eval positives
        it->second.items.push_back(col);
        it->second.relevance.push_back(0);
        it->second.scores.push_back(
            predict(e, row, col, cfg.fit.symmetrized_prediction));
    }
    std::vector<std::size_t> users;
    users.reserve(by_user.size());
    for (const auto& [user, _] : by_user) users.push_back(user);
    std::sort(users.begin(), users.end());
    std::vector<UserTestSet> sets;
    sets.reserve(users.size());
    for (std::size_t user : users) sets.push_back(std::move(by_user[user]));
    return sets;
}

struct ExperimentArtifacts {
    MetricReport report;
    EmbeddingPair embeddings;
    ObjectiveTrace trace;
    RatingDataset dataset;       // id maps for external reporting
    SplitResult parts;
    std::vector<std::string> log_lines;
};

namespace detail {

struct PreparedData {
    RatingDataset ds;
    SplitResult parts;
    SparseMatrix row_graph;  // empty (0x0) when absent
    SparseMatrix col_graph;
    std::vector<std::string> log_lines;
};

inline PreparedData prepare_data(const ExperimentConfig& cfg) {
    PreparedData p;
    detail::run_stage("data", [&] {
        if (cfg.data.ratings.empty()) {
            throw std::invalid_argument("data.ratings path is required");
        }
        p.ds = load_ratings(cfg.data.ratings, cfg.data.format, cfg.data.value_kind);
        p.log_lines.push_back("ratings: " + cfg.data.ratings + " (" +
                              std::to_string(p.ds.m) + " x " + std::to_string(p.ds.n) +
                              ", " + std::to_string(p.ds.triplets.size()) + " entries, " +
                              std::to_string(p.ds.duplicate_count) +
                              " duplicates overwritten)");
        return 0;
    });
    detail::run_stage("split", [&] {
        p.parts = split(p.ds, cfg.split);
        p.log_lines.push_back("split: train " + std::to_string(p.parts.train.size()) +
                              " / validation " + std::to_string(p.parts.validation.size()) +
                              " / test " + std::to_string(p.parts.test.size()));
        return 0;
    });
    detail::run_stage("graph", [&] {
        if (!cfg.data.row_graph.empty()) {
            const GraphLoadResult g =
                load_graph(cfg.data.row_graph, p.ds.m, p.ds.user_index);
            p.row_graph = g.matrix;
            p.log_lines.push_back("row graph: " + std::to_string(g.edges_ingested) +
                                  " edges, " + std::to_string(g.unknown_id_skips) +
                                  " unknown-id skips, " +
                                  std::to_string(g.self_loops_dropped) +
                                  " self-loops dropped");
        }
        if (!cfg.data.col_graph.empty()) {
            const GraphLoadResult g =
                load_graph(cfg.data.col_graph, p.ds.n, p.ds.item_index);
            p.col_graph = g.matrix;
            p.log_lines.push_back("col graph: " + std::to_string(g.edges_ingested) +
                                  " edges, " + std::to_string(g.unknown_id_skips) +
                                  " unknown-id skips, " +
                                  std::to_string(g.self_loops_dropped) +
                                  " self-loops dropped");
        }
        return 0;
    });
    return p;
}

/// Transition matrix from a set of training edges under the configured
/// weights. Side graphs enter whole; ratings outside `train` never do.
inline SparseMatrix training_tpm(const PreparedData& p,
                                 const std::vector<Triplet>& train,
                                 const ExperimentConfig& cfg) {
    return detail::run_stage("graph", [&] {
        const SparseMatrix r = from_triplets(train, p.ds.m, p.ds.n);
        GraphSpec spec;
        spec.m = p.ds.m;
        spec.n = p.ds.n;
        spec.alpha = cfg.graph.alpha;
        spec.g1 = cfg.graph.row_graph_weight;
        spec.g2 = cfg.graph.rating_weight;
        spec.g3 = cfg.graph.col_graph_weight;
        const SparseMatrix* gr = p.row_graph.n_rows > 0 ? &p.row_graph : nullptr;
        const SparseMatrix* gc = p.col_graph.n_rows > 0 ? &p.col_graph : nullptr;
        return build_tpm(r, gr, gc, spec);
    });
}

/// Fit + score against `eval_triplets`. For binary data, draws
/// |train_size| negative cells (excluding every positive in any split)
/// with the given seed, pools them for AUC, and attaches per-user shares
/// to the candidate lists.
inline std::pair<MetricReport, std::pair<EmbeddingPair, ObjectiveTrace>> fit_and_score(
    const PreparedData& p, const std::vector<Triplet>& train,
    const std::vector<Triplet>& eval_triplets, const ExperimentConfig& cfg,
    std::uint64_t negative_seed) {
    const SparseMatrix a = training_tpm(p, train, cfg);

    FitConfig fit_cfg = cfg.fit;
    fit_cfg.workers = resolve_workers(cfg.fit.workers);
    auto fitted = detail::run_stage("fit", [&] { return fit(a, p.ds.m, p.ds.n, fit_cfg); });
    EmbeddingPair& e = fitted.first;

    MetricReport report = detail::run_stage("eval", [&] {
        std::vector<std::pair<std::size_t, std::size_t>> negatives;
        if (cfg.data.value_kind == ValueKind::binary) {
            negatives = sample_negative_cells(p.ds.m, p.ds.n,
                                              all_positive_cells(p.parts, p.ds.n),
                                              train.size(), negative_seed);
        }
        const std::vector<UserTestSet> sets =
            build_user_test_sets(eval_triplets, e, cfg, negatives);
        MetricReport r = aggregate(sets, cfg.eval.ks);
        if (cfg.data.value_kind == ValueKind::binary) {
            std::vector<double> scores;
            std::vector<int> labels;
            scores.reserve(eval_triplets.size() + negatives.size());
            for (const Triplet& t : eval_triplets) {
                scores.push_back(predict(e, t.row, t.col, cfg.fit.symmetrized_prediction));
                labels.push_back(1);
            }
            for (const auto& [row, col] : negatives) {
                scores.push_back(predict(e, row, col, cfg.fit.symmetrized_prediction));
                labels.push_back(0);
            }
            r.values["auc"] = auc(scores, labels);
        }
        r.config_hash = config_hash(cfg);
        r.seed = cfg.fit.seed;
        r.dataset_id = cfg.data.dataset_id;
        return r;
    });
    return {std::move(report), std::move(fitted)};
}

inline std::string trace_to_text(const ObjectiveTrace& trace, const std::string& hash,
                                 std::uint64_t seed) {
    std::string out = "# objective trace\nconfig_hash\t" + hash + "\nseed\t" +
                      std::to_string(seed) + "\n";
    for (std::size_t i = 0; i < trace.objective.size(); ++i) {
        out += "sweep\t" + std::to_string(i + 1) + "\t" +
               format_double(trace.objective[i]) + "\n";
    }
    out += "converged\t" + std::string(trace.converged ? "true" : "false") + "\n";
    out += "v_passes\t" + std::to_string(trace.v_passes) + "\n";
    out += "u_passes\t" + std::to_string(trace.u_passes) + "\n";
    return out;
}

inline std::string id_maps_to_text(const RatingDataset& ds) {
    std::string out = "# kind\texternal_id\tdense_index\n";
    for (std::size_t i = 0; i < ds.user_ids.size(); ++i) {
        out += "user\t" + ds.user_ids[i] + "\t" + std::to_string(i) + "\n";
    }
    for (std::size_t i = 0; i < ds.item_ids.size(); ++i) {
        out += "item\t" + ds.item_ids[i] + "\t" + std::to_string(i) + "\n";
    }
    return out;
}

inline void persist_artifacts(const ExperimentConfig& cfg, const ExperimentArtifacts& art) {
    namespace fs = std::filesystem;
    detail::run_stage("output", [&] {
        const fs::path dir(cfg.output.dir);
        fs::create_directories(dir);
        const std::string hash = config_hash(cfg);
        save_embeddings(dir / "embeddings.homf", art.embeddings);
        atomic_write_file(dir / "report.txt", report_to_text(art.report));
        atomic_write_file(dir / "report.json", report_to_json(art.report));
        atomic_write_file(dir / "trace.txt",
                          trace_to_text(art.trace, hash, cfg.fit.seed));
        atomic_write_file(dir / "id_maps.tsv", id_maps_to_text(art.dataset));
        std::string log = "# run log\nconfig_hash\t" + hash + "\nseed\t" +
                          std::to_string(cfg.fit.seed) + "\n";
        for (const std::string& line : art.log_lines) log += line + "\n";
        log += "# canonical config\n" + config_to_canonical_text(cfg);
        atomic_write_file(dir / "run.log", log);
        return 0;
    });
}

}  // namespace detail

/// End-to-end run: ingest, split, build the transition matrix from
/// training edges only, fit, score the test split, and persist report,
/// embeddings, trace, id maps, and run log under output.dir.
inline ExperimentArtifacts run_experiment(const ExperimentConfig& cfg,
                                          bool persist = true) {
    detail::PreparedData p = detail::prepare_data(cfg);
    auto [report, fitted] = detail::fit_and_score(p, p.parts.train, p.parts.test, cfg,
                                                  cfg.eval.negative_seed);
    ExperimentArtifacts art;
    art.report = std::move(report);
    art.embeddings = std::move(fitted.first);
    art.trace = std::move(fitted.second);
    art.dataset = std::move(p.ds);
    art.parts = std::move(p.parts);
    art.log_lines = std::move(p.log_lines);
    if (persist) detail::persist_artifacts(cfg, art);
    return art;
}

struct GridPoint {
    std::string rating_weight;
    double alpha = 0.0;
    std::size_t walk_length = 0;
    double lambda = 0.0;
    double validation_value = 0.0;
    bool converged = false;
    std::size_t sweeps = 0;
};

struct GridSearchResult {
    ExperimentConfig best;      // winning hyperparameters substituted in
    std::size_t best_index = 0;  // into `table`
    std::vector<GridPoint> table;
    MetricReport report;        // best point refit on train, scored on test
    ExperimentArtifacts artifacts;
};

inline std::string grid_table_csv(const std::vector<GridPoint>& table) {
    std::string out = "rating_weight,alpha,walk_length,lambda,validation_value,"
                      "converged,sweeps\n";
    for (const GridPoint& p : table) {
        out += p.rating_weight + "," + detail::format_double(p.alpha) + "," +
               std::to_string(p.walk_length) + "," + detail::format_double(p.lambda) +
               "," + detail::format_double(p.validation_value) + "," +
               (p.converged ? "true" : "false") + "," + std::to_string(p.sweeps) + "\n";
    }
    return out;
}

/// Exhaustive sweep over grid.{rating_weight, alpha, walk_length, lambda}.
/// Every point fits on the training split and is scored on the validation
/// split with grid.selection_metric; the winner (ties -> first in grid
/// order) is refit on the training split and scored on the test split
/// once. Without side graphs the alpha axis collapses to {0}.
inline GridSearchResult grid_search(const ExperimentConfig& base, bool persist = true) {
    detail::PreparedData p = detail::prepare_data(base);
    if (p.parts.validation.empty()) {
        throw std::runtime_error("stage grid: validation split is empty; raise "
                                 "split.validation_fraction");
    }
    const bool has_side = p.row_graph.n_rows > 0 || p.col_graph.n_rows > 0;
    const std::vector<double> alphas =
        has_side ? base.grid.alphas : std::vector<double>{0.0};

    GridSearchResult result;
    bool have_best = false;
    const std::uint64_t validation_negative_seed =
        base.eval.negative_seed ^ 0xa5a5a5a5a5a5a5a5ULL;

    for (const std::string& weight_name : base.grid.rating_weights) {
        for (double alpha : alphas) {
            for (std::size_t t : base.grid.walk_lengths) {
                for (double lambda : base.grid.lambdas) {
                    ExperimentConfig cfg = base;
                    cfg.graph.rating_weight = parse_weight_fn(weight_name);
                    cfg.graph.alpha = alpha;
                    cfg.fit.walk.walk_length = t;
                    cfg.fit.lambda = lambda;
                    auto [report, fitted] = detail::fit_and_score(
                        p, p.parts.train, p.parts.validation, cfg,
                        validation_negative_seed);
                    const auto it = report.values.find(base.grid.selection_metric);
                    if (it == report.values.end()) {
                        std::string keys;
                        for (const auto& [k, _] : report.values) keys += " " + k;
                        throw std::runtime_error(
                            "stage grid: selection metric '" +
                            base.grid.selection_metric + "' not in report; have:" + keys);
                    }
                    GridPoint point;
                    point.rating_weight = cfg.graph.rating_weight.name();
                    point.alpha = alpha;
                    point.walk_length = t;
                    point.lambda = lambda;
                    point.validation_value = it->second;
                    point.converged = fitted.second.converged;
                    point.sweeps = fitted.second.objective.size();
                    result.table.push_back(point);
                    if (!have_best ||
                        point.validation_value >
                            result.table[result.best_index].validation_value) {
                        result.best_index = result.table.size() - 1;
                        result.best = cfg;
                        have_best = true;
                    }
                }
            }
        }
    }

    // Refit the winner and score on test once. Training edges stay limited
    // to the train split (validation ratings never become graph edges), so
    // a single-point grid reproduces a plain run exactly.
    auto [report, fitted] = detail::fit_and_score(p, p.parts.train, p.parts.test,
                                                  result.best,
                                                  result.best.eval.negative_seed);
    result.report = report;
    result.artifacts.report = std::move(report);
    result.artifacts.embeddings = std::move(fitted.first);
    result.artifacts.trace = std::move(fitted.second);
    result.artifacts.dataset = std::move(p.ds);
    result.artifacts.parts = std::move(p.parts);
    result.artifacts.log_lines = std::move(p.log_lines);

    if (persist) {
        detail::persist_artifacts(result.best, result.artifacts);
        namespace fs = std::filesystem;
        const fs::path dir(result.best.output.dir);
        detail::atomic_write_file(dir / "grid.csv", grid_table_csv(result.table));
        detail::atomic_write_file(dir / "best_config.ini",
                                  config_to_canonical_text(result.best));
    }
    return result;
}

struct SpeedupBenchSpec {
    std::size_t n_users = 2000;
    std::size_t n_items = 2000;
    std::size_t nnz = 40000;
    std::size_t walk_length = 4;
    std::size_t k = 10;
    std::vector<std::size_t> worker_counts = {1, 2, 4};
    std::size_t repeats = 1;
    std::uint64_t seed = 17;
};

struct SpeedupRow {
    std::size_t workers = 0;
    double seconds = 0.0;
    double speedup = 0.0;  // time with 1 worker / time with this many
};

/// Times one full column-factor update pass over a synthetic bipartite
/// instance at each worker count; speedup is relative to the single-worker
/// wall time. `repeats` takes the fastest of that many timed passes.
inline std::vector<SpeedupRow> speedup_bench(const SpeedupBenchSpec& spec) {
    if (spec.worker_counts.empty() || spec.worker_counts.front() != 1) {
        throw std::invalid_argument("speedup_bench: worker_counts must start at 1");
    }
    if (spec.repeats < 1) {
        throw std::invalid_argument("speedup_bench: repeats must be >= 1");
    }
    GraphSpec gs;
    gs.m = spec.n_users;
    gs.n = spec.n_items;
    const SparseMatrix r = from_triplets(
        random_ratings(spec.n_users, spec.n_items, spec.nnz, spec.seed), spec.n_users,
        spec.n_items);
    const SparseMatrix a = build_tpm(r, nullptr, nullptr, gs);
    const SparseMatrix at = transpose(a);

    FitConfig cfg;
    cfg.k = spec.k;
    cfg.lambda = 0.1;
    cfg.walk.walk_length = spec.walk_length;
    cfg.seed = spec.seed;
    const EmbeddingPair init =
        init_embeddings(spec.n_users, spec.n_items, spec.k, spec.seed);

    std::vector<SpeedupRow> rows;
    double checksum = 0.0;
    for (std::size_t workers : spec.worker_counts) {
        cfg.workers = workers;
        double best = 0.0;
        for (std::size_t rep = 0; rep < spec.repeats; ++rep) {
            const auto start = std::chrono::steady_clock::now();
            const DenseMatrix v =
                update_factor(a, at, init.u, FactorSide::columns, cfg, init.v);
            const auto stop = std::chrono::steady_clock::now();
            checksum += v.data.front();
            const double seconds = std::chrono::duration<double>(stop - start).count();
            if (rep == 0 || seconds < best) best = seconds;
        }
        SpeedupRow row;
        row.workers = workers;
        row.seconds = best;
        row.speedup = rows.empty() ? 1.0 : rows.front().seconds / best;
        rows.push_back(row);
    }
    if (!std::isfinite(checksum)) {
        throw std::runtime_error("speedup_bench: non-finite factor update");
    }
    return rows;
}

inline std::string speedup_table_text(const std::vector<SpeedupRow>& rows) {
    std::string out = "workers\tseconds\tspeedup\n";
    char buf[64];
    for (const SpeedupRow& row : rows) {
        std::snprintf(buf, sizeof buf, "%zu\t%.4f\t%.3f\n", row.workers, row.seconds,
                      row.speedup);
        out += buf;
    }
    return out;
}

}  // namespace homf
