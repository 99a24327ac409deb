// Command-line front end: fit, evaluate, grid-search, neighbors,
// sample-column, spectrum, and speedup-bench subcommands over the
// header-only library. See README.md for the config reference.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "homf/homf.hpp"
#include "spectrum_report.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    long long workers = -1;  // -1: leave config/env resolution alone
};

homf::ExperimentConfig load_with_overrides(const CommonArgs& args,
                                           const std::string& output_override) {
    homf::ExperimentConfig cfg = homf::load_config(args.config_path);
    if (args.workers >= 0) cfg.fit.workers = static_cast<std::size_t>(args.workers);
    if (!output_override.empty()) cfg.output.dir = output_override;
    return cfg;
}

/// Rebuilds the transition matrix the way `fit` sees it: training edges
/// only (or every rating when `use_full` is set).
homf::SparseMatrix config_tpm(const homf::ExperimentConfig& cfg, bool use_full,
                              std::size_t* m_out, std::size_t* n_out) {
    const homf::RatingDataset ds =
        homf::load_ratings(cfg.data.ratings, cfg.data.format, cfg.data.value_kind);
    const homf::SplitResult parts = homf::split(ds, cfg.split);
    const std::vector<homf::Triplet>& edges = use_full ? ds.triplets : parts.train;

    homf::SparseMatrix row_graph, col_graph;
    if (!cfg.data.row_graph.empty()) {
        row_graph = homf::load_graph(cfg.data.row_graph, ds.m, ds.user_index).matrix;
    }
    if (!cfg.data.col_graph.empty()) {
        col_graph = homf::load_graph(cfg.data.col_graph, ds.n, ds.item_index).matrix;
    }
    homf::GraphSpec spec;
    spec.m = ds.m;
    spec.n = ds.n;
    spec.alpha = cfg.graph.alpha;
    spec.g1 = cfg.graph.row_graph_weight;
    spec.g2 = cfg.graph.rating_weight;
    spec.g3 = cfg.graph.col_graph_weight;
    const homf::SparseMatrix r = homf::from_triplets(edges, ds.m, ds.n);
    *m_out = ds.m;
    *n_out = ds.n;
    return homf::build_tpm(r, row_graph.n_rows ? &row_graph : nullptr,
                           col_graph.n_rows ? &col_graph : nullptr, spec);
}

/// Optional dense-index -> external-id translation from an id_maps.tsv
/// produced by `fit`.
std::vector<std::string> load_id_map_labels(const std::string& path) {
    std::vector<std::string> user_labels, item_labels;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open id map file " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string kind, external, dense;
        ss >> kind >> external >> dense;
        if (kind == "user") user_labels.push_back(external);
        else if (kind == "item") item_labels.push_back(external);
    }
    std::vector<std::string> labels = std::move(user_labels);
    labels.insert(labels.end(), item_labels.begin(), item_labels.end());
    return labels;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Implicit higher-order matrix factorization over rating graphs"};
    app.require_subcommand(1);

    CommonArgs common;
    std::string output_override;
    bool text_export = false;

    auto* fit_cmd = app.add_subcommand("fit", "Run one fit + test evaluation");
    fit_cmd->add_option("--config", common.config_path, "config document")->required();
    fit_cmd->add_option("--output", output_override, "override output.dir");
    fit_cmd->add_option("--workers", common.workers, "override fit.workers");
    fit_cmd->add_flag("--text-export", text_export,
                      "also write embeddings.txt next to the binary");

    std::string embeddings_path;
    auto* eval_cmd = app.add_subcommand(
        "evaluate", "Score saved embeddings on the config's test split");
    eval_cmd->add_option("--config", common.config_path, "config document")->required();
    eval_cmd->add_option("--embeddings", embeddings_path, "embeddings.homf file")
        ->required();

    auto* grid_cmd = app.add_subcommand("grid-search",
                                        "Sweep the [grid] section, refit the winner");
    grid_cmd->add_option("--config", common.config_path, "config document")->required();
    grid_cmd->add_option("--output", output_override, "override output.dir");
    grid_cmd->add_option("--workers", common.workers, "override fit.workers");

    std::size_t node = 0, count = 5;
    std::string pool_name = "all", id_map_path;
    auto* neighbors_cmd =
        app.add_subcommand("neighbors", "Nearest embedding rows to a node");
    neighbors_cmd->add_option("--embeddings", embeddings_path, "embeddings.homf file")
        ->required();
    neighbors_cmd->add_option("--node", node, "joint node index (items offset by m)")
        ->required();
    neighbors_cmd->add_option("--count", count, "neighbors to list");
    neighbors_cmd->add_option("--pool", pool_name, "users|items|all");
    neighbors_cmd->add_option("--id-maps", id_map_path,
                              "id_maps.tsv for external-id labels");

    std::size_t walk_length = 0;
    bool use_full = false;
    auto* column_cmd = app.add_subcommand(
        "sample-column", "Emit one averaged-walk column as text for diffing");
    column_cmd->add_option("--config", common.config_path, "config document")->required();
    column_cmd->add_option("--node", node, "joint node index")->required();
    column_cmd->add_option("--walk", walk_length, "walk length (default: fit.walk_length)");
    column_cmd->add_flag("--full", use_full, "use all ratings instead of the train split");

    std::string walks_list = "1,2,4,8";
    std::size_t top = 20;
    auto* spectrum_cmd = app.add_subcommand(
        "spectrum", "Eigenvalue-decay table of the averaged walk matrix");
    spectrum_cmd->add_option("--config", common.config_path, "config document")
        ->required();
    spectrum_cmd->add_option("--walks", walks_list, "comma list of walk lengths");
    spectrum_cmd->add_option("--top", top, "rows to print");
    spectrum_cmd->add_flag("--full", use_full, "use all ratings instead of the train split");

    homf::SpeedupBenchSpec bench;
    std::string workers_list = "1,2,4";
    auto* bench_cmd = app.add_subcommand(
        "speedup-bench", "Update-pass wall time and speedup per worker count");
    bench_cmd->add_option("--users", bench.n_users, "synthetic row entities");
    bench_cmd->add_option("--items", bench.n_items, "synthetic column entities");
    bench_cmd->add_option("--nnz", bench.nnz, "observed cells");
    bench_cmd->add_option("--walk", bench.walk_length, "walk length");
    bench_cmd->add_option("--rank", bench.k, "factor rank");
    bench_cmd->add_option("--workers", workers_list, "comma list of worker counts");
    bench_cmd->add_option("--repeats", bench.repeats, "timed passes per count (min kept)");
    bench_cmd->add_option("--seed", bench.seed, "instance seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit_cmd->parsed()) {
            const homf::ExperimentConfig cfg = load_with_overrides(common, output_override);
            const homf::ExperimentArtifacts art = homf::run_experiment(cfg);
            if (text_export) {
                homf::export_embeddings_text(
                    std::filesystem::path(cfg.output.dir) / "embeddings.txt",
                    art.embeddings);
            }
            std::cout << homf::report_to_text(art.report);
        } else if (eval_cmd->parsed()) {
            const homf::ExperimentConfig cfg = load_with_overrides(common, "");
            const homf::EmbeddingPair e = homf::load_embeddings(embeddings_path);
            const homf::RatingDataset ds = homf::load_ratings(
                cfg.data.ratings, cfg.data.format, cfg.data.value_kind);
            if (e.m != ds.m || e.n != ds.n) {
                throw std::runtime_error(
                    "embeddings are " + std::to_string(e.m) + "x" + std::to_string(e.n) +
                    " but the dataset is " + std::to_string(ds.m) + "x" +
                    std::to_string(ds.n));
            }
            const homf::SplitResult parts = homf::split(ds, cfg.split);
            std::vector<std::pair<std::size_t, std::size_t>> negatives;
            if (cfg.data.value_kind == homf::ValueKind::binary) {
                negatives = homf::sample_negative_cells(
                    ds.m, ds.n, homf::detail::all_positive_cells(parts, ds.n),
                    parts.train.size(), cfg.eval.negative_seed);
            }
            const std::vector<homf::UserTestSet> sets =
                homf::build_user_test_sets(parts.test, e, cfg, negatives);
            homf::MetricReport report = homf::aggregate(sets, cfg.eval.ks);
            if (cfg.data.value_kind == homf::ValueKind::binary) {
                std::vector<double> scores;
                std::vector<int> labels;
                for (const homf::Triplet& t : parts.test) {
                    scores.push_back(
                        homf::predict(e, t.row, t.col, cfg.fit.symmetrized_prediction));
                    labels.push_back(1);
                }
                for (const auto& [row, col] : negatives) {
                    scores.push_back(
                        homf::predict(e, row, col, cfg.fit.symmetrized_prediction));
                    labels.push_back(0);
                }
                report.values["auc"] = homf::auc(scores, labels);
            }
            report.config_hash = homf::config_hash(cfg);
            report.seed = cfg.fit.seed;
            report.dataset_id = cfg.data.dataset_id;
            std::cout << homf::report_to_text(report);
        } else if (grid_cmd->parsed()) {
            const homf::ExperimentConfig cfg = load_with_overrides(common, output_override);
            const homf::GridSearchResult result = homf::grid_search(cfg);
            std::cout << homf::grid_table_csv(result.table);
            std::cout << "# best: " << result.table[result.best_index].rating_weight
                      << " alpha=" << result.table[result.best_index].alpha
                      << " T=" << result.table[result.best_index].walk_length
                      << " lambda=" << result.table[result.best_index].lambda << "\n";
            std::cout << homf::report_to_text(result.report);
        } else if (neighbors_cmd->parsed()) {
            const homf::EmbeddingPair e = homf::load_embeddings(embeddings_path);
            homf::NeighborPool pool;
            if (pool_name == "users") pool = homf::NeighborPool::users;
            else if (pool_name == "items") pool = homf::NeighborPool::items;
            else if (pool_name == "all") pool = homf::NeighborPool::all;
            else throw std::runtime_error("--pool must be users, items, or all");
            std::vector<std::string> labels;
            if (!id_map_path.empty()) {
                labels = load_id_map_labels(id_map_path);
                if (labels.size() != e.m + e.n) {
                    throw std::runtime_error("id map has " +
                                             std::to_string(labels.size()) +
                                             " entries for " +
                                             std::to_string(e.m + e.n) + " nodes");
                }
            }
            for (const auto& [idx, dist] : homf::neighbors(e, node, count, pool)) {
                const std::string label =
                    labels.empty() ? std::to_string(idx) : labels[idx];
                std::printf("%s\t%.12g\n", label.c_str(), dist);
            }
        } else if (column_cmd->parsed()) {
            const homf::ExperimentConfig cfg = load_with_overrides(common, "");
            std::size_t m = 0, n = 0;
            const homf::SparseMatrix a = config_tpm(cfg, use_full, &m, &n);
            homf::WalkConfig wcfg = cfg.fit.walk;
            if (walk_length > 0) wcfg.walk_length = walk_length;
            const homf::DenseVector column = homf::sample_column(a, node, wcfg);
            for (std::size_t i = 0; i < column.size(); ++i) {
                std::printf("%zu\t%.17g\n", i, column[i]);
            }
        } else if (spectrum_cmd->parsed()) {
            const homf::ExperimentConfig cfg = load_with_overrides(common, "");
            std::size_t m = 0, n = 0;
            const homf::SparseMatrix a = config_tpm(cfg, use_full, &m, &n);
            std::vector<std::size_t> walks;
            for (const std::string& s : homf::detail::split_list(walks_list)) {
                walks.push_back(homf::detail::parse_count(s, "--walks"));
            }
            std::cout << homf::tools::spectrum_table(a, walks, top);
        } else if (bench_cmd->parsed()) {
            bench.worker_counts.clear();
            for (const std::string& s : homf::detail::split_list(workers_list)) {
                bench.worker_counts.push_back(homf::detail::parse_count(s, "--workers"));
            }
            std::cout << homf::speedup_table_text(homf::speedup_bench(bench));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
