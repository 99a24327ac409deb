#pragma once

// Experiment configuration: a flat key=value document with [section]
// headers, '#'/';' comments, and strict validation (unknown sections,
// unknown keys, duplicate keys, and out-of-range values are errors).
//
// The config hash is a 64-bit FNV-1a digest of the canonical re-serialized
// document. Worker count and the output directory are excluded, so two
// runs that differ only in parallelism or destination hash identically;
// every semantically meaningful field participates.

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "homf/dataset.hpp"
#include "homf/factorize.hpp"
#include "homf/graph.hpp"

namespace homf {

struct DataConfig {
    std::string ratings;  // path, required for experiments
    RatingsFormat format = RatingsFormat::tab;
    ValueKind value_kind = ValueKind::star;
    std::string row_graph;  // optional edge-list path
    std::string col_graph;  // optional edge-list path
    std::string dataset_id;  // label for reports; defaults to the ratings path
};

struct GraphConfig {
    double alpha = 0.0;
    WeightFn rating_weight{};            // g applied to R entries
    WeightFn row_graph_weight{};         // g applied to row side graph
    WeightFn col_graph_weight{};         // g applied to column side graph
    bool col_weight_explicit = false;    // false -> follows row_graph_weight
};

struct EvalConfig {
    std::vector<std::size_t> ks = {1, 5, 10};
    double relevance_threshold = 5.0;  // star data: rating >= threshold is relevant
    std::uint64_t negative_seed = 1;   // binary data: negative-cell draw
};

struct GridConfig {
    std::vector<double> lambdas = {1e-4, 1e-3, 1e-2, 1e-1, 1e0, 1e1, 1e2};
    std::vector<double> alphas = {0.15, 0.25, 0.5, 0.75};
    std::vector<std::size_t> walk_lengths = {2, 4, 6};  // even, or the T=1 ablation
    std::vector<std::string> rating_weights = {"exponential"};
    std::string selection_metric = "ndcg@10";
};

struct OutputConfig {
    std::string dir = "runs/latest";
};

struct ExperimentConfig {
    DataConfig data;
    SplitSpec split;
    GraphConfig graph;
    FitConfig fit;
    EvalConfig eval;
    GridConfig grid;
    OutputConfig output;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
    return s.substr(b, e - b);
}

inline bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config: " + key + " expects a boolean, got '" + v + "'");
}

inline double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t consumed = 0;
        const double x = std::stod(v, &consumed);
        if (consumed != v.size()) throw std::invalid_argument("");
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + " expects a number, got '" + v + "'");
    }
}

inline std::uint64_t parse_count(const std::string& v, const std::string& key) {
    try {
        std::size_t consumed = 0;
        const unsigned long long x = std::stoull(v, &consumed);
        if (consumed != v.size()) throw std::invalid_argument("");
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key +
                                    " expects a non-negative integer, got '" + v + "'");
    }
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= v.size()) {
        const std::size_t next = v.find(',', pos);
        if (next == std::string::npos) {
            out.push_back(trim(v.substr(pos)));
            break;
        }
        out.push_back(trim(v.substr(pos, next - pos)));
        pos = next + 1;
    }
    return out;
}

inline std::string format_number(double x) {
    char buf[64];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf, static_cast<std::size_t>(len));
}

inline std::string ratings_format_name(RatingsFormat f) {
    switch (f) {
        case RatingsFormat::double_colon: return "double-colon";
        case RatingsFormat::tab: return "tab";
        case RatingsFormat::comma: return "comma";
    }
    return "";
}

}  // namespace detail

/// Strict parse of the key=value config document (see README for every
/// key and default). Unknown or duplicate keys are errors.
inline ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::string section;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> seen;

    auto fail = [&](const std::string& msg) {
        throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') fail("unterminated section header");
            section = t.substr(1, t.size() - 2);
            if (section != "data" && section != "split" && section != "graph" &&
                section != "fit" && section != "eval" && section != "grid" &&
                section != "output") {
                fail("unknown section [" + section + "]");
            }
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string value = detail::trim(t.substr(eq + 1));
        if (key.empty()) fail("empty key");
        if (section.empty()) fail("key '" + key + "' appears before any [section]");

        const std::string qualified = section + "." + key;
        for (const std::string& s : seen) {
            if (s == qualified) fail("duplicate key " + qualified);
        }
        seen.push_back(qualified);

        try {
            if (section == "data") {
                if (key == "ratings") cfg.data.ratings = value;
                else if (key == "format") cfg.data.format = parse_ratings_format(value);
                else if (key == "value_kind") {
                    if (value == "star") cfg.data.value_kind = ValueKind::star;
                    else if (value == "binary") cfg.data.value_kind = ValueKind::binary;
                    else fail("value_kind must be star or binary");
                } else if (key == "row_graph") cfg.data.row_graph = value;
                else if (key == "col_graph") cfg.data.col_graph = value;
                else if (key == "dataset_id") cfg.data.dataset_id = value;
                else fail("unknown key " + qualified);
            } else if (section == "split") {
                if (key == "train_fraction")
                    cfg.split.train_fraction = detail::parse_double(value, qualified);
                else if (key == "validation_fraction")
                    cfg.split.validation_fraction = detail::parse_double(value, qualified);
                else if (key == "seed") cfg.split.seed = detail::parse_count(value, qualified);
                else fail("unknown key " + qualified);
            } else if (section == "graph") {
                if (key == "alpha") cfg.graph.alpha = detail::parse_double(value, qualified);
                else if (key == "rating_weight")
                    cfg.graph.rating_weight = parse_weight_fn(value);
                else if (key == "row_weight")
                    cfg.graph.row_graph_weight = parse_weight_fn(value);
                else if (key == "col_weight") {
                    cfg.graph.col_graph_weight = parse_weight_fn(value);
                    cfg.graph.col_weight_explicit = true;
                } else fail("unknown key " + qualified);
            } else if (section == "fit") {
                if (key == "k") cfg.fit.k = detail::parse_count(value, qualified);
                else if (key == "lambda")
                    cfg.fit.lambda = detail::parse_double(value, qualified);
                else if (key == "walk_length")
                    cfg.fit.walk.walk_length = detail::parse_count(value, qualified);
                else if (key == "support_epsilon")
                    cfg.fit.walk.support_epsilon = detail::parse_double(value, qualified);
                else if (key == "outer_sweeps")
                    cfg.fit.outer_sweeps = detail::parse_count(value, qualified);
                else if (key == "objective_rel_tol")
                    cfg.fit.objective_rel_tol = detail::parse_double(value, qualified);
                else if (key == "objective_sample")
                    cfg.fit.objective_sample_size = detail::parse_count(value, qualified);
                else if (key == "cg_tol")
                    cfg.fit.cg_tol = detail::parse_double(value, qualified);
                else if (key == "cg_max_iter")
                    cfg.fit.cg_max_iter = detail::parse_count(value, qualified);
                else if (key == "seed") cfg.fit.seed = detail::parse_count(value, qualified);
                else if (key == "workers")
                    cfg.fit.workers = detail::parse_count(value, qualified);
                else if (key == "update_u_first")
                    cfg.fit.update_u_first = detail::parse_bool(value, qualified);
                else if (key == "symmetrized_prediction")
                    cfg.fit.symmetrized_prediction = detail::parse_bool(value, qualified);
                else fail("unknown key " + qualified);
            } else if (section == "eval") {
                if (key == "ks") {
                    cfg.eval.ks.clear();
                    for (const std::string& s : detail::split_list(value)) {
                        cfg.eval.ks.push_back(detail::parse_count(s, qualified));
                    }
                } else if (key == "relevance_threshold")
                    cfg.eval.relevance_threshold = detail::parse_double(value, qualified);
                else if (key == "negative_seed")
                    cfg.eval.negative_seed = detail::parse_count(value, qualified);
                else fail("unknown key " + qualified);
            } else if (section == "grid") {
                if (key == "lambda") {
                    cfg.grid.lambdas.clear();
                    for (const std::string& s : detail::split_list(value)) {
                        cfg.grid.lambdas.push_back(detail::parse_double(s, qualified));
                    }
                } else if (key == "alpha") {
                    cfg.grid.alphas.clear();
                    for (const std::string& s : detail::split_list(value)) {
                        cfg.grid.alphas.push_back(detail::parse_double(s, qualified));
                    }
                } else if (key == "walk_length") {
                    cfg.grid.walk_lengths.clear();
                    for (const std::string& s : detail::split_list(value)) {
                        cfg.grid.walk_lengths.push_back(detail::parse_count(s, qualified));
                    }
                } else if (key == "rating_weight") {
                    cfg.grid.rating_weights.clear();
                    for (const std::string& s : detail::split_list(value)) {
                        parse_weight_fn(s);  // validate now
                        cfg.grid.rating_weights.push_back(s);
                    }
                } else if (key == "selection_metric")
                    cfg.grid.selection_metric = value;
                else fail("unknown key " + qualified);
            } else if (section == "output") {
                if (key == "dir") cfg.output.dir = value;
                else fail("unknown key " + qualified);
            }
        } catch (const std::invalid_argument& e) {
            // Re-tag value errors with the line number.
            const std::string what = e.what();
            if (what.rfind("config line", 0) == 0) throw;
            fail(what);
        }
    }

    if (!cfg.graph.col_weight_explicit) {
        cfg.graph.col_graph_weight = cfg.graph.row_graph_weight;
    }
    if (cfg.data.dataset_id.empty()) cfg.data.dataset_id = cfg.data.ratings;

    // Cross-field validation.
    if (cfg.fit.k < 1) throw std::invalid_argument("config: fit.k must be >= 1");
    if (!(cfg.fit.lambda > 0.0)) {
        throw std::invalid_argument("config: fit.lambda must be > 0");
    }
    if (cfg.fit.walk.walk_length < 1) {
        throw std::invalid_argument("config: fit.walk_length must be >= 1");
    }
    if (cfg.fit.outer_sweeps < 1) {
        throw std::invalid_argument("config: fit.outer_sweeps must be >= 1");
    }
    if (!(cfg.fit.cg_tol > 0.0)) {
        throw std::invalid_argument("config: fit.cg_tol must be > 0");
    }
    if (cfg.eval.ks.empty()) throw std::invalid_argument("config: eval.ks is empty");
    for (std::size_t k : cfg.eval.ks) {
        if (k < 1) throw std::invalid_argument("config: eval.ks entries must be >= 1");
    }
    const bool has_side = !cfg.data.row_graph.empty() || !cfg.data.col_graph.empty();
    if (!has_side && cfg.graph.alpha != 0.0) {
        throw std::invalid_argument(
            "config: graph.alpha must be 0 when no side graph is supplied");
    }
    if (has_side && !(cfg.graph.alpha > 0.0 && cfg.graph.alpha < 1.0)) {
        throw std::invalid_argument(
            "config: graph.alpha must be in (0,1) when a side graph is supplied");
    }
    if (cfg.grid.lambdas.empty() || cfg.grid.alphas.empty() ||
        cfg.grid.walk_lengths.empty() || cfg.grid.rating_weights.empty()) {
        throw std::invalid_argument("config: grid lists must be non-empty");
    }
    for (std::size_t t : cfg.grid.walk_lengths) {
        if (t != 1 && t % 2 != 0) {
            throw std::invalid_argument(
                "config: grid.walk_length entries must be even (or 1 for the "
                "rank-only ablation), got " + std::to_string(t));
        }
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

/// Canonical serialization used for hashing, run logs, and emitted config
/// files. Sections and keys appear in a fixed sorted order, and values are
/// re-emitted from the typed config, so formatting differences in the
/// source document do not change the hash. The output parses back through
/// parse_config_text to an equivalent config. fit.workers and output.dir
/// are omitted when `for_hash` is set.
inline std::string config_to_canonical_text(const ExperimentConfig& cfg,
                                            bool for_hash = false) {
    using detail::format_number;
    std::string out;
    auto section = [&](const char* name) { out += std::string("[") + name + "]\n"; };
    auto emit = [&](const std::string& key, const std::string& value) {
        out += key + "=" + value + "\n";
    };
    auto join_counts = [&](const std::vector<std::size_t>& xs) {
        std::string s;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(xs[i]);
        }
        return s;
    };
    auto join_numbers = [&](const std::vector<double>& xs) {
        std::string s;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) s += ",";
            s += format_number(xs[i]);
        }
        return s;
    };

    section("data");
    emit("col_graph", cfg.data.col_graph);
    emit("dataset_id", cfg.data.dataset_id);
    emit("format", detail::ratings_format_name(cfg.data.format));
    emit("ratings", cfg.data.ratings);
    emit("row_graph", cfg.data.row_graph);
    emit("value_kind", cfg.data.value_kind == ValueKind::star ? "star" : "binary");

    section("eval");
    emit("ks", join_counts(cfg.eval.ks));
    emit("negative_seed", std::to_string(cfg.eval.negative_seed));
    emit("relevance_threshold", format_number(cfg.eval.relevance_threshold));

    section("fit");
    emit("cg_max_iter", std::to_string(cfg.fit.cg_max_iter));
    emit("cg_tol", format_number(cfg.fit.cg_tol));
    emit("k", std::to_string(cfg.fit.k));
    emit("lambda", format_number(cfg.fit.lambda));
    emit("objective_rel_tol", format_number(cfg.fit.objective_rel_tol));
    emit("objective_sample", std::to_string(cfg.fit.objective_sample_size));
    emit("outer_sweeps", std::to_string(cfg.fit.outer_sweeps));
    emit("seed", std::to_string(cfg.fit.seed));
    emit("support_epsilon", format_number(cfg.fit.walk.support_epsilon));
    emit("symmetrized_prediction", cfg.fit.symmetrized_prediction ? "true" : "false");
    emit("update_u_first", cfg.fit.update_u_first ? "true" : "false");
    emit("walk_length", std::to_string(cfg.fit.walk.walk_length));
    if (!for_hash) emit("workers", std::to_string(cfg.fit.workers));

    section("graph");
    emit("alpha", format_number(cfg.graph.alpha));
    emit("col_weight", cfg.graph.col_graph_weight.name());
    emit("rating_weight", cfg.graph.rating_weight.name());
    emit("row_weight", cfg.graph.row_graph_weight.name());

    section("grid");
    emit("alpha", join_numbers(cfg.grid.alphas));
    emit("lambda", join_numbers(cfg.grid.lambdas));
    emit("rating_weight", [&] {
        std::string s;
        for (std::size_t i = 0; i < cfg.grid.rating_weights.size(); ++i) {
            if (i) s += ",";
            s += parse_weight_fn(cfg.grid.rating_weights[i]).name();
        }
        return s;
    }());
    emit("selection_metric", cfg.grid.selection_metric);
    emit("walk_length", join_counts(cfg.grid.walk_lengths));

    if (!for_hash) {
        section("output");
        emit("dir", cfg.output.dir);
    }

    section("split");
    emit("seed", std::to_string(cfg.split.seed));
    emit("train_fraction", format_number(cfg.split.train_fraction));
    emit("validation_fraction", format_number(cfg.split.validation_fraction));
    return out;
}

/// 64-bit FNV-1a digest of the canonical document, as 16 hex characters.
inline std::string config_hash(const ExperimentConfig& cfg) {
    const std::string canon = config_to_canonical_text(cfg, /*for_hash=*/true);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf, 16);
}

}  // namespace homf
