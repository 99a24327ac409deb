#include <catch_amalgamated.hpp>

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "homf/dataset.hpp"

using homf::RatingsFormat;
using homf::ValueKind;

namespace {

/// Self-deleting file in the system temp directory.
struct TempFile {
    std::filesystem::path path;

    explicit TempFile(const std::string& contents) {
        static std::atomic<int> counter{0};
        path = std::filesystem::temp_directory_path() /
               ("homf-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter++) + ".txt");
        std::ofstream out(path, std::ios::binary);
        out << contents;
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path, ec);
    }
    std::string str() const { return path.string(); }
};

std::multiset<std::pair<std::size_t, std::size_t>> cell_set(
    const std::vector<homf::Triplet>& ts) {
    std::multiset<std::pair<std::size_t, std::size_t>> cells;
    for (const auto& t : ts) cells.insert({t.row, t.col});
    return cells;
}

}  // namespace

TEST_CASE("load_ratings parses double-colon rows and builds id maps") {
    const TempFile file("1::10::5\n");
    const homf::RatingDataset ds =
        homf::load_ratings(file.str(), RatingsFormat::double_colon, ValueKind::star);
    REQUIRE(ds.m == 1);
    REQUIRE(ds.n == 1);
    REQUIRE(ds.triplets.size() == 1);
    REQUIRE(ds.triplets[0].row == 0);
    REQUIRE(ds.triplets[0].col == 0);
    REQUIRE(ds.triplets[0].value == 5.0);
    REQUIRE(ds.user_ids == std::vector<std::string>{"1"});
    REQUIRE(ds.item_ids == std::vector<std::string>{"10"});
    REQUIRE(ds.user_index.at("1") == 0);
    REQUIRE(ds.item_index.at("10") == 0);
    REQUIRE(ds.duplicate_count == 0);
}

TEST_CASE("load_ratings ignores extra fields, CRLF, and blank lines") {
    const TempFile file("1::10::5::978300760\r\n\n2::10::3::978300761\n");
    const homf::RatingDataset ds =
        homf::load_ratings(file.str(), RatingsFormat::double_colon, ValueKind::star);
    REQUIRE(ds.m == 2);
    REQUIRE(ds.n == 1);
    REQUIRE(ds.triplets.size() == 2);
    REQUIRE(ds.triplets[1].value == 3.0);
}

TEST_CASE("load_ratings handles tab and comma delimiters") {
    const TempFile tabbed("u1\ti1\t4.5\nu2\ti1\t2\n");
    const homf::RatingDataset tab_ds =
        homf::load_ratings(tabbed.str(), RatingsFormat::tab, ValueKind::star);
    REQUIRE(tab_ds.triplets.size() == 2);
    REQUIRE(tab_ds.triplets[0].value == 4.5);

    const TempFile csv("u1,i1,4.5\nu1,i2,1\n");
    const homf::RatingDataset csv_ds =
        homf::load_ratings(csv.str(), RatingsFormat::comma, ValueKind::star);
    REQUIRE(csv_ds.n == 2);
}

TEST_CASE("binary datasets store value 1 for every observed cell") {
    const TempFile file("g1\tp1\t0.7\ng2\tp2\t-3\n");
    const homf::RatingDataset ds =
        homf::load_ratings(file.str(), RatingsFormat::tab, ValueKind::binary);
    for (const auto& t : ds.triplets) REQUIRE(t.value == 1.0);
}

TEST_CASE("duplicate rating pairs keep the last value and are counted") {
    const TempFile file("1::10::5\n1::10::2\n2::10::4\n1::10::1\n");
    const homf::RatingDataset ds =
        homf::load_ratings(file.str(), RatingsFormat::double_colon, ValueKind::star);
    REQUIRE(ds.triplets.size() == 2);
    REQUIRE(ds.duplicate_count == 2);
    REQUIRE(ds.triplets[0].value == 1.0);  // original position, last value
}

TEST_CASE("load_ratings reports malformed input with line numbers") {
    const TempFile two_fields("1::10::5\n7::8\n");
    REQUIRE_THROWS_WITH(homf::load_ratings(two_fields.str(),
                                           RatingsFormat::double_colon, ValueKind::star),
                        Catch::Matchers::ContainsSubstring("line 2"));

    const TempFile bad_value("1::10::not-a-number\n");
    REQUIRE_THROWS_WITH(homf::load_ratings(bad_value.str(),
                                           RatingsFormat::double_colon, ValueKind::star),
                        Catch::Matchers::ContainsSubstring("line 1"));

    const TempFile empty("");
    REQUIRE_THROWS_WITH(homf::load_ratings(empty.str(), RatingsFormat::double_colon,
                                           ValueKind::star),
                        Catch::Matchers::ContainsSubstring("no entries"));

    REQUIRE_THROWS_WITH(homf::load_ratings("/nonexistent/ratings.dat",
                                           RatingsFormat::double_colon, ValueKind::star),
                        Catch::Matchers::ContainsSubstring("cannot open"));
}

TEST_CASE("load_graph symmetrizes edges and resolves external ids") {
    const std::unordered_map<std::string, std::size_t> ids{
        {"a", 0}, {"b", 1}, {"c", 2}};

    const TempFile file("a b\nb c 2.5\n");
    const homf::GraphLoadResult g = homf::load_graph(file.str(), 3, ids);
    REQUIRE(g.edges_ingested == 2);
    REQUIRE(g.unknown_id_skips == 0);
    REQUIRE(g.self_loops_dropped == 0);
    REQUIRE(g.matrix.nnz() == 4);

    const auto triplets = homf::to_triplets(g.matrix);
    std::set<std::tuple<std::size_t, std::size_t, double>> entries;
    for (const auto& t : triplets) entries.insert({t.row, t.col, t.value});
    REQUIRE(entries.count({0, 1, 1.0}) == 1);
    REQUIRE(entries.count({1, 0, 1.0}) == 1);
    REQUIRE(entries.count({1, 2, 2.5}) == 1);
    REQUIRE(entries.count({2, 1, 2.5}) == 1);
}

TEST_CASE("load_graph skips self-loops and unknown ids with counts") {
    const std::unordered_map<std::string, std::size_t> ids{{"a", 0}, {"b", 1}};
    const TempFile file("a a\nz b\na b\nb a 7\n");
    const homf::GraphLoadResult g = homf::load_graph(file.str(), 2, ids);
    REQUIRE(g.self_loops_dropped == 1);
    REQUIRE(g.unknown_id_skips == 1);
    REQUIRE(g.edges_ingested == 2);
    // Duplicate undirected pair: last weight wins, both directions present.
    REQUIRE(g.matrix.nnz() == 2);
    const auto triplets = homf::to_triplets(g.matrix);
    REQUIRE(triplets[0].value == 7.0);
    REQUIRE(triplets[1].value == 7.0);
}

TEST_CASE("load_graph rejects rows with the wrong field count") {
    const std::unordered_map<std::string, std::size_t> ids{{"a", 0}, {"b", 1}};
    const TempFile file("a b 1 extra\n");
    REQUIRE_THROWS_WITH(homf::load_graph(file.str(), 2, ids),
                        Catch::Matchers::ContainsSubstring("line 1"));
    REQUIRE_THROWS_WITH(homf::load_graph("/nonexistent/graph.txt", 2, ids),
                        Catch::Matchers::ContainsSubstring("cannot open"));
}

namespace {

homf::RatingDataset tiny_dataset(std::size_t entries) {
    homf::RatingDataset ds;
    ds.m = entries;
    ds.n = entries;
    for (std::size_t i = 0; i < entries; ++i) {
        ds.triplets.push_back({i, i, static_cast<double>(i + 1)});
    }
    return ds;
}

}  // namespace

TEST_CASE("split produces the documented 8/2 layout for ten entries") {
    const homf::RatingDataset ds = tiny_dataset(10);
    homf::SplitSpec spec;
    spec.seed = 3;
    const homf::SplitResult parts = homf::split(ds, spec);
    REQUIRE(parts.test.size() == 2);
    REQUIRE(parts.validation.size() == 1);  // floor(8 * 0.2)
    REQUIRE(parts.train.size() == 7);

    // Disjoint and exhaustive.
    auto all = cell_set(parts.train);
    for (const auto& c : cell_set(parts.validation)) all.insert(c);
    for (const auto& c : cell_set(parts.test)) all.insert(c);
    REQUIRE(all == cell_set(ds.triplets));
}

TEST_CASE("split is deterministic per seed and varies across seeds") {
    const homf::RatingDataset ds = tiny_dataset(40);
    homf::SplitSpec spec;
    spec.seed = 11;
    const auto first = homf::split(ds, spec);
    const auto second = homf::split(ds, spec);
    REQUIRE(cell_set(first.test) == cell_set(second.test));
    REQUIRE(cell_set(first.validation) == cell_set(second.validation));

    spec.seed = 12;
    const auto other = homf::split(ds, spec);
    REQUIRE(cell_set(other.test) != cell_set(first.test));
}

TEST_CASE("split keeps each partition in original entry order") {
    const homf::RatingDataset ds = tiny_dataset(30);
    homf::SplitSpec spec;
    spec.seed = 5;
    const auto parts = homf::split(ds, spec);
    for (const auto* part : {&parts.train, &parts.validation, &parts.test}) {
        for (std::size_t i = 1; i < part->size(); ++i) {
            REQUIRE((*part)[i - 1].row < (*part)[i].row);
        }
    }
}

TEST_CASE("split validates fractions") {
    const homf::RatingDataset ds = tiny_dataset(10);
    homf::SplitSpec spec;
    spec.train_fraction = 0.0;
    REQUIRE_THROWS_AS(homf::split(ds, spec), std::invalid_argument);
    spec.train_fraction = 0.8;
    spec.validation_fraction = 1.0;
    REQUIRE_THROWS_AS(homf::split(ds, spec), std::invalid_argument);
}

TEST_CASE("sample_negative_cells is forced on a saturated grid") {
    std::unordered_set<std::uint64_t> exclude{0, 3};  // (0,0) and (1,1) of 2x2
    const auto cells = homf::sample_negative_cells(2, 2, exclude, 2, 9);
    REQUIRE(cells.size() == 2);
    REQUIRE(cells[0] == std::pair<std::size_t, std::size_t>{0, 1});
    REQUIRE(cells[1] == std::pair<std::size_t, std::size_t>{1, 0});

    REQUIRE_THROWS_WITH(homf::sample_negative_cells(2, 2, exclude, 3, 9),
                        Catch::Matchers::ContainsSubstring("only 2 cells are free"));
}

TEST_CASE("sample_negative_cells avoids positives in both sampling regimes") {
    std::unordered_set<std::uint64_t> exclude;
    for (std::uint64_t cell = 0; cell < 2500; cell += 7) exclude.insert(cell);

    // Rejection regime (small request) and enumeration regime (large).
    for (std::size_t count : {100u, 1500u}) {
        const auto cells = homf::sample_negative_cells(50, 50, exclude, count, 21);
        REQUIRE(cells.size() == count);
        std::set<std::uint64_t> unique;
        for (const auto& [r, c] : cells) {
            const std::uint64_t key = static_cast<std::uint64_t>(r) * 50 + c;
            REQUIRE(!exclude.contains(key));
            unique.insert(key);
        }
        REQUIRE(unique.size() == count);  // no repeats
        REQUIRE(std::is_sorted(cells.begin(), cells.end()));
        REQUIRE(homf::sample_negative_cells(50, 50, exclude, count, 21) == cells);
        REQUIRE(homf::sample_negative_cells(50, 50, exclude, count, 22) != cells);
    }
}

TEST_CASE("negative_sample draws one zero cell per positive") {
    homf::RatingDataset ds;
    ds.m = 2;
    ds.n = 2;
    ds.value_kind = ValueKind::binary;
    ds.triplets = {{0, 0, 1.0}, {1, 1, 1.0}};
    const auto negatives = homf::negative_sample(ds, 4);
    REQUIRE(negatives.size() == 2);
    const auto cells = cell_set(negatives);
    REQUIRE(cells.count({0, 1}) == 1);
    REQUIRE(cells.count({1, 0}) == 1);
    for (const auto& t : negatives) REQUIRE(t.value == 0.0);

    ds.value_kind = ValueKind::star;
    REQUIRE_THROWS_AS(homf::negative_sample(ds, 4), std::invalid_argument);
}

TEST_CASE("ratings format names parse with aliases") {
    REQUIRE(homf::parse_ratings_format("double-colon") == RatingsFormat::double_colon);
    REQUIRE(homf::parse_ratings_format("::") == RatingsFormat::double_colon);
    REQUIRE(homf::parse_ratings_format("tab") == RatingsFormat::tab);
    REQUIRE(homf::parse_ratings_format("csv") == RatingsFormat::comma);
    REQUIRE_THROWS_AS(homf::parse_ratings_format("fixed-width"), std::invalid_argument);
}
