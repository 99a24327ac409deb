// Regenerates the committed demo datasets under data/. Build and run via
// scripts/regenerate-data.sh; the outputs are deterministic, so rerunning
// must reproduce the committed files byte for byte.

#include <cstdio>
#include <fstream>
#include <string>

#include "homf/synthetic.hpp"

namespace {

void write(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    out << contents;
    std::printf("wrote %s (%zu bytes)\n", path.c_str(), contents.size());
}

}  // namespace

int main() {
    // Planted-cluster benchmark: 800 users x 1200 items, 4 clusters, 1%
    // observed, in-cluster ratings 5 with probability 0.75. The shape keeps
    // item train degree around 8-10 so held-out cells stay reachable through
    // three-step co-rating paths, which is what the acceptance runner's
    // walk-length comparison exercises.
    homf::PlantedClusterSpec bench;
    bench.n_users = 800;
    bench.n_items = 1200;
    bench.seed = 1;
    write("data/planted-cluster.tsv",
          homf::ratings_to_tsv(homf::planted_cluster_ratings(bench)));

    // Small instance for CLI smoke tests and the README walkthrough.
    homf::PlantedClusterSpec small;
    small.n_users = 60;
    small.n_items = 120;
    small.n_clusters = 4;
    small.observed_fraction = 0.06;
    small.seed = 5;
    write("data/synthetic-small.tsv",
          homf::ratings_to_tsv(homf::planted_cluster_ratings(small)));
    return 0;
}
