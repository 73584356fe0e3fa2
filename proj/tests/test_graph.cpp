#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "ga/errors.hpp"
#include "ga/graph.hpp"
#include "support/fixture.hpp"

namespace {

ga::Graph tiny_path_graph() {
    std::vector<ga::Node> nodes = {{"a", "t", {}, {}},
                                   {"b", "t", {}, {}},
                                   {"c", "t", {}, {}},
                                   {"d", "t", {}, {}}};
    std::vector<ga::Edge> edges = {{"a", "b", "e"}, {"b", "c", "e"}, {"c", "d", "e"}};
    return ga::Graph(std::move(nodes), std::move(edges));
}

// Independent recount: degrees straight from the edge list, means per type.
ga::DegreeStats degree_oracle(const ga::Graph& g) {
    ga::DegreeStats stats;
    for (const auto& node : g.nodes()) stats.degree[node.id] = 0;
    for (const auto& edge : g.edges()) {
        stats.degree[edge.src] += 1;
        stats.degree[edge.dst] += 1;
    }
    std::map<std::string, std::pair<int64_t, int64_t>> sums;
    for (const auto& node : g.nodes()) {
        sums[node.node_type].first += stats.degree[node.id];
        sums[node.node_type].second += 1;
    }
    for (const auto& [type, sc] : sums) {
        stats.avg_degree_by_type[type] = double(sc.first) / double(sc.second);
    }
    for (const auto& node : g.nodes()) {
        const double avg = stats.avg_degree_by_type[node.node_type];
        stats.importance[node.id] = avg == 0.0 ? 0.0 : double(stats.degree[node.id]) / avg;
    }
    return stats;
}

} // namespace

TEST_CASE("fixture graph loads from JSONL with counts and attribute order") {
    const auto dir = fixture::unique_temp_dir("graph_load");
    const auto paths = fixture::write_dataset(dir);
    const ga::Graph g = ga::load_graph_files(paths.nodes, paths.edges);

    CHECK(g.node_count() == 60);
    CHECK(g.edge_count() == 150);

    const ga::Node& gene = g.node("g04");
    CHECK(gene.node_type == "gene");
    REQUIRE(gene.attributes.size() == 2);
    CHECK(gene.attributes[0].first == "name");   // file order preserved
    CHECK(gene.attributes[1].first == "summary");
    REQUIRE(gene.label.has_value());
    CHECK(*gene.label == "kinase-group");
    CHECK(g.node("d03").label.has_value() == false);

    const auto counts = g.node_counts_by_type();
    std::map<std::string, size_t> by_type(counts.begin(), counts.end());
    CHECK(by_type.at("drug") == 15);
    CHECK(by_type.at("gene") == 30);
    CHECK(by_type.at("pathway") == 15);
}

TEST_CASE("loader reports line numbers for malformed records") {
    const auto dir = fixture::unique_temp_dir("graph_bad");
    const auto nodes_path = dir + "/nodes.jsonl";
    const auto edges_path = dir + "/edges.jsonl";
    {
        std::ofstream nodes(nodes_path);
        nodes << R"({"id":"a","type":"t","attributes":{}})" << "\n";
        nodes << "{not json\n";
        std::ofstream edges(edges_path);
    }
    try {
        ga::load_graph_files(nodes_path, edges_path);
        FAIL("expected malformed-record");
    } catch (const ga::Error& e) {
        CHECK(e.code() == ga::ErrorCode::MalformedRecord);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("loader rejects dangling endpoints and duplicate ids") {
    const auto dir = fixture::unique_temp_dir("graph_invalid");
    {
        std::ofstream nodes(dir + "/n.jsonl");
        nodes << R"({"id":"a","type":"t","attributes":{}})" << "\n";
        std::ofstream edges(dir + "/e.jsonl");
        edges << R"({"src":"a","dst":"missing","type":"e"})" << "\n";
    }
    CHECK_THROWS_WITH_AS(ga::load_graph_files(dir + "/n.jsonl", dir + "/e.jsonl"),
                         doctest::Contains("missing"), ga::Error);

    {
        std::ofstream nodes(dir + "/n2.jsonl");
        nodes << R"({"id":"a","type":"t","attributes":{}})" << "\n";
        nodes << R"({"id":"a","type":"t","attributes":{}})" << "\n";
        std::ofstream edges(dir + "/e2.jsonl");
    }
    try {
        ga::load_graph_files(dir + "/n2.jsonl", dir + "/e2.jsonl");
        FAIL("expected duplicate-node-id");
    } catch (const ga::Error& e) {
        CHECK(e.code() == ga::ErrorCode::DuplicateNodeId);
    }
}

TEST_CASE("degree stats match the edge-list recount oracle on the fixture") {
    const ga::Graph g = fixture::build_graph();
    const ga::DegreeStats got = ga::degree_stats(g);
    const ga::DegreeStats want = degree_oracle(g);

    CHECK(got.degree == want.degree);
    for (const auto& [type, avg] : want.avg_degree_by_type) {
        CHECK(got.avg_degree_by_type.at(type) == doctest::Approx(avg).epsilon(1e-12));
    }
    for (const auto& [id, imp] : want.importance) {
        CHECK(got.importance.at(id) == doctest::Approx(imp).epsilon(1e-12));
    }

    // Every drug has exactly degree 4 (3 targets + 1 affects) so importance 1.
    CHECK(got.degree.at("d07") == 4);
    CHECK(got.importance.at("d07") == doctest::Approx(1.0));
}

TEST_CASE("parallel and serial degree stats agree on random graphs") {
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 50; ++trial) {
        const size_t n = 2 + rng() % 120;
        std::vector<ga::Node> nodes;
        for (size_t i = 0; i < n; ++i) {
            nodes.push_back({"n" + std::to_string(i),
                             "t" + std::to_string(rng() % 4), {}, {}});
        }
        std::vector<ga::Edge> edges;
        const size_t m = rng() % (4 * n);
        for (size_t i = 0; i < m; ++i) {
            edges.push_back({"n" + std::to_string(rng() % n),
                             "n" + std::to_string(rng() % n), "e"});
        }
        const ga::Graph g(std::move(nodes), std::move(edges));
        const auto par = ga::degree_stats(g, 4);
        const auto ser = ga::degree_stats_serial(g);
        REQUIRE(par.degree == ser.degree);
        for (const auto& [id, imp] : ser.importance) {
            REQUIRE(par.importance.at(id) == doctest::Approx(imp).epsilon(1e-12));
        }
    }
}

TEST_CASE("n-hop neighborhood is breadth-first with minimum hop and no self") {
    const ga::Graph g = tiny_path_graph();
    const auto hops2 = ga::n_hop_neighbors(g, "a", 2);
    REQUIRE(hops2.size() == 2);
    CHECK(hops2[0] == std::pair<ga::NodeId, int>{"b", 1});
    CHECK(hops2[1] == std::pair<ga::NodeId, int>{"c", 2});

    const auto hops3 = ga::n_hop_neighbors(g, "a", 3);
    REQUIRE(hops3.size() == 3);
    CHECK(hops3[2] == std::pair<ga::NodeId, int>{"d", 3});

    // On the fixture: each node appears once, at its minimum hop, target excluded.
    const ga::Graph fg = fixture::build_graph();
    const auto out = ga::n_hop_neighbors(fg, "d00", 2);
    std::set<ga::NodeId> seen;
    for (const auto& [id, hop] : out) {
        CHECK(id != "d00");
        CHECK(seen.insert(id).second);
        CHECK(hop >= 1);
        CHECK(hop <= 2);
    }
    // Direct neighbors of d00 must be at hop 1 even if reachable longer ways.
    for (const auto& [id, hop] : out) {
        const auto& nbrs = fg.neighbors("d00");
        if (std::find(nbrs.begin(), nbrs.end(), id) != nbrs.end()) CHECK(hop == 1);
    }
}

TEST_CASE("split_dataset slices by floored ratios and partitions the input") {
    std::vector<std::string> ids;
    for (int i = 0; i < 30; ++i) ids.push_back("x" + std::to_string(i));

    const ga::Split split = ga::split_dataset(ids, 0.7, 0.1, 0.2, 99);
    CHECK(split.validation.size() == 3);  // floor(30 * 0.1)
    CHECK(split.test.size() == 6);        // floor(30 * 0.2)
    CHECK(split.train.size() == 21);      // remainder

    std::set<std::string> all;
    for (const auto& part : {split.train, split.validation, split.test}) {
        for (const auto& id : part) CHECK(all.insert(id).second);
    }
    CHECK(all.size() == ids.size());

    const ga::Split again = ga::split_dataset(ids, 0.7, 0.1, 0.2, 99);
    CHECK(again.train == split.train);
    CHECK(again.test == split.test);
    const ga::Split other = ga::split_dataset(ids, 0.7, 0.1, 0.2, 100);
    CHECK(other.train != split.train);
}

TEST_CASE("split_dataset validates ratios") {
    const std::vector<std::string> ids = {"a", "b", "c"};
    CHECK_THROWS_AS(ga::split_dataset(ids, 0.5, 0.1, 0.1, 1), ga::Error);
    CHECK_THROWS_AS(ga::split_dataset(ids, -0.1, 0.6, 0.5, 1), ga::Error);
}

TEST_CASE("split JSON round-trips") {
    const std::vector<std::string> ids = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
    const ga::Split split = ga::split_dataset(ids, 0.6, 0.2, 0.2, 7);
    const ga::Split back = ga::split_from_json(ga::split_to_json(split));
    CHECK(back.seed == split.seed);
    CHECK(back.train == split.train);
    CHECK(back.validation == split.validation);
    CHECK(back.test == split.test);
}

TEST_CASE("negative edges are disjoint from positives, exact and reproducible") {
    const ga::Graph g = fixture::build_graph();

    for (uint64_t seed = 0; seed < 100; ++seed) {
        const auto negatives = ga::sample_negative_edges(g, "drug", "gene", 50, seed);
        REQUIRE(negatives.size() == 50);
        std::set<std::pair<std::string, std::string>> seen;
        for (const auto& edge : negatives) {
            CHECK(edge.edge_type == "negative");
            CHECK(g.node(edge.src).node_type == "drug");
            CHECK(g.node(edge.dst).node_type == "gene");
            CHECK_FALSE(g.has_edge_between(edge.src, edge.dst));
            CHECK(seen.insert({edge.src, edge.dst}).second);
        }
        const auto again = ga::sample_negative_edges(g, "drug", "gene", 50, seed);
        REQUIRE(again.size() == negatives.size());
        for (size_t i = 0; i < again.size(); ++i) CHECK(again[i] == negatives[i]);
    }
}

TEST_CASE("same-type negative sampling never emits a pair twice in any orientation") {
    const ga::Graph g = fixture::build_graph();
    const auto negatives = ga::sample_negative_edges(g, "gene", "gene", 120, 5);
    REQUIRE(negatives.size() == 120);
    std::set<std::pair<std::string, std::string>> unordered;
    for (const auto& edge : negatives) {
        CHECK(edge.src != edge.dst);
        auto key = std::minmax(edge.src, edge.dst);
        CHECK(unordered.insert({key.first, key.second}).second);
        CHECK_FALSE(g.has_edge_between(edge.src, edge.dst));
    }
}

TEST_CASE("negative sampling fails cleanly when the space is too small") {
    std::vector<ga::Node> nodes = {{"a", "x", {}, {}}, {"b", "y", {}, {}}};
    std::vector<ga::Edge> edges = {{"a", "b", "e"}};
    const ga::Graph g(std::move(nodes), std::move(edges));
    try {
        ga::sample_negative_edges(g, "x", "y", 1, 0);
        FAIL("expected insufficient-negative-space");
    } catch (const ga::Error& e) {
        CHECK(e.code() == ga::ErrorCode::InsufficientNegativeSpace);
    }
}

TEST_CASE("negative sampling can enumerate the exact free space") {
    // 2 drugs x 3 genes with one positive edge leaves exactly 5 free pairs.
    std::vector<ga::Node> nodes = {{"da", "drug", {}, {}}, {"db", "drug", {}, {}},
                                   {"ga", "gene", {}, {}}, {"gb", "gene", {}, {}},
                                   {"gc", "gene", {}, {}}};
    std::vector<ga::Edge> edges = {{"da", "ga", "targets"}};
    const ga::Graph g(std::move(nodes), std::move(edges));
    const auto negatives = ga::sample_negative_edges(g, "drug", "gene", 5, 3);
    REQUIRE(negatives.size() == 5);
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& edge : negatives) {
        CHECK_FALSE(g.has_edge_between(edge.src, edge.dst));
        CHECK(seen.insert({edge.src, edge.dst}).second);
    }
}
