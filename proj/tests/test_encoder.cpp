#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "ga/encoder.hpp"
#include "ga/errors.hpp"
#include "ga/graph.hpp"
#include "support/fixture.hpp"

namespace {

ga::Graph tiny_graph() {
    std::vector<ga::Node> nodes = {
        {"t1", "drug", {{"name", "aspirin"}, {"profile", "pain"}}, {}},
        {"n1", "gene", {{"name", "comt"}}, std::optional<std::string>("kinase-group")},
        {"n2", "gene", {}, {}},
        {"n3", "pathway", {{"desc", "x"}}, {}},
    };
    std::vector<ga::Edge> edges = {{"t1", "n1", "e"}, {"t1", "n2", "e"}, {"n1", "n3", "e"}};
    return ga::Graph(std::move(nodes), std::move(edges));
}

// Independent oracle: repeated argmax selection instead of a sort.
std::vector<ga::NodeId> top_k_oracle(std::vector<ga::NodeId> candidates,
                                     const ga::DegreeStats& stats, size_t k) {
    std::vector<ga::NodeId> out;
    while (out.size() < k && !candidates.empty()) {
        size_t best = 0;
        for (size_t i = 1; i < candidates.size(); ++i) {
            const double a = stats.importance.at(candidates[i]);
            const double b = stats.importance.at(candidates[best]);
            if (a > b || (a == b && candidates[i] < candidates[best])) best = i;
        }
        out.push_back(candidates[best]);
        candidates.erase(candidates.begin() + long(best));
    }
    return out;
}

} // namespace

TEST_CASE("encode_node emits the line grammar exactly") {
    const ga::Graph g = tiny_graph();
    const ga::DegreeStats stats = ga::degree_stats(g);
    ga::EncoderConfig cfg;

    const ga::EncodedSample sample = ga::encode_node(g, stats, "t1", cfg);
    CHECK(sample.sample_id == "t1");
    CHECK(sample.kind == ga::SampleKind::Node);
    CHECK(sample.text ==
          "node: t1\n"
          "attributes:\n"
          "type: drug\n"
          "name: aspirin\n"
          "profile: pain\n"
          "n-hop-neighbours: hop 1\n"
          "- gene | n1 | name: comt\n"
          "- gene | n2 |\n");
    CHECK(sample.neighbor_ids_used == std::vector<ga::NodeId>{"n1", "n2"});
}

TEST_CASE("hop depth adds per-hop sections in order") {
    const ga::Graph g = tiny_graph();
    const ga::DegreeStats stats = ga::degree_stats(g);
    ga::EncoderConfig cfg;
    cfg.hops = 2;

    const ga::EncodedSample sample = ga::encode_node(g, stats, "t1", cfg);
    const auto pos1 = sample.text.find("n-hop-neighbours: hop 1\n");
    const auto pos2 = sample.text.find("n-hop-neighbours: hop 2\n");
    REQUIRE(pos1 != std::string::npos);
    REQUIRE(pos2 != std::string::npos);
    CHECK(pos1 < pos2);
    CHECK(sample.text.find("- pathway | n3 | desc: x\n") > pos2);
}

TEST_CASE("label masking controls the label line") {
    const ga::Graph g = tiny_graph();
    const ga::DegreeStats stats = ga::degree_stats(g);

    ga::EncoderConfig masked;
    CHECK(masked.mask_target_label);
    const auto hidden = ga::encode_node(g, stats, "n1", masked);
    CHECK(hidden.text.find("kinase-group") == std::string::npos);
    CHECK(hidden.text.find("label:") == std::string::npos);

    ga::EncoderConfig open;
    open.mask_target_label = false;
    const auto shown = ga::encode_node(g, stats, "n1", open);
    CHECK(shown.text.find("label: kinase-group\n") != std::string::npos);
}

TEST_CASE("encode_edge renders both endpoint blocks and excludes the counterpart") {
    const ga::Graph g = tiny_graph();
    const ga::DegreeStats stats = ga::degree_stats(g);
    ga::EncoderConfig cfg;

    const ga::EncodedSample sample = ga::encode_edge(g, stats, "t1", "n1", cfg);
    CHECK(sample.sample_id == "t1|n1");
    CHECK(sample.kind == ga::SampleKind::Edge);
    CHECK(sample.text ==
          "edge: (t1, n1)\n"
          "attributes:\n"
          "node_a: t1\n"
          "type: drug\n"
          "name: aspirin\n"
          "profile: pain\n"
          "node_b: n1\n"
          "type: gene\n"
          "name: comt\n"
          "y-n-hop-neighbours: hop 1\n"
          "- pathway | n3 | desc: x\n"
          "x-n-hop-neighbours: hop 1\n"
          "- gene | n2 |\n");

    // Without exclusion each endpoint reappears in the other's hop list.
    const auto with_counterpart = ga::encode_edge(g, stats, "t1", "n1", cfg, false);
    CHECK(with_counterpart.text.find("- drug | t1 |") != std::string::npos);
    CHECK(with_counterpart.text.find("- gene | n1 |") != std::string::npos);
}

TEST_CASE("attribute selection and budgets apply") {
    std::vector<ga::Node> nodes = {
        {"a", "t", {{"name", "short"}, {"blob", std::string(500, 'z')}}, {}},
        {"b", "t", {{"blob", std::string(500, 'w')}}, {}},
    };
    std::vector<ga::Edge> edges = {{"a", "b", "e"}};
    const ga::Graph g(std::move(nodes), std::move(edges));
    const ga::DegreeStats stats = ga::degree_stats(g);

    ga::EncoderConfig cfg;
    cfg.attribute_keys_target = {"name"};
    cfg.neighbor_value_budget = 10;
    const auto sample = ga::encode_node(g, stats, "a", cfg);
    CHECK(sample.text.find("name: short\n") != std::string::npos);
    CHECK(sample.text.find(std::string(500, 'z')) == std::string::npos); // key filtered
    CHECK(sample.text.find("- t | b | blob: " + std::string(10, 'w') + "\n") !=
          std::string::npos);

    ga::EncoderConfig tight;
    tight.target_value_budget = 8;
    const auto clipped = ga::encode_node(g, stats, "a", tight);
    CHECK(clipped.text.find("blob: " + std::string(8, 'z') + "\n") != std::string::npos);
    CHECK(clipped.text.find(std::string(9, 'z')) == std::string::npos);
}

TEST_CASE("encoding is a pure function of graph, config and id") {
    const ga::Graph g = fixture::build_graph();
    const ga::DegreeStats stats = ga::degree_stats(g);
    ga::EncoderConfig cfg;
    cfg.hops = 2;
    const auto a = ga::encode_node(g, stats, "g05", cfg);
    const auto b = ga::encode_node(g, stats, "g05", cfg);
    CHECK(a.text == b.text);

    const ga::Graph g2 = fixture::build_graph();
    const auto c = ga::encode_node(g2, ga::degree_stats(g2), "g05", cfg);
    CHECK(c.text == a.text);
}

TEST_CASE("sample_neighbors matches the argmax-selection oracle on random graphs") {
    std::mt19937_64 rng(1337);
    for (int trial = 0; trial < 500; ++trial) {
        const size_t n = 2 + rng() % 199;
        std::vector<ga::Node> nodes;
        for (size_t i = 0; i < n; ++i) {
            nodes.push_back({"n" + std::to_string(i),
                             "t" + std::to_string(rng() % 5), {}, {}});
        }
        std::vector<ga::Edge> edges;
        const size_t m = rng() % (3 * n);
        for (size_t i = 0; i < m; ++i) {
            edges.push_back({"n" + std::to_string(rng() % n),
                             "n" + std::to_string(rng() % n), "e"});
        }
        const ga::Graph g(std::move(nodes), std::move(edges));
        const ga::DegreeStats stats = ga::degree_stats(g);

        // Random unique candidate subset in random order.
        std::vector<ga::NodeId> candidates;
        for (size_t i = 0; i < n; ++i) {
            if (rng() % 2 == 0) candidates.push_back("n" + std::to_string(i));
        }
        std::shuffle(candidates.begin(), candidates.end(), rng);
        const int k = int(rng() % 12);

        const auto got = ga::sample_neighbors(candidates, stats, k);
        const auto want = top_k_oracle(candidates, stats, size_t(k));
        REQUIRE(got == want);
    }
}

TEST_CASE("importance errors on unknown nodes and ranks ties by id") {
    const ga::Graph g = tiny_graph();
    const ga::DegreeStats stats = ga::degree_stats(g);
    CHECK_THROWS_AS(ga::importance(stats, "nope"), ga::Error);

    // n3 (pathway) and t1 (drug) both have importance exactly 1.0.
    const auto picked = ga::sample_neighbors({"t1", "n3"}, stats, 2);
    CHECK(picked == std::vector<ga::NodeId>{"n3", "t1"});
}

TEST_CASE("negative top_k is rejected") {
    const ga::Graph g = tiny_graph();
    const ga::DegreeStats stats = ga::degree_stats(g);
    CHECK_THROWS_AS(ga::sample_neighbors({"t1"}, stats, -1), ga::Error);
}
