#include "support/fixture.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "ga/rng.hpp"

namespace fixture {

namespace {

std::string two_digits(int i) {
    return (i < 10 ? "0" : "") + std::to_string(i);
}

std::string drug_id(int i) { return "d" + two_digits(i); }
std::string gene_id(int i) { return "g" + two_digits(i); }
std::string pathway_id(int i) { return "p" + two_digits(i); }

// Class vocabulary never contains the label strings themselves ("-group"
// suffix keeps labels out of every encoded text).
const char* gene_summary_for_block(int block) {
    switch (block) {
        case 0: return "protein kinase with phosphorylation catalytic domain activity";
        case 1: return "transcription factor binding promoter dna elements";
        default: return "ion channel protein for membrane transport conductance";
    }
}

const char* gene_label_for_block(int block) {
    switch (block) {
        case 0: return "kinase-group";
        case 1: return "transcription-group";
        default: return "channel-group";
    }
}

} // namespace

std::string unique_temp_dir(const std::string& tag) {
    static std::atomic<uint64_t> counter{0};
    const auto dir = std::filesystem::temp_directory_path() /
                     ("ga_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                      std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(dir);
    return dir.string();
}

std::vector<ga::Node> fixture_nodes() {
    std::vector<ga::Node> nodes;
    const char* families[] = {"azole", "statin", "prazole", "cycline", "dipine"};
    for (int i = 0; i < 15; ++i) {
        ga::Node n;
        n.id = drug_id(i);
        n.node_type = "drug";
        n.attributes = {{"name", "drug-" + std::to_string(i)},
                        {"profile", std::string("small molecule of the ") + families[i % 5] +
                                        " family modulating cellular signaling"}};
        nodes.push_back(std::move(n));
    }
    for (int i = 0; i < 30; ++i) {
        const int block = i / 10;
        ga::Node n;
        n.id = gene_id(i);
        n.node_type = "gene";
        n.attributes = {{"name", "gene-" + std::to_string(i)},
                        {"summary", std::string(gene_summary_for_block(block)) +
                                        " variant v" + std::to_string(i)}};
        n.label = gene_label_for_block(block);
        nodes.push_back(std::move(n));
    }
    for (int i = 0; i < 15; ++i) {
        ga::Node n;
        n.id = pathway_id(i);
        n.node_type = "pathway";
        n.attributes = {{"name", "pathway-" + std::to_string(i)},
                        {"description", "signaling cascade stage " + std::to_string(i) +
                                            " coordinating cellular response"}};
        nodes.push_back(std::move(n));
    }
    return nodes;
}

std::vector<ga::Edge> fixture_edges() {
    std::vector<ga::Edge> edges;
    // 60 gene -> pathway edges, two per gene, within the gene's block.
    for (int i = 0; i < 30; ++i) {
        const int base = (i / 10) * 5;
        edges.push_back({gene_id(i), pathway_id(base + i % 5), "participates"});
        edges.push_back({gene_id(i), pathway_id(base + (i + 2) % 5), "participates"});
    }
    // 45 drug -> gene edges (the link-prediction positives).
    for (int i = 0; i < 15; ++i) {
        edges.push_back({drug_id(i), gene_id((2 * i) % 30), "targets"});
        edges.push_back({drug_id(i), gene_id((2 * i + 7) % 30), "targets"});
        edges.push_back({drug_id(i), gene_id((2 * i + 14) % 30), "targets"});
    }
    // 15 drug -> pathway edges.
    for (int i = 0; i < 15; ++i) {
        edges.push_back({drug_id(i), pathway_id(i), "affects"});
    }
    // 30 gene -> gene edges.
    for (int i = 0; i < 30; ++i) {
        edges.push_back({gene_id(i), gene_id((i + 3) % 30), "interacts"});
    }
    return edges;
}

ga::Graph build_graph() { return ga::Graph(fixture_nodes(), fixture_edges()); }

Paths write_dataset(const std::string& dir) {
    std::filesystem::create_directories(dir);
    Paths paths;
    paths.dir = dir;
    paths.nodes = (std::filesystem::path(dir) / "nodes.jsonl").string();
    paths.edges = (std::filesystem::path(dir) / "edges.jsonl").string();

    std::ofstream nodes_out(paths.nodes, std::ios::trunc);
    for (const auto& node : fixture_nodes()) {
        nlohmann::ordered_json j;
        j["id"] = node.id;
        j["type"] = node.node_type;
        nlohmann::ordered_json attrs;
        for (const auto& [k, v] : node.attributes) attrs[k] = v;
        j["attributes"] = std::move(attrs);
        if (node.label.has_value()) j["label"] = *node.label;
        nodes_out << j.dump() << "\n";
    }

    std::ofstream edges_out(paths.edges, std::ios::trunc);
    for (const auto& edge : fixture_edges()) {
        nlohmann::ordered_json j;
        j["src"] = edge.src;
        j["dst"] = edge.dst;
        j["type"] = edge.edge_type;
        edges_out << j.dump() << "\n";
    }
    return paths;
}

std::string write_gnn_vectors(const std::string& dir, size_t dim) {
    const auto path = (std::filesystem::path(dir) / "gnn_vectors.jsonl").string();
    std::ofstream out(path, std::ios::trunc);
    for (const auto& node : fixture_nodes()) {
        ga::SplitMix64 rng(ga::fnv1a64(node.id));
        nlohmann::ordered_json j;
        j["id"] = node.id;
        auto vec = nlohmann::ordered_json::array();
        for (size_t d = 0; d < dim; ++d) {
            vec.push_back(double(rng.next() % 2000) / 1000.0 - 1.0);
        }
        j["vector"] = std::move(vec);
        out << j.dump() << "\n";
    }
    return path;
}

std::vector<ga::MockRule> node_script() {
    return {
        {"List the reasons concisely.",
         "Shared summary vocabulary tracks the class: phosphorylation terms mark "
         "kinase-group, promoter terms mark transcription-group, transport terms mark "
         "channel-group."},
        {"*", "Step by step: the target summary matches the first pattern, so the "
              "answer is kinase-group."},
    };
}

std::vector<ga::MockRule> link_script(const std::string& verdict) {
    return {
        {"List the reasons concisely.",
         "Drugs connect to genes whose summaries overlap their profile vocabulary; "
         "absent overlap means no interaction."},
        {"*", "Step by step: comparing with the examples, the verdict is " + verdict + "."},
    };
}

nlohmann::ordered_json node_config(const Paths& paths, const std::string& out_dir) {
    nlohmann::ordered_json j;
    j["task"] = "node-classification";
    j["dataset"] = {{"nodes", paths.nodes}, {"edges", paths.edges}};
    j["node_task"] = {
        {"target_type", "gene"},
        {"options", {kNodeOptions[0], kNodeOptions[1], kNodeOptions[2]}}};
    j["encoder"] = {{"hops", 1}};
    j["embedding"] = {{"provider", "hash"}, {"dim", 64}};
    nlohmann::ordered_json script = nlohmann::ordered_json::array();
    for (const auto& rule : node_script()) {
        script.push_back({{"contains", rule.contains}, {"respond", rule.respond}});
    }
    j["backend"] = {{"kind", "mock-scripted"}, {"script", std::move(script)}};
    j["examples"] = {{"node_k", 5}, {"link_positives", 3}, {"link_negatives", 2}};
    j["split"] = {{"train", 0.7}, {"validation", 0.1}, {"test", 0.2}};
    j["seeds"] = {{"split", 17}, {"negative", 23}, {"example", 41}};
    j["workers"] = 2;
    j["output_dir"] = out_dir;
    j["method"] = "graph-agent";
    j["record_timings"] = false;
    return j;
}

nlohmann::ordered_json link_config(const Paths& paths, const std::string& out_dir) {
    nlohmann::ordered_json j;
    j["task"] = "link-prediction";
    j["dataset"] = {{"nodes", paths.nodes}, {"edges", paths.edges}};
    j["link_task"] = {{"edge_type", "targets"},
                      {"src_type", "drug"},
                      {"dst_type", "gene"},
                      {"negative_count", 50}};
    j["encoder"] = {{"hops", 1}};
    j["embedding"] = {{"provider", "hash"}, {"dim", 64}};
    nlohmann::ordered_json script = nlohmann::ordered_json::array();
    for (const auto& rule : link_script()) {
        script.push_back({{"contains", rule.contains}, {"respond", rule.respond}});
    }
    j["backend"] = {{"kind", "mock-scripted"}, {"script", std::move(script)}};
    j["examples"] = {{"node_k", 5}, {"link_positives", 3}, {"link_negatives", 2}};
    j["split"] = {{"train", 0.7}, {"validation", 0.1}, {"test", 0.2}};
    j["seeds"] = {{"split", 17}, {"negative", 23}, {"example", 41}};
    j["workers"] = 2;
    j["output_dir"] = out_dir;
    j["method"] = "graph-agent";
    j["record_timings"] = false;
    return j;
}

std::string write_config(const nlohmann::ordered_json& config, const std::string& dir,
                         const std::string& name) {
    const auto path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path, std::ios::trunc);
    out << config.dump(2) << "\n";
    return path;
}

void TestServer::start() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
}

void TestServer::stop() {
    if (thread_.joinable()) {
        server_.stop();
        thread_.join();
    }
}

std::string chat_completion_body(const std::string& content,
                                 const std::string& finish_reason) {
    nlohmann::ordered_json j;
    j["choices"] = {{{"message", {{"role", "assistant"}, {"content", content}}},
                     {"finish_reason", finish_reason}}};
    j["usage"] = {{"prompt_tokens", 42}, {"completion_tokens", 7}};
    return j.dump();
}

} // namespace fixture
