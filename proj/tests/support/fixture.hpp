#pragma once

// Shared synthetic fixture: a 60-node / 150-edge heterogeneous graph (drugs,
// genes, pathways) with class-correlated gene vocabulary so hash-embedding
// retrieval clusters by label, plus config builders and a tiny HTTP test
// server for backend tests.

#include <atomic>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "ga/graph.hpp"
#include "ga/llm.hpp"

namespace fixture {

inline constexpr const char* kNodeOptions[] = {"channel-group", "kinase-group",
                                               "transcription-group"};

struct Paths {
    std::string dir;
    std::string nodes;
    std::string edges;
};

// Fresh directory under the system temp root; never reused across calls.
std::string unique_temp_dir(const std::string& tag);

std::vector<ga::Node> fixture_nodes();
std::vector<ga::Edge> fixture_edges();
ga::Graph build_graph();

Paths write_dataset(const std::string& dir);

// Deterministic per-node vectors for the GNN-provenance ablation.
std::string write_gnn_vectors(const std::string& dir, size_t dim);

std::vector<ga::MockRule> node_script();
std::vector<ga::MockRule> link_script(const std::string& verdict = "TRUE");

nlohmann::ordered_json node_config(const Paths& paths, const std::string& out_dir);
nlohmann::ordered_json link_config(const Paths& paths, const std::string& out_dir);

std::string write_config(const nlohmann::ordered_json& config, const std::string& dir,
                         const std::string& name = "config.json");

// httplib server on an ephemeral localhost port, serving from a background
// thread until destruction.
class TestServer {
public:
    TestServer() = default;
    ~TestServer() { stop(); }

    httplib::Server& server() { return server_; }

    void start();
    void stop();
    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }
    int port() const { return port_; }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

// Canned OpenAI-style chat completion body.
std::string chat_completion_body(const std::string& content,
                                 const std::string& finish_reason = "stop");

} // namespace fixture
