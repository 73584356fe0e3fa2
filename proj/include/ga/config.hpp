#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ga/encoder.hpp"
#include "ga/llm.hpp"
#include "ga/reasoner.hpp"

#include <json.hpp>

namespace ga {

struct DatasetConfig {
    std::string nodes_path;
    std::string edges_path;
};

struct NodeTaskConfig {
    std::string target_type;                // node type being classified
    std::vector<std::string> options;       // empty: derived from train labels
};

struct LinkTaskConfig {
    std::string edge_type;                  // positive edges for the task
    std::string src_type;
    std::string dst_type;
    int64_t negative_count = -1;            // -1: match the positive count
};

struct EmbeddingConfig {
    std::string provider = "hash";          // hash | http | gnn
    int dim = 64;                           // hash provider only
    std::string base_url;
    std::string path = "/embed";
    std::string model = "embedding-ada-002";
    std::string auth_env = "GA_EMBED_TOKEN";
    std::string gnn_vectors_path;           // gnn provider only
};

struct BackendConfig {
    std::string kind = "mock-scripted";     // http | mock-scripted | mock-majority
    std::string model = "gpt-4-0613";
    double temperature = 0.0;
    int max_output_tokens = 1024;
    std::string base_url;
    std::string path = "/v1/chat/completions";
    std::string auth_env = "GA_CHAT_TOKEN";
    int rate_limit_per_minute = 0;          // 0: unlimited
    std::string cache_mode;                 // "" | record | replay | passthrough
    std::string cache_dir;
    std::vector<MockRule> script;           // mock-scripted rules
};

struct SplitRatios {
    double train = 0.8;
    double validation = 0.1;
    double test = 0.1;
};

// All seeds are explicit in the config file; there is no implicit randomness.
struct Seeds {
    uint64_t split = 0;
    uint64_t negative = 0;
    uint64_t example = 0;
};

struct RunConfig {
    TaskKind task = TaskKind::NodeClassification;
    DatasetConfig dataset;
    NodeTaskConfig node_task;
    LinkTaskConfig link_task;
    EncoderConfig encoder;
    bool encoder_top_k_explicit = false;    // false: default 8 (node) / 15 (link)
    EmbeddingConfig embedding;
    BackendConfig backend;
    ExamplePolicy examples;
    SplitRatios split;
    Seeds seeds;
    int workers = 0;                        // 0: hardware concurrency
    std::string output_dir = "out";
    std::string method = "graph-agent";     // graph-agent | simple-ask | kshot-cot
    bool record_timings = false;
    int64_t limit_test = 0;                 // 0: evaluate the whole test split
};

// Parse + structural validation. Path existence is checked separately by
// validate_paths so configs can be built in-memory for tests.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

// Round-trippable snapshot embedded in every RunReport.
nlohmann::ordered_json run_config_to_json(const RunConfig& cfg);

// Throws Error(InvalidConfig) when a referenced file is missing.
void validate_paths(const RunConfig& cfg);

} // namespace ga
