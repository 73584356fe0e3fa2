#include "ga/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "ga/errors.hpp"

namespace ga {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw Error(ErrorCode::InvalidConfig, message);
}

const nlohmann::json& section(const nlohmann::json& j, const char* key) {
    require(j.contains(key) && j.at(key).is_object(),
            std::string("config section '") + key + "' is required");
    return j.at(key);
}

void check_one_of(const std::string& value, const std::set<std::string>& allowed,
                  const std::string& field) {
    require(allowed.count(value) != 0, "invalid " + field + " '" + value + "'");
}

} // namespace

RunConfig run_config_from_json(const nlohmann::json& j) {
    require(j.is_object(), "config root must be a JSON object");
    RunConfig cfg;

    require(j.contains("task") && j.at("task").is_string(), "config field 'task' is required");
    cfg.task = task_kind_from_string(j.at("task").get<std::string>());

    const auto& dataset = section(j, "dataset");
    require(dataset.contains("nodes") && dataset.contains("edges"),
            "dataset requires 'nodes' and 'edges' paths");
    cfg.dataset.nodes_path = dataset.at("nodes").get<std::string>();
    cfg.dataset.edges_path = dataset.at("edges").get<std::string>();

    if (cfg.task == TaskKind::NodeClassification) {
        const auto& nt = section(j, "node_task");
        require(nt.contains("target_type"), "node_task requires 'target_type'");
        cfg.node_task.target_type = nt.at("target_type").get<std::string>();
        if (nt.contains("options")) {
            cfg.node_task.options = nt.at("options").get<std::vector<std::string>>();
        }
    } else {
        const auto& lt = section(j, "link_task");
        require(lt.contains("edge_type") && lt.contains("src_type") && lt.contains("dst_type"),
                "link_task requires 'edge_type', 'src_type' and 'dst_type'");
        cfg.link_task.edge_type = lt.at("edge_type").get<std::string>();
        cfg.link_task.src_type = lt.at("src_type").get<std::string>();
        cfg.link_task.dst_type = lt.at("dst_type").get<std::string>();
        cfg.link_task.negative_count = lt.value("negative_count", int64_t(-1));
        require(cfg.link_task.negative_count == -1 || cfg.link_task.negative_count > 0,
                "link_task.negative_count must be -1 (match positives) or > 0");
    }

    if (j.contains("encoder")) {
        const auto& enc = j.at("encoder");
        cfg.encoder.hops = enc.value("hops", 1);
        require(cfg.encoder.hops >= 1 && cfg.encoder.hops <= 8,
                "encoder.hops must be between 1 and 8");
        if (enc.contains("top_k")) {
            cfg.encoder.top_k = enc.at("top_k").get<int>();
            cfg.encoder_top_k_explicit = true;
            require(cfg.encoder.top_k >= 1, "encoder.top_k must be >= 1");
        }
        if (enc.contains("attribute_keys_target")) {
            cfg.encoder.attribute_keys_target =
                enc.at("attribute_keys_target").get<std::vector<std::string>>();
        }
        if (enc.contains("attribute_keys_neighbor")) {
            cfg.encoder.attribute_keys_neighbor =
                enc.at("attribute_keys_neighbor").get<std::vector<std::string>>();
        }
        cfg.encoder.mask_target_label = enc.value("mask_target_label", true);
        cfg.encoder.target_value_budget = enc.value("target_value_budget", 1200);
        cfg.encoder.neighbor_value_budget = enc.value("neighbor_value_budget", 300);
        require(cfg.encoder.target_value_budget > 0 && cfg.encoder.neighbor_value_budget > 0,
                "encoder value budgets must be positive");
    }
    if (!cfg.encoder_top_k_explicit) {
        // Paper defaults: top-8 neighbors for node tasks, top-15 for link tasks.
        cfg.encoder.top_k = cfg.task == TaskKind::NodeClassification ? 8 : 15;
    }

    if (j.contains("embedding")) {
        const auto& emb = j.at("embedding");
        cfg.embedding.provider = emb.value("provider", std::string("hash"));
        check_one_of(cfg.embedding.provider, {"hash", "http", "gnn"}, "embedding.provider");
        cfg.embedding.dim = emb.value("dim", 64);
        require(cfg.embedding.dim >= 1, "embedding.dim must be >= 1");
        cfg.embedding.base_url = emb.value("base_url", std::string());
        cfg.embedding.path = emb.value("path", std::string("/embed"));
        cfg.embedding.model = emb.value("model", std::string("embedding-ada-002"));
        cfg.embedding.auth_env = emb.value("auth_env", std::string("GA_EMBED_TOKEN"));
        cfg.embedding.gnn_vectors_path = emb.value("gnn_vectors", std::string());
        if (cfg.embedding.provider == "http") {
            require(!cfg.embedding.base_url.empty(),
                    "embedding.base_url is required for the http provider");
        }
        if (cfg.embedding.provider == "gnn") {
            require(!cfg.embedding.gnn_vectors_path.empty(),
                    "embedding.gnn_vectors is required for the gnn provider");
        }
    }

    if (j.contains("backend")) {
        const auto& be = j.at("backend");
        cfg.backend.kind = be.value("kind", std::string("mock-scripted"));
        check_one_of(cfg.backend.kind, {"http", "mock-scripted", "mock-majority"},
                     "backend.kind");
        cfg.backend.model = be.value("model", std::string("gpt-4-0613"));
        cfg.backend.temperature = be.value("temperature", 0.0);
        cfg.backend.max_output_tokens = be.value("max_output_tokens", 1024);
        require(cfg.backend.max_output_tokens >= 1,
                "backend.max_output_tokens must be >= 1");
        cfg.backend.base_url = be.value("base_url", std::string());
        cfg.backend.path = be.value("path", std::string("/v1/chat/completions"));
        cfg.backend.auth_env = be.value("auth_env", std::string("GA_CHAT_TOKEN"));
        cfg.backend.rate_limit_per_minute = be.value("rate_limit_per_minute", 0);
        require(cfg.backend.rate_limit_per_minute >= 0,
                "backend.rate_limit_per_minute must be >= 0");
        cfg.backend.cache_mode = be.value("cache_mode", std::string());
        if (!cfg.backend.cache_mode.empty()) {
            cache_mode_from_string(cfg.backend.cache_mode); // validates
            cfg.backend.cache_dir = be.value("cache_dir", std::string());
            require(!cfg.backend.cache_dir.empty(),
                    "backend.cache_dir is required when cache_mode is set");
        } else {
            cfg.backend.cache_dir = be.value("cache_dir", std::string());
        }
        if (be.contains("script")) {
            for (const auto& rule : be.at("script")) {
                cfg.backend.script.push_back({rule.at("contains").get<std::string>(),
                                              rule.at("respond").get<std::string>()});
            }
        }
        if (cfg.backend.kind == "http") {
            require(!cfg.backend.base_url.empty(),
                    "backend.base_url is required for the http backend");
        }
    }

    if (j.contains("examples")) {
        const auto& ex = j.at("examples");
        cfg.examples.node_k = ex.value("node_k", 5);
        cfg.examples.link_positives = ex.value("link_positives", 3);
        cfg.examples.link_negatives = ex.value("link_negatives", 2);
        require(cfg.examples.node_k >= 1, "examples.node_k must be >= 1");
        require(cfg.examples.link_positives >= 0 && cfg.examples.link_negatives >= 0,
                "examples.link_positives/link_negatives must be >= 0");
        require(cfg.examples.link_positives + cfg.examples.link_negatives >= 1,
                "link example policy must request at least one example");
    }

    if (j.contains("split")) {
        const auto& sp = j.at("split");
        cfg.split.train = sp.value("train", 0.8);
        cfg.split.validation = sp.value("validation", 0.1);
        cfg.split.test = sp.value("test", 0.1);
    }

    require(j.contains("seeds") && j.at("seeds").is_object(),
            "config section 'seeds' is required; all seeds must be explicit");
    const auto& seeds = j.at("seeds");
    require(seeds.contains("split") && seeds.contains("negative") && seeds.contains("example"),
            "seeds requires 'split', 'negative' and 'example'");
    cfg.seeds.split = seeds.at("split").get<uint64_t>();
    cfg.seeds.negative = seeds.at("negative").get<uint64_t>();
    cfg.seeds.example = seeds.at("example").get<uint64_t>();

    cfg.workers = j.value("workers", 0);
    require(cfg.workers >= 0, "workers must be >= 0");
    cfg.output_dir = j.value("output_dir", std::string("out"));
    cfg.method = j.value("method", std::string("graph-agent"));
    check_one_of(cfg.method, {"graph-agent", "simple-ask", "kshot-cot"}, "method");
    cfg.record_timings = j.value("record_timings", false);
    cfg.limit_test = j.value("limit_test", int64_t(0));
    require(cfg.limit_test >= 0, "limit_test must be >= 0");

    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::InvalidConfig, "cannot open config file '" + path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig,
                    "config file '" + path + "' is not valid JSON: " + e.what());
    }
    return run_config_from_json(j);
}

nlohmann::ordered_json run_config_to_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["task"] = to_string(cfg.task);
    j["dataset"] = {{"nodes", cfg.dataset.nodes_path}, {"edges", cfg.dataset.edges_path}};
    if (cfg.task == TaskKind::NodeClassification) {
        j["node_task"] = {{"target_type", cfg.node_task.target_type},
                          {"options", cfg.node_task.options}};
    } else {
        j["link_task"] = {{"edge_type", cfg.link_task.edge_type},
                          {"src_type", cfg.link_task.src_type},
                          {"dst_type", cfg.link_task.dst_type},
                          {"negative_count", cfg.link_task.negative_count}};
    }
    j["encoder"] = {{"hops", cfg.encoder.hops},
                    {"top_k", cfg.encoder.top_k},
                    {"attribute_keys_target", cfg.encoder.attribute_keys_target},
                    {"attribute_keys_neighbor", cfg.encoder.attribute_keys_neighbor},
                    {"mask_target_label", cfg.encoder.mask_target_label},
                    {"target_value_budget", cfg.encoder.target_value_budget},
                    {"neighbor_value_budget", cfg.encoder.neighbor_value_budget}};
    nlohmann::ordered_json emb = {{"provider", cfg.embedding.provider},
                                  {"dim", cfg.embedding.dim},
                                  {"model", cfg.embedding.model},
                                  {"auth_env", cfg.embedding.auth_env}};
    if (!cfg.embedding.base_url.empty()) {
        emb["base_url"] = cfg.embedding.base_url;
        emb["path"] = cfg.embedding.path;
    }
    if (!cfg.embedding.gnn_vectors_path.empty()) {
        emb["gnn_vectors"] = cfg.embedding.gnn_vectors_path;
    }
    j["embedding"] = std::move(emb);
    nlohmann::ordered_json be = {{"kind", cfg.backend.kind},
                                 {"model", cfg.backend.model},
                                 {"temperature", cfg.backend.temperature},
                                 {"max_output_tokens", cfg.backend.max_output_tokens},
                                 {"auth_env", cfg.backend.auth_env},
                                 {"rate_limit_per_minute", cfg.backend.rate_limit_per_minute}};
    if (!cfg.backend.base_url.empty()) {
        be["base_url"] = cfg.backend.base_url;
        be["path"] = cfg.backend.path;
    }
    if (!cfg.backend.cache_mode.empty()) be["cache_mode"] = cfg.backend.cache_mode;
    if (!cfg.backend.cache_dir.empty()) be["cache_dir"] = cfg.backend.cache_dir;
    if (!cfg.backend.script.empty()) {
        auto script = nlohmann::ordered_json::array();
        for (const auto& rule : cfg.backend.script) {
            script.push_back({{"contains", rule.contains}, {"respond", rule.respond}});
        }
        be["script"] = std::move(script);
    }
    j["backend"] = std::move(be);
    j["examples"] = {{"node_k", cfg.examples.node_k},
                     {"link_positives", cfg.examples.link_positives},
                     {"link_negatives", cfg.examples.link_negatives}};
    j["split"] = {{"train", cfg.split.train},
                  {"validation", cfg.split.validation},
                  {"test", cfg.split.test}};
    j["seeds"] = {{"split", cfg.seeds.split},
                  {"negative", cfg.seeds.negative},
                  {"example", cfg.seeds.example}};
    j["workers"] = cfg.workers;
    j["output_dir"] = cfg.output_dir;
    j["method"] = cfg.method;
    j["record_timings"] = cfg.record_timings;
    j["limit_test"] = cfg.limit_test;
    return j;
}

void validate_paths(const RunConfig& cfg) {
    const auto check = [](const std::string& path, const std::string& what) {
        if (!path.empty() && !std::filesystem::exists(path)) {
            throw Error(ErrorCode::InvalidConfig, what + " '" + path + "' does not exist");
        }
    };
    check(cfg.dataset.nodes_path, "nodes file");
    check(cfg.dataset.edges_path, "edges file");
    if (cfg.embedding.provider == "gnn") {
        check(cfg.embedding.gnn_vectors_path, "gnn vectors file");
    }
}

} // namespace ga
