#include "ga/evaluator.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <unordered_set>

#include "ga/errors.hpp"
#include "ga/parallel.hpp"
#include "ga/strings.hpp"

namespace ga {

namespace {

using SteadyClock = std::chrono::steady_clock;

int64_t ms_since(SteadyClock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(SteadyClock::now() - start)
        .count();
}

std::string env_or_empty(const std::string& name) {
    if (name.empty()) return {};
    const char* value = std::getenv(name.c_str());
    return value == nullptr ? std::string() : std::string(value);
}

std::string require_token(const std::string& env_name, const std::string& what) {
    if (env_name.empty()) return {};
    const std::string token = env_or_empty(env_name);
    if (token.empty()) {
        throw Error(ErrorCode::AuthFailure,
                    what + " auth token environment variable '" + env_name + "' is not set");
    }
    return token;
}

void check_options_parseable(const std::vector<std::string>& options) {
    if (options.empty()) {
        throw Error(ErrorCode::InvalidConfig, "node task resolved zero class options");
    }
    std::vector<std::string> lowered;
    for (const auto& opt : options) lowered.push_back(to_lower(opt));
    for (size_t i = 0; i < lowered.size(); ++i) {
        for (size_t j = 0; j < lowered.size(); ++j) {
            if (i != j && lowered[j].find(lowered[i]) != std::string::npos) {
                throw Error(ErrorCode::InvalidConfig,
                            "class option '" + options[i] + "' is a substring of '" +
                                options[j] + "'; answers would be ambiguous");
            }
        }
    }
}

void prepare_node_task(const RunConfig& cfg, PreparedTask& prep) {
    const std::vector<NodeId> ids = prep.graph.node_ids_of_type(cfg.node_task.target_type);
    if (ids.empty()) {
        throw Error(ErrorCode::InvalidConfig,
                    "no nodes of type '" + cfg.node_task.target_type + "' in the dataset");
    }
    std::unordered_map<std::string, std::string> label_of;
    std::set<std::string> seen_labels;
    for (const auto& id : ids) {
        const Node& node = prep.graph.node(id);
        if (!node.label.has_value() || node.label->empty()) {
            throw Error(ErrorCode::MalformedRecord,
                        "node '" + id + "' of task type '" + cfg.node_task.target_type +
                            "' has no label");
        }
        label_of[id] = *node.label;
        seen_labels.insert(*node.label);
    }

    std::vector<std::string> options = cfg.node_task.options;
    if (options.empty()) {
        options.assign(seen_labels.begin(), seen_labels.end());
    } else {
        for (const auto& label : seen_labels) {
            if (std::find(options.begin(), options.end(), label) == options.end()) {
                throw Error(ErrorCode::InvalidConfig,
                            "dataset label '" + label + "' is missing from node_task.options");
            }
        }
    }
    check_options_parseable(options);

    prep.split = split_dataset(ids, cfg.split.train, cfg.split.validation, cfg.split.test,
                               cfg.seeds.split);
    if (prep.split.test.empty()) {
        throw Error(ErrorCode::EmptySplit, "test split is empty; adjust ratios or dataset");
    }

    prep.task.kind = TaskKind::NodeClassification;
    prep.task.options = std::move(options);

    for (const auto& id : prep.split.train) {
        prep.train_samples.push_back(encode_node(prep.graph, prep.stats, id, prep.task.encoder));
        prep.train_labels[id] = label_of.at(id);
    }
    for (const auto& id : prep.split.test) {
        prep.test_targets.push_back({SampleKind::Node, id, "", label_of.at(id)});
    }
}

void prepare_link_task(const RunConfig& cfg, PreparedTask& prep) {
    // Positive pairs, deduplicated across orientation and multi-edges.
    std::vector<Edge> positives;
    std::unordered_set<std::string> seen_pairs;
    for (const auto& edge : prep.graph.edges()) {
        if (edge.edge_type != cfg.link_task.edge_type) continue;
        const std::string key = edge.src < edge.dst ? edge.src + "\x1f" + edge.dst
                                                    : edge.dst + "\x1f" + edge.src;
        if (seen_pairs.insert(key).second) positives.push_back(edge);
    }
    if (positives.empty()) {
        throw Error(ErrorCode::InvalidConfig,
                    "no edges of type '" + cfg.link_task.edge_type + "' in the dataset");
    }

    const size_t negative_count = cfg.link_task.negative_count > 0
                                      ? size_t(cfg.link_task.negative_count)
                                      : positives.size();
    const std::vector<Edge> negatives =
        sample_negative_edges(prep.graph, cfg.link_task.src_type, cfg.link_task.dst_type,
                              negative_count, cfg.seeds.negative);

    // Merge negatives into the dataset before splitting so every slice holds
    // both labels.
    std::vector<std::string> keys;
    std::unordered_map<std::string, std::pair<Edge, std::string>> by_key;
    for (const auto& edge : positives) {
        const std::string key = edge_sample_id(edge.src, edge.dst);
        keys.push_back(key);
        by_key.emplace(key, std::make_pair(edge, std::string("positive")));
    }
    for (const auto& edge : negatives) {
        const std::string key = edge_sample_id(edge.src, edge.dst);
        keys.push_back(key);
        by_key.emplace(key, std::make_pair(edge, std::string("negative")));
    }

    prep.split = split_dataset(keys, cfg.split.train, cfg.split.validation, cfg.split.test,
                               cfg.seeds.split);
    if (prep.split.test.empty()) {
        throw Error(ErrorCode::EmptySplit, "test split is empty; adjust ratios or dataset");
    }

    prep.task.kind = TaskKind::LinkPrediction;

    for (const auto& key : prep.split.train) {
        const auto& [edge, label] = by_key.at(key);
        prep.train_samples.push_back(
            encode_edge(prep.graph, prep.stats, edge.src, edge.dst, prep.task.encoder));
        prep.train_labels[key] = label;
    }
    for (const auto& key : prep.split.test) {
        const auto& [edge, label] = by_key.at(key);
        prep.test_targets.push_back({SampleKind::Edge, edge.src, edge.dst,
                                     label == "positive" ? "TRUE" : "FALSE"});
    }
}

BinaryOutcome to_binary_outcome(const ReasoningTrace& trace) {
    BinaryOutcome out;
    out.truth = trace.truth == "TRUE";
    if (trace.parsed_answer.has_value()) {
        out.predicted = *trace.parsed_answer == "TRUE";
    }
    return out;
}

NodeOutcome to_node_outcome(const ReasoningTrace& trace) {
    return {trace.truth, trace.parsed_answer};
}

nlohmann::ordered_json binary_metrics_to_json(const BinaryMetrics& m) {
    return {{"accuracy", m.accuracy()},
            {"precision", m.precision()},
            {"recall", m.recall()},
            {"f1", m.f1()},
            {"counts",
             {{"tp", m.true_positives},
              {"fp", m.false_positives},
              {"tn", m.true_negatives},
              {"fn", m.false_negatives}}},
            {"unparseable", m.unparseable},
            {"total", m.total()}};
}

nlohmann::ordered_json node_metrics_to_json(const NodeMetrics& m) {
    nlohmann::ordered_json per_class;
    for (const auto& [label, counts] : m.per_class) {
        per_class[label] = {{"support", counts.support},
                            {"correct", counts.correct},
                            {"accuracy", counts.accuracy()}};
    }
    return {{"accuracy", m.accuracy()},
            {"correct", m.correct},
            {"total", m.total},
            {"unparseable", m.unparseable},
            {"per_class", std::move(per_class)}};
}

std::string format_ratio(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", value);
    return buf;
}

} // namespace

PreparedTask prepare_task(const RunConfig& cfg) {
    validate_paths(cfg);
    PreparedTask prep{load_graph_files(cfg.dataset.nodes_path, cfg.dataset.edges_path),
                      {}, {}, {}, {}, {}, {}};
    prep.stats = degree_stats(prep.graph, cfg.workers);
    prep.task.examples = cfg.examples;
    prep.task.encoder = cfg.encoder;

    if (cfg.task == TaskKind::NodeClassification) {
        prepare_node_task(cfg, prep);
    } else {
        prepare_link_task(cfg, prep);
    }

    if (cfg.limit_test > 0 && size_t(cfg.limit_test) < prep.test_targets.size()) {
        prep.test_targets.resize(size_t(cfg.limit_test));
    }
    return prep;
}

std::unique_ptr<Embedder> make_embedder(const RunConfig& cfg) {
    if (cfg.embedding.provider == "hash") {
        return std::make_unique<HashEmbedder>(size_t(cfg.embedding.dim));
    }
    if (cfg.embedding.provider == "gnn") {
        return std::make_unique<GnnEmbedder>(
            import_gnn_embeddings_file(cfg.embedding.gnn_vectors_path));
    }
    HttpEmbedderConfig http;
    http.base_url = cfg.embedding.base_url;
    http.path = cfg.embedding.path;
    http.model = cfg.embedding.model;
    http.auth_token = require_token(cfg.embedding.auth_env, "embedding provider");
    return std::make_unique<HttpEmbedder>(std::move(http));
}

std::unique_ptr<Gateway> make_gateway(const RunConfig& cfg) {
    GatewayConfig gw;
    if (!cfg.backend.cache_mode.empty()) {
        gw.cache_mode = cache_mode_from_string(cfg.backend.cache_mode);
        gw.cache_dir = cfg.backend.cache_dir;
    }

    Gateway::BackendFactory factory;
    if (cfg.backend.kind == "mock-scripted") {
        auto rules = cfg.backend.script;
        factory = [rules]() { return scripted_mock(rules); };
    } else if (cfg.backend.kind == "mock-majority") {
        factory = []() -> std::unique_ptr<ChatBackend> {
            return std::make_unique<MajorityLabelBackend>();
        };
    } else {
        // Token resolution stays inside the factory: replay-mode runs never
        // construct the backend, so they need no credentials.
        const BackendConfig be = cfg.backend;
        factory = [be]() -> std::unique_ptr<ChatBackend> {
            HttpChatBackendConfig http;
            http.base_url = be.base_url;
            http.path = be.path;
            http.auth_token = require_token(be.auth_env, "chat backend");
            return std::make_unique<HttpChatBackend>(std::move(http));
        };
    }

    std::shared_ptr<RateLimiter> limiter;
    if (cfg.backend.rate_limit_per_minute > 0) {
        limiter = std::make_shared<RateLimiter>(cfg.backend.rate_limit_per_minute);
    }
    return std::make_unique<Gateway>(std::move(factory), gw, std::move(limiter));
}

std::string store_prefix(const RunConfig& cfg) {
    return (std::filesystem::path(cfg.output_dir) / "store").string();
}

void write_traces(const std::vector<ReasoningTrace>& traces, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::InvalidConfig, "cannot write trace file '" + path + "'");
    }
    for (const auto& trace : traces) {
        out << trace_to_json(trace).dump() << "\n";
    }
}

std::vector<ReasoningTrace> load_traces(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::MissingStore, "cannot open trace file '" + path + "'");
    }
    std::vector<ReasoningTrace> traces;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            traces.push_back(trace_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::MalformedRecord,
                        path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return traces;
}

BinaryMetrics binary_metrics_from_traces(const std::vector<ReasoningTrace>& traces) {
    std::vector<BinaryOutcome> outcomes;
    outcomes.reserve(traces.size());
    for (const auto& trace : traces) outcomes.push_back(to_binary_outcome(trace));
    return compute_binary_metrics(outcomes);
}

NodeMetrics node_metrics_from_traces(const std::vector<ReasoningTrace>& traces) {
    std::vector<NodeOutcome> outcomes;
    outcomes.reserve(traces.size());
    for (const auto& trace : traces) outcomes.push_back(to_node_outcome(trace));
    return compute_node_metrics(outcomes);
}

std::map<std::string, ClassCounts> per_label_from_traces(
    const std::vector<ReasoningTrace>& traces) {
    std::map<std::string, ClassCounts> per_label;
    for (const auto& trace : traces) {
        auto& counts = per_label[trace.truth];
        counts.support += 1;
        if (trace.parsed_answer.has_value() && *trace.parsed_answer == trace.truth) {
            counts.correct += 1;
        }
    }
    return per_label;
}

EvalResult run_evaluation(const RunConfig& cfg, const EvalOptions& options) {
    const auto run_start = SteadyClock::now();
    PreparedTask prep = prepare_task(cfg);
    auto embedder = make_embedder(cfg);
    auto gateway = make_gateway(cfg);

    std::optional<MemoryStore> owned_store;
    const MemoryStore* store = options.store;
    int64_t memorize_ms = 0;
    if (store == nullptr) {
        const auto t0 = SteadyClock::now();
        owned_store.emplace(memorize(prep.train_samples, prep.train_labels, *embedder));
        memorize_ms = ms_since(t0);
        store = &*owned_store;
    }

    AgentContext ctx;
    ctx.graph = &prep.graph;
    ctx.stats = &prep.stats;
    ctx.store = store;
    ctx.embedder = embedder.get();
    ctx.gateway = gateway.get();
    ctx.task = prep.task;
    ctx.model_name = cfg.backend.model;
    ctx.temperature = cfg.backend.temperature;
    ctx.max_output_tokens = cfg.backend.max_output_tokens;
    ctx.example_seed = cfg.seeds.example;
    ctx.record_timings = cfg.record_timings;

    ExampleSet fixed_examples;
    if (cfg.method == "kshot-cot") {
        fixed_examples = select_fixed_examples(*store, prep.task, cfg.seeds.example);
    }

    std::vector<ReasoningTrace> traces(prep.test_targets.size());
    const auto t1 = SteadyClock::now();
    parallel_for_dynamic(prep.test_targets.size(), cfg.workers, [&](size_t i) {
        const TargetSample& target = prep.test_targets[i];
        if (cfg.method == "simple-ask") {
            traces[i] = baseline_simple_ask(ctx, target);
        } else if (cfg.method == "kshot-cot") {
            traces[i] = baseline_kshot_cot(ctx, target, fixed_examples);
        } else {
            traces[i] = predict(ctx, target);
        }
    });
    const int64_t predict_ms = ms_since(t1);

    EvalResult result;
    result.traces = std::move(traces);

    RunReport& report = result.report;
    report.task = to_string(cfg.task);
    report.method = cfg.method;
    report.config_snapshot = run_config_to_json(cfg);
    report.split = prep.split;
    report.store_count = store->size();
    report.store_provenance = store->provenance();
    report.evaluated = result.traces.size();
    if (cfg.task == TaskKind::LinkPrediction) {
        report.link_metrics = binary_metrics_from_traces(result.traces);
        report.per_label_accuracy = per_label_from_traces(result.traces);
    } else {
        report.node_metrics = node_metrics_from_traces(result.traces);
    }
    for (const auto& trace : result.traces) {
        if (trace.error.has_value()) report.failed_samples += 1;
    }
    if (cfg.record_timings) {
        report.timings.memorize_ms = memorize_ms;
        report.timings.predict_ms = predict_ms;
        report.timings.total_ms = ms_since(run_start);
    }

    if (options.write_outputs) {
        std::filesystem::create_directories(cfg.output_dir);
        report.trace_path =
            (std::filesystem::path(cfg.output_dir) / "traces.jsonl").string();
        write_traces(result.traces, report.trace_path);
        const auto report_path = std::filesystem::path(cfg.output_dir) / "report.json";
        std::ofstream out(report_path, std::ios::binary | std::ios::trunc);
        out << report_to_json(report).dump(2) << "\n";
    }
    return result;
}

EvalResult run_node_classification(const RunConfig& cfg, const EvalOptions& options) {
    if (cfg.task != TaskKind::NodeClassification) {
        throw Error(ErrorCode::InvalidConfig, "config task is not node-classification");
    }
    return run_evaluation(cfg, options);
}

EvalResult run_link_prediction(const RunConfig& cfg, const EvalOptions& options) {
    if (cfg.task != TaskKind::LinkPrediction) {
        throw Error(ErrorCode::InvalidConfig, "config task is not link-prediction");
    }
    return run_evaluation(cfg, options);
}

nlohmann::ordered_json report_to_json(const RunReport& report) {
    nlohmann::ordered_json j;
    j["schema"] = "ga.report.v1";
    j["task"] = report.task;
    j["method"] = report.method;
    j["config"] = report.config_snapshot;
    j["split"] = {{"seed", report.split.seed},
                  {"train", report.split.train},
                  {"validation", report.split.validation},
                  {"test", report.split.test}};
    j["store"] = {{"count", report.store_count}, {"provenance", report.store_provenance}};
    j["evaluated"] = report.evaluated;
    if (report.link_metrics.has_value()) {
        j["metrics"] = binary_metrics_to_json(*report.link_metrics);
        nlohmann::ordered_json per_label;
        for (const auto& [label, counts] : report.per_label_accuracy) {
            per_label[label] = {{"support", counts.support},
                                {"correct", counts.correct},
                                {"accuracy", counts.accuracy()}};
        }
        j["per_label_accuracy"] = std::move(per_label);
    }
    if (report.node_metrics.has_value()) {
        j["metrics"] = node_metrics_to_json(*report.node_metrics);
    }
    j["trace_path"] = report.trace_path;
    j["failed_samples"] = report.failed_samples;
    j["timings"] = {{"memorize_ms", report.timings.memorize_ms},
                    {"predict_ms", report.timings.predict_ms},
                    {"total_ms", report.timings.total_ms}};
    return j;
}

std::string report_to_text(const RunReport& report) {
    std::string out;
    out += "== graph-agent evaluation report ==\n";
    out += "task:      " + report.task + "\n";
    out += "method:    " + report.method + "\n";
    out += "split:     train=" + std::to_string(report.split.train.size()) +
           " validation=" + std::to_string(report.split.validation.size()) +
           " test=" + std::to_string(report.split.test.size()) +
           " (seed " + std::to_string(report.split.seed) + ")\n";
    out += "store:     " + std::to_string(report.store_count) + " records, provenance " +
           report.store_provenance + "\n";
    out += "evaluated: " + std::to_string(report.evaluated) + "\n";
    if (report.link_metrics.has_value()) {
        const BinaryMetrics& m = *report.link_metrics;
        out += "\nmetric     value\n";
        out += "accuracy   " + format_ratio(m.accuracy()) + "\n";
        out += "precision  " + format_ratio(m.precision()) + "\n";
        out += "recall     " + format_ratio(m.recall()) + "\n";
        out += "f1         " + format_ratio(m.f1()) + "\n";
        out += "\ncounts: tp=" + std::to_string(m.true_positives) +
               " fp=" + std::to_string(m.false_positives) +
               " tn=" + std::to_string(m.true_negatives) +
               " fn=" + std::to_string(m.false_negatives) +
               " unparseable=" + std::to_string(m.unparseable) + "\n";
        for (const auto& [label, counts] : report.per_label_accuracy) {
            out += "accuracy[" + label + "] = " + format_ratio(counts.accuracy()) + " (" +
                   std::to_string(counts.correct) + "/" + std::to_string(counts.support) +
                   ")\n";
        }
    }
    if (report.node_metrics.has_value()) {
        const NodeMetrics& m = *report.node_metrics;
        out += "\naccuracy   " + format_ratio(m.accuracy()) + " (" +
               std::to_string(m.correct) + "/" + std::to_string(m.total) + ")\n";
        out += "unparseable " + std::to_string(m.unparseable) + "\n";
        out += "\nclass accuracy:\n";
        for (const auto& [label, counts] : m.per_class) {
            out += "  " + label + ": " + format_ratio(counts.accuracy()) + " (" +
                   std::to_string(counts.correct) + "/" + std::to_string(counts.support) +
                   ")\n";
        }
    }
    if (report.failed_samples > 0) {
        out += "\nfailed samples: " + std::to_string(report.failed_samples) + "\n";
    }
    if (!report.trace_path.empty()) {
        out += "traces: " + report.trace_path + "\n";
    }
    if (report.timings.total_ms > 0) {
        out += "timings: memorize=" + std::to_string(report.timings.memorize_ms) +
               "ms predict=" + std::to_string(report.timings.predict_ms) +
               "ms total=" + std::to_string(report.timings.total_ms) + "ms\n";
    }
    return out;
}

} // namespace ga
