#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ga/config.hpp"
#include "ga/graph.hpp"
#include "ga/memory.hpp"
#include "ga/metrics.hpp"
#include "ga/reasoner.hpp"

#include <json.hpp>

namespace ga {

// All zero unless the run recorded timings.
struct TimingTotals {
    int64_t memorize_ms = 0;
    int64_t predict_ms = 0;
    int64_t total_ms = 0;
};

// Derived view of one evaluation run. The trace file is authoritative: every
// metric here is recomputable from it (and tests do exactly that).
struct RunReport {
    std::string task;
    std::string method;
    nlohmann::ordered_json config_snapshot;
    Split split;
    size_t store_count = 0;
    std::string store_provenance;
    size_t evaluated = 0;
    std::optional<BinaryMetrics> link_metrics;
    std::optional<NodeMetrics> node_metrics;
    // Link tasks: accuracy per truth label (TRUE / FALSE), covering the
    // "accuracy of the positive edges" reading alongside overall accuracy.
    std::map<std::string, ClassCounts> per_label_accuracy;
    std::string trace_path;
    int64_t failed_samples = 0;
    TimingTotals timings;
};

nlohmann::ordered_json report_to_json(const RunReport& report);
std::string report_to_text(const RunReport& report);

// Dataset preparation shared by the CLI and the run_* entry points: load the
// graph, compute degree stats, resolve the task samples, and split.
struct PreparedTask {
    Graph graph;
    DegreeStats stats;
    TaskSpec task;
    Split split;
    std::vector<EncodedSample> train_samples;
    std::unordered_map<std::string, std::string> train_labels;
    std::vector<TargetSample> test_targets;
};

PreparedTask prepare_task(const RunConfig& cfg);

std::unique_ptr<Embedder> make_embedder(const RunConfig& cfg);
std::unique_ptr<Gateway> make_gateway(const RunConfig& cfg);

struct EvalOptions {
    // Preloaded store (e.g. from `ga memorize`); null memorizes in-process.
    const MemoryStore* store = nullptr;
    // Write traces.jsonl + report.json under cfg.output_dir.
    bool write_outputs = true;
};

struct EvalResult {
    RunReport report;
    std::vector<ReasoningTrace> traces;
};

EvalResult run_evaluation(const RunConfig& cfg, const EvalOptions& options = {});
EvalResult run_node_classification(const RunConfig& cfg, const EvalOptions& options = {});
EvalResult run_link_prediction(const RunConfig& cfg, const EvalOptions& options = {});

// Trace persistence and the metrics-from-traces round trip.
void write_traces(const std::vector<ReasoningTrace>& traces, const std::string& path);
std::vector<ReasoningTrace> load_traces(const std::string& path);
BinaryMetrics binary_metrics_from_traces(const std::vector<ReasoningTrace>& traces);
NodeMetrics node_metrics_from_traces(const std::vector<ReasoningTrace>& traces);
std::map<std::string, ClassCounts> per_label_from_traces(const std::vector<ReasoningTrace>& traces);

// Store location used by `ga memorize` / `ga evaluate`.
std::string store_prefix(const RunConfig& cfg);

} // namespace ga
