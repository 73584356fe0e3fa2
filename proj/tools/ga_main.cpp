#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ga/config.hpp"
#include "ga/errors.hpp"
#include "ga/evaluator.hpp"
#include "ga/strings.hpp"

namespace {

struct Overrides {
    std::optional<std::string> output_dir;
    std::optional<std::string> method;
    std::optional<std::string> cache_mode;
    std::optional<std::string> cache_dir;
    std::optional<int> workers;
    std::optional<int> hops;
    std::optional<int> top_k;
    std::optional<int64_t> limit_test;
    bool record_timings = false;
};

// Config file is the source of truth; flags win where given.
ga::RunConfig load_config(const std::string& path, const Overrides& ov) {
    ga::RunConfig cfg = ga::load_run_config(path);
    if (ov.output_dir) cfg.output_dir = *ov.output_dir;
    if (ov.method) cfg.method = *ov.method;
    if (ov.cache_mode) cfg.backend.cache_mode = *ov.cache_mode;
    if (ov.cache_dir) cfg.backend.cache_dir = *ov.cache_dir;
    if (!cfg.backend.cache_mode.empty()) {
        ga::cache_mode_from_string(cfg.backend.cache_mode);
        if (cfg.backend.cache_dir.empty()) {
            throw ga::Error(ga::ErrorCode::InvalidConfig,
                            "cache_dir is required when cache_mode is set");
        }
    }
    if (ov.workers) cfg.workers = *ov.workers;
    if (ov.hops) cfg.encoder.hops = *ov.hops;
    if (ov.top_k) cfg.encoder.top_k = *ov.top_k;
    if (ov.limit_test) cfg.limit_test = *ov.limit_test;
    if (ov.record_timings) cfg.record_timings = true;
    return cfg;
}

int cmd_ingest(const ga::RunConfig& cfg) {
    ga::validate_paths(cfg);
    const ga::Graph graph =
        ga::load_graph_files(cfg.dataset.nodes_path, cfg.dataset.edges_path);
    const ga::DegreeStats stats = ga::degree_stats(graph, cfg.workers);

    std::cout << "nodes: " << ga::with_thousands(int64_t(graph.node_count())) << "\n";
    std::cout << "edges: " << ga::with_thousands(int64_t(graph.edge_count())) << "\n";
    std::cout << "total: " << ga::with_thousands(int64_t(graph.edge_count()))
              << " edges\n";
    std::cout << "node types:\n";
    for (const auto& [type, count] : graph.node_counts_by_type()) {
        const double avg = stats.avg_degree_by_type.at(type);
        std::cout << "  " << type << ": " << ga::with_thousands(count)
                  << " (avg degree " << avg << ")\n";
    }
    std::map<std::string, int64_t> edge_types;
    for (const auto& edge : graph.edges()) edge_types[edge.edge_type] += 1;
    std::cout << "edge types:\n";
    for (const auto& [type, count] : edge_types) {
        std::cout << "  " << type << ": " << ga::with_thousands(count) << "\n";
    }
    std::cout << "validation: ok\n";
    return 0;
}

int cmd_memorize(const ga::RunConfig& cfg) {
    ga::PreparedTask prep = ga::prepare_task(cfg);
    auto embedder = ga::make_embedder(cfg);
    const ga::MemoryStore store =
        ga::memorize(prep.train_samples, prep.train_labels, *embedder);
    std::filesystem::create_directories(cfg.output_dir);
    const std::string prefix = ga::store_prefix(cfg);
    ga::save_store(store, prefix);
    std::cout << "memorized " << store.size() << " samples (provenance "
              << store.provenance() << ")\n";
    std::cout << "store: " << prefix << ".bin\n";
    std::cout << "manifest: " << prefix << ".json\n";
    return 0;
}

int cmd_evaluate(const ga::RunConfig& cfg) {
    const std::string prefix = ga::store_prefix(cfg);
    if (!std::filesystem::exists(prefix + ".bin") ||
        !std::filesystem::exists(prefix + ".json")) {
        throw ga::Error(ga::ErrorCode::MissingStore,
                        "no memorized store under '" + prefix +
                            "'; run 'ga memorize' first");
    }
    const ga::MemoryStore store = ga::load_store(prefix);
    ga::EvalOptions options;
    options.store = &store;
    const ga::EvalResult result = ga::run_evaluation(cfg, options);
    std::cout << ga::report_to_text(result.report);
    std::cout << "report: "
              << (std::filesystem::path(cfg.output_dir) / "report.json").string() << "\n";
    return result.report.failed_samples > 0 ? 2 : 0;
}

std::string explain_text(const ga::ReasoningTrace& trace) {
    std::string out;
    out += "== trace: " + trace.target + " ==\n";
    out += "kind:    " + std::string(ga::to_string(trace.kind)) + "\n";
    out += "method:  " + trace.method + "\n";
    out += "truth:   " + trace.truth + "\n";
    out += "\n-- retrieved examples --\n";
    if (trace.examples.empty()) {
        out += "(none)\n";
    }
    for (const auto& ex : trace.examples) {
        out += ex.sample_id + "  label=" + ex.label +
               "  similarity=" + std::to_string(ex.similarity) + "\n";
    }
    if (trace.insufficient_examples) {
        out += "(fewer examples than the policy requested)\n";
    }
    out += "\n-- inductive prompt --\n" +
           (trace.inductive_prompt.empty() ? "(skipped)\n" : trace.inductive_prompt + "\n");
    out += "\n-- induced reasons --\n" +
           (trace.induced_reasons.empty() ? "(none)\n" : trace.induced_reasons + "\n");
    out += "\n-- deductive prompt --\n" + trace.deductive_prompt + "\n";
    out += "\n-- model response --\n" + trace.deductive_response + "\n";
    out += "\n-- answer --\n";
    out += "parsed: " + (trace.parsed_answer ? *trace.parsed_answer : "(unparseable)") +
           "\n";
    out += "truth:  " + trace.truth + "\n";
    if (trace.degraded) out += "note: proceeded without induced reasons\n";
    if (trace.error) {
        out += "error: stage=" + trace.error->stage + " code=" + trace.error->code +
               " message=" + trace.error->message + "\n";
    }
    return out;
}

int cmd_explain(const ga::RunConfig& cfg, const std::string& sample_id,
                std::string trace_path, bool as_json, bool live) {
    if (live) {
        // Run the pipeline for this one sample instead of reading a trace.
        ga::PreparedTask prep = ga::prepare_task(cfg);
        auto embedder = ga::make_embedder(cfg);
        auto gateway = ga::make_gateway(cfg);
        const ga::MemoryStore store =
            ga::memorize(prep.train_samples, prep.train_labels, *embedder);

        ga::AgentContext ctx;
        ctx.graph = &prep.graph;
        ctx.stats = &prep.stats;
        ctx.store = &store;
        ctx.embedder = embedder.get();
        ctx.gateway = gateway.get();
        ctx.task = prep.task;
        ctx.model_name = cfg.backend.model;
        ctx.temperature = cfg.backend.temperature;
        ctx.max_output_tokens = cfg.backend.max_output_tokens;
        ctx.example_seed = cfg.seeds.example;
        ctx.record_timings = cfg.record_timings;

        std::optional<ga::TargetSample> target;
        for (const auto& candidate : prep.test_targets) {
            if (candidate.key() == sample_id) target = candidate;
        }
        if (!target) {
            throw ga::Error(ga::ErrorCode::UnknownSample,
                            "sample '" + sample_id + "' is not in the test split");
        }
        const ga::ReasoningTrace trace = ga::predict(ctx, *target);
        if (as_json) {
            std::cout << ga::trace_to_json(trace).dump(2) << "\n";
        } else {
            std::cout << explain_text(trace);
        }
        return 0;
    }

    if (trace_path.empty()) {
        trace_path = (std::filesystem::path(cfg.output_dir) / "traces.jsonl").string();
    }
    const auto traces = ga::load_traces(trace_path);
    for (const auto& trace : traces) {
        if (trace.target == sample_id) {
            if (as_json) {
                std::cout << ga::trace_to_json(trace).dump(2) << "\n";
            } else {
                std::cout << explain_text(trace);
            }
            return 0;
        }
    }
    throw ga::Error(ga::ErrorCode::UnknownSample,
                    "sample '" + sample_id + "' not found in " + trace_path);
}

int cmd_report(const ga::RunConfig& cfg, std::string trace_path, bool as_json) {
    if (trace_path.empty()) {
        trace_path = (std::filesystem::path(cfg.output_dir) / "traces.jsonl").string();
    }
    const auto traces = ga::load_traces(trace_path);
    if (traces.empty()) {
        throw ga::Error(ga::ErrorCode::EmptySplit, "trace file has no entries");
    }

    // Recompute everything from the traces; the persisted report is derived.
    ga::RunReport report;
    report.task = ga::to_string(cfg.task);
    report.method = traces.front().method;
    report.config_snapshot = ga::run_config_to_json(cfg);
    report.evaluated = traces.size();
    report.trace_path = trace_path;
    if (cfg.task == ga::TaskKind::LinkPrediction) {
        report.link_metrics = ga::binary_metrics_from_traces(traces);
        report.per_label_accuracy = ga::per_label_from_traces(traces);
    } else {
        report.node_metrics = ga::node_metrics_from_traces(traces);
    }
    for (const auto& trace : traces) {
        if (trace.error.has_value()) report.failed_samples += 1;
    }
    if (as_json) {
        std::cout << ga::report_to_json(report).dump(2) << "\n";
    } else {
        std::cout << ga::report_to_text(report);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph-agent: training-free knowledge-graph reasoning over LLMs"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;
    std::string sample_id;
    std::string trace_path;
    bool as_json = false;
    bool live = false;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("-c,--config", config_path, "run configuration file (JSON)")
            ->required();
        cmd->add_option("--output-dir", ov.output_dir, "override output directory");
        cmd->add_option("--workers", ov.workers, "override worker count");
    };

    CLI::App* ingest = app.add_subcommand("ingest", "validate the dataset and print stats");
    add_common(ingest);

    CLI::App* memorize = app.add_subcommand("memorize", "embed the train split into a store");
    add_common(memorize);

    CLI::App* evaluate = app.add_subcommand("evaluate", "run batch prediction and report");
    add_common(evaluate);
    evaluate->add_option("--method", ov.method, "graph-agent | simple-ask | kshot-cot");
    evaluate->add_option("--cache-mode", ov.cache_mode, "record | replay | passthrough");
    evaluate->add_option("--cache-dir", ov.cache_dir, "replay cache directory");
    evaluate->add_option("--limit-test", ov.limit_test, "cap the number of test samples");
    evaluate->add_option("--hops", ov.hops, "override encoder hop depth");
    evaluate->add_option("--top-k", ov.top_k, "override neighbor sampling budget");
    evaluate->add_flag("--record-timings", ov.record_timings,
                       "include wall times in traces and report");

    CLI::App* explain = app.add_subcommand("explain", "pretty-print one reasoning trace");
    add_common(explain);
    explain->add_option("-s,--sample", sample_id, "sample id (node id or 'src|dst')")
        ->required();
    explain->add_option("--trace-file", trace_path, "trace file (default <out>/traces.jsonl)");
    explain->add_flag("--json", as_json, "emit the raw trace JSON");
    explain->add_flag("--live", live, "run the pipeline instead of reading traces");

    CLI::App* report = app.add_subcommand("report", "recompute metrics from a trace file");
    add_common(report);
    report->add_option("--trace-file", trace_path, "trace file (default <out>/traces.jsonl)");
    report->add_flag("--json", as_json, "emit the report as JSON");

    try {
        app.parse(argc, argv);
        const ga::RunConfig cfg = load_config(config_path, ov);
        if (ingest->parsed()) return cmd_ingest(cfg);
        if (memorize->parsed()) return cmd_memorize(cfg);
        if (evaluate->parsed()) return cmd_evaluate(cfg);
        if (explain->parsed()) return cmd_explain(cfg, sample_id, trace_path, as_json, live);
        if (report->parsed()) return cmd_report(cfg, trace_path, as_json);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ga::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return int(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
