#include "ga/reasoner.hpp"

#include <algorithm>
#include <chrono>
#include <utility>

#include "ga/errors.hpp"
#include "ga/prompts.hpp"
#include "ga/rng.hpp"
#include "ga/strings.hpp"

namespace ga {

namespace {

std::pair<std::string, std::string> edge_endpoints(const std::string& sample_id) {
    const auto sep = sample_id.find('|');
    if (sep == std::string::npos) {
        throw Error(ErrorCode::UnknownSample,
                    "sample id '" + sample_id + "' is not an edge id");
    }
    return {sample_id.substr(0, sep), sample_id.substr(sep + 1)};
}

// Display label shown under each example: option label for nodes, TRUE/FALSE
// for edges.
std::string display_label(const MemoryRecord& record, TaskKind kind) {
    if (kind == TaskKind::LinkPrediction) {
        return record.label == "positive" ? "TRUE" : "FALSE";
    }
    return record.label;
}

void append_examples(std::string& out, const ExampleSet& set, const TaskSpec& task) {
    for (size_t i = 0; i < set.examples.size(); ++i) {
        const MemoryRecord& rec = *set.examples[i].record;
        out += "example_" + std::to_string(i + 1) + ":\n";
        out += rec.encoded_text;
        out += "\nlabel: " + display_label(rec, task.kind) + "\n\n";
    }
}

std::string question_for(const TargetSample& target, const TaskSpec& task, bool simple_ask) {
    if (task.kind == TaskKind::NodeClassification) {
        const auto tmpl = simple_ask ? prompts::kSimpleAskNodeQuestion : prompts::kNodeQuestion;
        return prompts::substitute(tmpl, {{"node_a", target.a},
                                          {"options", join(task.options, ", ")}});
    }
    const auto tmpl = simple_ask ? prompts::kSimpleAskLinkQuestion : prompts::kLinkQuestion;
    return prompts::substitute(tmpl, {{"node_a", target.a}, {"node_b", target.b}});
}

std::vector<TraceExample> to_trace_examples(const ExampleSet& set) {
    std::vector<TraceExample> out;
    out.reserve(set.examples.size());
    for (const auto& ex : set.examples) {
        out.push_back({ex.record->sample_id, ex.record->label, ex.similarity});
    }
    return out;
}

ChatRequest make_request(const AgentContext& ctx, std::string user_text) {
    ChatRequest req;
    req.system_text = std::string(prompts::kSystemText);
    req.user_text = std::move(user_text);
    req.temperature = ctx.temperature;
    req.max_output_tokens = ctx.max_output_tokens;
    req.model_name = ctx.model_name;
    return req;
}

EncodedSample encode_target(const AgentContext& ctx,
                            const TargetSample& target,
                            const EncoderConfig& cfg) {
    if (target.kind == SampleKind::Node) {
        return encode_node(*ctx.graph, *ctx.stats, target.a, cfg);
    }
    return encode_edge(*ctx.graph, *ctx.stats, target.a, target.b, cfg);
}

void record_failure(ReasoningTrace& trace, const std::string& stage, const Error& e) {
    trace.error = StageError{stage, to_string(e.code()), e.what()};
}

void finish_timing(ReasoningTrace& trace,
                   const AgentContext& ctx,
                   std::chrono::steady_clock::time_point started) {
    if (!ctx.record_timings) return;
    const auto elapsed = std::chrono::steady_clock::now() - started;
    trace.wall_time_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
}

void parse_answer_into(ReasoningTrace& trace, const std::string& response,
                       const TaskSpec& task) {
    if (task.kind == TaskKind::NodeClassification) {
        trace.parsed_answer = parse_node_answer(response, task.options);
    } else {
        trace.parsed_answer = parse_link_answer(response) ? "TRUE" : "FALSE";
    }
}

} // namespace

std::string to_string(TaskKind kind) {
    return kind == TaskKind::NodeClassification ? "node-classification" : "link-prediction";
}

TaskKind task_kind_from_string(const std::string& text) {
    if (text == "node-classification") return TaskKind::NodeClassification;
    if (text == "link-prediction") return TaskKind::LinkPrediction;
    throw Error(ErrorCode::InvalidConfig, "unknown task kind '" + text + "'");
}

ExampleSet select_examples(const MemoryStore& store,
                           const TargetSample& target,
                           const EmbeddingVector& query,
                           const TaskSpec& task,
                           uint64_t seed) {
    ExampleSet out;
    const std::string target_key = target.key();

    if (task.kind == TaskKind::NodeClassification) {
        auto result = retrieve_similar(store, query, task.examples.node_k,
                                       [&](const MemoryRecord& rec) {
                                           return rec.kind == SampleKind::Node &&
                                                  rec.sample_id != target_key;
                                       });
        for (const auto& item : result.items) {
            out.examples.push_back({item.record, item.similarity});
        }
        out.insufficient = result.shortfall;
        return out;
    }

    // Link prediction: drop every memorized edge that shares an endpoint with
    // the query pair, otherwise the answer can leak straight from an example.
    const auto shares_endpoint = [&](const MemoryRecord& rec) {
        const auto [src, dst] = edge_endpoints(rec.sample_id);
        return src == target.a || src == target.b || dst == target.a || dst == target.b;
    };

    auto positives = retrieve_similar(store, query, task.examples.link_positives,
                                      [&](const MemoryRecord& rec) {
                                          return rec.kind == SampleKind::Edge &&
                                                 rec.label == "positive" &&
                                                 !shares_endpoint(rec);
                                      });
    for (const auto& item : positives.items) {
        out.examples.push_back({item.record, item.similarity});
        out.positives += 1;
    }

    std::vector<const MemoryRecord*> negative_pool;
    for (const auto& rec : store.records()) {
        if (rec.kind == SampleKind::Edge && rec.label == "negative" && !shares_endpoint(rec)) {
            negative_pool.push_back(&rec);
        }
    }
    const size_t want = size_t(std::max(0, task.examples.link_negatives));
    SplitMix64 rng(seed);
    const size_t picks = std::min(want, negative_pool.size());
    for (size_t i = 0; i < picks; ++i) {
        const size_t j = i + size_t(rng.next_below(uint64_t(negative_pool.size() - i)));
        std::swap(negative_pool[i], negative_pool[j]);
    }
    for (size_t i = 0; i < picks; ++i) {
        const MemoryRecord* rec = negative_pool[i];
        out.examples.push_back({rec, cosine_similarity(query, rec->vector)});
        out.negatives += 1;
    }

    out.insufficient = positives.shortfall || out.negatives < task.examples.link_negatives;
    return out;
}

ExampleSet select_fixed_examples(const MemoryStore& store,
                                 const TaskSpec& task,
                                 uint64_t seed) {
    ExampleSet out;
    SplitMix64 rng(seed);

    const auto draw = [&](std::vector<const MemoryRecord*>& pool, size_t want) {
        const size_t picks = std::min(want, pool.size());
        for (size_t i = 0; i < picks; ++i) {
            const size_t j = i + size_t(rng.next_below(uint64_t(pool.size() - i)));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(picks);
    };

    if (task.kind == TaskKind::NodeClassification) {
        std::vector<const MemoryRecord*> pool;
        for (const auto& rec : store.records()) pool.push_back(&rec);
        draw(pool, size_t(std::max(0, task.examples.node_k)));
        for (const auto* rec : pool) out.examples.push_back({rec, 0.0});
        out.insufficient = int(out.examples.size()) < task.examples.node_k;
        return out;
    }

    std::vector<const MemoryRecord*> pos, neg;
    for (const auto& rec : store.records()) {
        (rec.label == "positive" ? pos : neg).push_back(&rec);
    }
    draw(pos, size_t(std::max(0, task.examples.link_positives)));
    draw(neg, size_t(std::max(0, task.examples.link_negatives)));
    for (const auto* rec : pos) {
        out.examples.push_back({rec, 0.0});
        out.positives += 1;
    }
    for (const auto* rec : neg) {
        out.examples.push_back({rec, 0.0});
        out.negatives += 1;
    }
    out.insufficient = out.positives < task.examples.link_positives ||
                       out.negatives < task.examples.link_negatives;
    return out;
}

std::string build_inductive_prompt(const ExampleSet& examples, const TaskSpec& task) {
    std::string out;
    append_examples(out, examples, task);
    out += std::string(prompts::kInductiveInstruction);
    return out;
}

std::string build_deductive_prompt(const ExampleSet& examples,
                                   const std::string& reasons,
                                   const EncodedSample& target,
                                   const TargetSample& target_ref,
                                   const TaskSpec& task) {
    std::string out;
    append_examples(out, examples, task);
    if (!reasons.empty()) {
        out += "reasons:\n" + reasons + "\n\n";
    }
    out += "target:\n" + target.text + "\n\n";
    out += question_for(target_ref, task, /*simple_ask=*/false);
    return out;
}

std::string parse_node_answer(const std::string& response,
                              const std::vector<std::string>& options) {
    if (options.empty()) {
        throw Error(ErrorCode::InvalidConfig, "node task has no options");
    }
    std::vector<std::string> lowered;
    lowered.reserve(options.size());
    for (const auto& opt : options) lowered.push_back(to_lower(opt));
    for (size_t i = 0; i < lowered.size(); ++i) {
        for (size_t j = 0; j < lowered.size(); ++j) {
            if (i != j && lowered[j].find(lowered[i]) != std::string::npos) {
                throw Error(ErrorCode::InvalidConfig,
                            "option '" + options[i] + "' is a substring of '" +
                                options[j] + "'");
            }
        }
    }

    const std::string haystack = to_lower(response);
    size_t best_pos = std::string::npos;
    size_t best_index = 0;
    for (size_t i = 0; i < lowered.size(); ++i) {
        const size_t pos = haystack.rfind(lowered[i]);
        if (pos == std::string::npos) continue;
        if (best_pos == std::string::npos || pos > best_pos) {
            best_pos = pos;
            best_index = i;
        }
    }
    if (best_pos == std::string::npos) {
        throw Error(ErrorCode::UnparseableResponse,
                    "no option label found in model response");
    }
    return options[best_index];
}

bool parse_link_answer(const std::string& response) {
    const std::string haystack = to_lower(response);
    const size_t pos_true = haystack.rfind("true");
    const size_t pos_false = haystack.rfind("false");
    if (pos_true == std::string::npos && pos_false == std::string::npos) {
        throw Error(ErrorCode::UnparseableResponse,
                    "neither TRUE nor FALSE found in model response");
    }
    if (pos_true == std::string::npos) return false;
    if (pos_false == std::string::npos) return true;
    return pos_true > pos_false;
}

ReasoningTrace predict(const AgentContext& ctx, const TargetSample& target) {
    ReasoningTrace trace;
    trace.target = target.key();
    trace.kind = target.kind;
    trace.method = "graph-agent";
    trace.truth = target.truth;
    const auto started = std::chrono::steady_clock::now();

    EncoderConfig cfg = ctx.task.encoder;
    bool retried_overflow = false;

    while (true) {
        trace.error.reset();
        std::string stage = "encode";
        try {
            const EncodedSample encoded = encode_target(ctx, target, cfg);
            trace.target_text = encoded.text;

            stage = "embed";
            const EmbeddingVector query = ctx.embedder->embed({encoded}).at(0);

            stage = "select";
            const uint64_t seed = ctx.example_seed ^ fnv1a64(trace.target);
            const ExampleSet examples = select_examples(*ctx.store, target, query,
                                                        ctx.task, seed);
            trace.examples = to_trace_examples(examples);
            trace.insufficient_examples = examples.insufficient;

            stage = "induce";
            std::string reasons;
            if (!examples.examples.empty()) {
                trace.inductive_prompt = build_inductive_prompt(examples, ctx.task);
                const ChatResponse r =
                    ctx.gateway->complete(make_request(ctx, trace.inductive_prompt));
                reasons = trim(r.text);
            }
            trace.induced_reasons = reasons;
            trace.degraded = reasons.empty();

            stage = "deduce";
            const EncodedSample target_for_prompt{trace.target, target.kind,
                                                  trace.target_text, {}};
            trace.deductive_prompt = build_deductive_prompt(examples, reasons,
                                                            target_for_prompt,
                                                            target, ctx.task);
            const ChatResponse r =
                ctx.gateway->complete(make_request(ctx, trace.deductive_prompt));
            trace.deductive_response = r.text;

            stage = "parse";
            parse_answer_into(trace, trace.deductive_response, ctx.task);
            break;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ContextOverflow && !retried_overflow && cfg.top_k > 1) {
                // Halve the neighbor budget once and rebuild the prompts.
                retried_overflow = true;
                cfg.top_k = std::max(1, cfg.top_k / 2);
                continue;
            }
            record_failure(trace, stage, e);
            trace.parsed_answer.reset();
            break;
        } catch (const std::exception& e) {
            trace.error = StageError{stage, "unexpected", e.what()};
            trace.parsed_answer.reset();
            break;
        }
    }

    finish_timing(trace, ctx, started);
    return trace;
}

ReasoningTrace baseline_simple_ask(const AgentContext& ctx, const TargetSample& target) {
    ReasoningTrace trace;
    trace.target = target.key();
    trace.kind = target.kind;
    trace.method = "simple-ask";
    trace.truth = target.truth;
    const auto started = std::chrono::steady_clock::now();

    EncoderConfig cfg = ctx.task.encoder;
    bool retried_overflow = false;

    while (true) {
        trace.error.reset();
        std::string stage = "encode";
        try {
            const EncodedSample encoded = encode_target(ctx, target, cfg);
            trace.target_text = encoded.text;

            stage = "deduce";
            trace.deductive_prompt = "target:\n" + encoded.text + "\n\n" +
                                     question_for(target, ctx.task, /*simple_ask=*/true);
            const ChatResponse r =
                ctx.gateway->complete(make_request(ctx, trace.deductive_prompt));
            trace.deductive_response = r.text;

            stage = "parse";
            parse_answer_into(trace, trace.deductive_response, ctx.task);
            break;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ContextOverflow && !retried_overflow && cfg.top_k > 1) {
                retried_overflow = true;
                cfg.top_k = std::max(1, cfg.top_k / 2);
                continue;
            }
            record_failure(trace, stage, e);
            trace.parsed_answer.reset();
            break;
        } catch (const std::exception& e) {
            trace.error = StageError{stage, "unexpected", e.what()};
            trace.parsed_answer.reset();
            break;
        }
    }

    finish_timing(trace, ctx, started);
    return trace;
}

ReasoningTrace baseline_kshot_cot(const AgentContext& ctx,
                                  const TargetSample& target,
                                  const ExampleSet& fixed_examples) {
    ReasoningTrace trace;
    trace.target = target.key();
    trace.kind = target.kind;
    trace.method = "kshot-cot";
    trace.truth = target.truth;
    trace.examples = to_trace_examples(fixed_examples);
    trace.insufficient_examples = fixed_examples.insufficient;
    const auto started = std::chrono::steady_clock::now();

    EncoderConfig cfg = ctx.task.encoder;
    bool retried_overflow = false;

    while (true) {
        trace.error.reset();
        std::string stage = "encode";
        try {
            const EncodedSample encoded = encode_target(ctx, target, cfg);
            trace.target_text = encoded.text;

            stage = "deduce";
            std::string prompt;
            append_examples(prompt, fixed_examples, ctx.task);
            prompt += "target:\n" + encoded.text + "\n\n";
            prompt += question_for(target, ctx.task, /*simple_ask=*/false);
            trace.deductive_prompt = prompt;
            const ChatResponse r =
                ctx.gateway->complete(make_request(ctx, trace.deductive_prompt));
            trace.deductive_response = r.text;

            stage = "parse";
            parse_answer_into(trace, trace.deductive_response, ctx.task);
            break;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ContextOverflow && !retried_overflow && cfg.top_k > 1) {
                retried_overflow = true;
                cfg.top_k = std::max(1, cfg.top_k / 2);
                continue;
            }
            record_failure(trace, stage, e);
            trace.parsed_answer.reset();
            break;
        } catch (const std::exception& e) {
            trace.error = StageError{stage, "unexpected", e.what()};
            trace.parsed_answer.reset();
            break;
        }
    }

    finish_timing(trace, ctx, started);
    return trace;
}

nlohmann::ordered_json trace_to_json(const ReasoningTrace& trace) {
    nlohmann::ordered_json j;
    j["schema"] = "ga.trace.v1";
    j["target"] = trace.target;
    j["kind"] = to_string(trace.kind);
    j["method"] = trace.method;
    j["truth"] = trace.truth;
    auto examples = nlohmann::ordered_json::array();
    for (const auto& ex : trace.examples) {
        examples.push_back({{"sample_id", ex.sample_id},
                            {"label", ex.label},
                            {"similarity", ex.similarity}});
    }
    j["examples"] = std::move(examples);
    j["insufficient_examples"] = trace.insufficient_examples;
    j["target_text"] = trace.target_text;
    j["inductive_prompt"] = trace.inductive_prompt;
    j["induced_reasons"] = trace.induced_reasons;
    j["deductive_prompt"] = trace.deductive_prompt;
    j["deductive_response"] = trace.deductive_response;
    if (trace.parsed_answer.has_value()) {
        j["parsed_answer"] = *trace.parsed_answer;
    } else {
        j["parsed_answer"] = nullptr;
    }
    j["degraded"] = trace.degraded;
    if (trace.error.has_value()) {
        j["error"] = {{"stage", trace.error->stage},
                      {"code", trace.error->code},
                      {"message", trace.error->message}};
    } else {
        j["error"] = nullptr;
    }
    j["wall_time_ms"] = trace.wall_time_ms;
    return j;
}

ReasoningTrace trace_from_json(const nlohmann::json& j) {
    if (j.value("schema", "") != "ga.trace.v1") {
        throw Error(ErrorCode::MalformedRecord, "trace schema is not ga.trace.v1");
    }
    ReasoningTrace trace;
    trace.target = j.at("target").get<std::string>();
    trace.kind = j.at("kind").get<std::string>() == "edge" ? SampleKind::Edge
                                                           : SampleKind::Node;
    trace.method = j.at("method").get<std::string>();
    trace.truth = j.at("truth").get<std::string>();
    for (const auto& ex : j.at("examples")) {
        trace.examples.push_back({ex.at("sample_id").get<std::string>(),
                                  ex.at("label").get<std::string>(),
                                  ex.at("similarity").get<double>()});
    }
    trace.insufficient_examples = j.value("insufficient_examples", false);
    trace.target_text = j.value("target_text", "");
    trace.inductive_prompt = j.value("inductive_prompt", "");
    trace.induced_reasons = j.value("induced_reasons", "");
    trace.deductive_prompt = j.value("deductive_prompt", "");
    trace.deductive_response = j.value("deductive_response", "");
    if (j.contains("parsed_answer") && !j.at("parsed_answer").is_null()) {
        trace.parsed_answer = j.at("parsed_answer").get<std::string>();
    }
    trace.degraded = j.value("degraded", false);
    if (j.contains("error") && !j.at("error").is_null()) {
        const auto& e = j.at("error");
        trace.error = StageError{e.value("stage", ""), e.value("code", ""),
                                 e.value("message", "")};
    }
    trace.wall_time_ms = j.value("wall_time_ms", int64_t(0));
    return trace;
}

} // namespace ga
