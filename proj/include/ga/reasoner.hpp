#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ga/encoder.hpp"
#include "ga/graph.hpp"
#include "ga/llm.hpp"
#include "ga/memory.hpp"

#include <json.hpp>

namespace ga {

enum class TaskKind { NodeClassification, LinkPrediction };

std::string to_string(TaskKind kind);
TaskKind task_kind_from_string(const std::string& text);

// How many memorized examples accompany each query.
struct ExamplePolicy {
    int node_k = 5;       // node classification: top-k most similar
    int link_positives = 3;
    int link_negatives = 2;
};

struct TaskSpec {
    TaskKind kind = TaskKind::NodeClassification;
    // Node classification option labels, in report order. Pairwise
    // non-substring (case-insensitive) so answers parse unambiguously.
    std::vector<std::string> options;
    ExamplePolicy examples;
    EncoderConfig encoder;
};

struct SelectedExample {
    const MemoryRecord* record = nullptr;
    double similarity = 0.0;
};

struct ExampleSet {
    std::vector<SelectedExample> examples;
    int positives = 0;   // link tasks only
    int negatives = 0;   // link tasks only
    bool insufficient = false;
};

// The target of a single prediction. For nodes only `a` is set; for edges the
// candidate pair is (a, b). `truth` is carried through to the trace and never
// shown to the model.
struct TargetSample {
    SampleKind kind = SampleKind::Node;
    NodeId a;
    NodeId b;
    std::string truth;

    std::string key() const {
        return kind == SampleKind::Node ? a : edge_sample_id(a, b);
    }
};

struct TraceExample {
    std::string sample_id;
    std::string label;
    double similarity = 0.0;
};

struct StageError {
    std::string stage;   // encode | embed | select | induce | deduce | parse
    std::string code;
    std::string message;
};

struct ReasoningTrace {
    std::string target;
    SampleKind kind = SampleKind::Node;
    std::string method;   // graph-agent | simple-ask | kshot-cot
    std::string truth;
    std::vector<TraceExample> examples;
    bool insufficient_examples = false;
    std::string target_text;
    std::string inductive_prompt;
    std::string induced_reasons;
    std::string deductive_prompt;
    std::string deductive_response;
    std::optional<std::string> parsed_answer; // option label, or "TRUE"/"FALSE"
    bool degraded = false;                    // proceeded without induced reasons
    std::optional<StageError> error;
    int64_t wall_time_ms = 0;                 // 0 unless timings were recorded
};

nlohmann::ordered_json trace_to_json(const ReasoningTrace& trace);
ReasoningTrace trace_from_json(const nlohmann::json& j);

// Everything a single prediction needs. The gateway and store are shared
// across a batch; the context itself is cheap to copy.
struct AgentContext {
    const Graph* graph = nullptr;
    const DegreeStats* stats = nullptr;
    const MemoryStore* store = nullptr;
    Embedder* embedder = nullptr;
    Gateway* gateway = nullptr;
    TaskSpec task;
    std::string model_name;
    double temperature = 0.0;
    int max_output_tokens = 1024;
    uint64_t example_seed = 0;
    bool record_timings = false;
};

// Pick accompanying examples for one target. Node tasks take the top-k most
// similar records; link tasks take the top positives by similarity plus
// seeded-random negatives, always excluding records that share an endpoint
// with the target. Shortfalls set `insufficient` instead of throwing.
ExampleSet select_examples(const MemoryStore& store,
                           const TargetSample& target,
                           const EmbeddingVector& query,
                           const TaskSpec& task,
                           uint64_t seed);

// Fixed example set for the k-shot baseline: seeded draw, no similarity.
ExampleSet select_fixed_examples(const MemoryStore& store,
                                 const TaskSpec& task,
                                 uint64_t seed);

std::string build_inductive_prompt(const ExampleSet& examples, const TaskSpec& task);

std::string build_deductive_prompt(const ExampleSet& examples,
                                   const std::string& reasons,
                                   const EncodedSample& target,
                                   const TargetSample& target_ref,
                                   const TaskSpec& task);

// Parsing helpers. Both throw Error(UnparseableResponse) when no answer is
// found; node parsing picks the option whose last mention occurs latest.
std::string parse_node_answer(const std::string& response,
                              const std::vector<std::string>& options);
bool parse_link_answer(const std::string& response);

// Full two-phase graph-agent prediction. Stage failures are recorded in the
// trace instead of thrown; a context-overflow response triggers one retry
// with the neighbor budget halved.
ReasoningTrace predict(const AgentContext& ctx, const TargetSample& target);

// Baselines. simple-ask sends only the encoded target and the question;
// kshot-cot prepends one fixed example set shared across the whole run.
ReasoningTrace baseline_simple_ask(const AgentContext& ctx, const TargetSample& target);
ReasoningTrace baseline_kshot_cot(const AgentContext& ctx,
                                  const TargetSample& target,
                                  const ExampleSet& fixed_examples);

} // namespace ga
