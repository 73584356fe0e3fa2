#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ga/embedding.hpp"
#include "ga/encoder.hpp"

namespace ga {

struct MemoryRecord {
    std::string sample_id;
    SampleKind kind = SampleKind::Node;
    EmbeddingVector vector;
    std::string label;
    std::string encoded_text;
    double norm = 0.0; // cached ||vector||
};

// Long-term memory: immutable after build, safe for concurrent readers.
class MemoryStore {
public:
    MemoryStore() = default;
    MemoryStore(std::vector<MemoryRecord> records, std::string provenance);

    const std::vector<MemoryRecord>& records() const { return records_; }
    size_t size() const { return records_.size(); }
    size_t dim() const { return dim_; }
    const std::string& provenance() const { return provenance_; }

    const MemoryRecord* find(const std::string& sample_id) const;

private:
    std::vector<MemoryRecord> records_;
    std::unordered_map<std::string, size_t> index_;
    std::string provenance_;
    size_t dim_ = 0;
};

// dot(a, b) / (||a|| ||b||). Errors on dimension mismatch or a zero vector.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

struct MemorizeOptions {
    size_t batch_size = 16;
    // Bound on concurrently in-flight provider batches.
    int max_in_flight = 8;
};

// Embeds every sample through the provider and assembles records in input
// order. Duplicate sample ids or missing labels fail before any provider
// call; provider failures abort the whole build.
MemoryStore memorize(const std::vector<EncodedSample>& samples,
                     const std::unordered_map<std::string, std::string>& labels,
                     Embedder& embedder,
                     const MemorizeOptions& options = {});

struct ScoredRecord {
    const MemoryRecord* record = nullptr;
    double similarity = 0.0;
};

struct RetrievalResult {
    std::vector<ScoredRecord> items;
    // True when the filtered store held fewer than k records.
    bool shortfall = false;
};

using RecordFilter = std::function<bool(const MemoryRecord&)>;

// Exact top-k by cosine similarity, descending, ties broken by ascending
// sample id. Scoring is OpenMP-parallel; the serial variant is the reference
// implementation kept for tests and the benchmark.
RetrievalResult retrieve_similar(const MemoryStore& store, const EmbeddingVector& query,
                                 size_t k, const RecordFilter& filter = nullptr,
                                 int threads = 0);
RetrievalResult retrieve_similar_serial(const MemoryStore& store, const EmbeddingVector& query,
                                        size_t k, const RecordFilter& filter = nullptr);

// Persistence: <prefix>.bin holds the raw little-endian float32 matrix,
// <prefix>.json the metadata sidecar (ids, kinds, labels, texts, dim,
// provenance). Vector bytes round-trip exactly.
void save_store(const MemoryStore& store, const std::string& path_prefix);
MemoryStore load_store(const std::string& path_prefix);

} // namespace ga
