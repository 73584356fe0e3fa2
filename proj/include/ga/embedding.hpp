#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "ga/encoder.hpp"

namespace ga {

struct EmbeddingVector {
    std::vector<float> values;

    size_t dim() const { return values.size(); }
};

double l2_norm(const EmbeddingVector& v);

// Provider boundary used by memorization and query embedding. Implementations
// must be safe for concurrent embed() calls.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::vector<EmbeddingVector> embed(const std::vector<EncodedSample>& samples) = 0;
    // "lm-embedding" or "gnn-embedding"
    virtual std::string provenance() const = 0;
};

// Deterministic local text embedder: signed hashed bag-of-words over
// lowercased alphanumeric tokens, L2-normalized. Texts sharing vocabulary
// land near each other, which is enough for fixture-scale retrieval and for
// fully offline runs.
class HashEmbedder : public Embedder {
public:
    explicit HashEmbedder(size_t dim = 64);
    std::vector<EmbeddingVector> embed(const std::vector<EncodedSample>& samples) override;
    std::string provenance() const override { return "lm-embedding"; }

private:
    size_t dim_;
};

struct HttpEmbedderConfig {
    std::string base_url;          // e.g. "http://127.0.0.1:8080"
    std::string path = "/embed";
    std::string model = "embedding-ada-002";
    std::string auth_token;        // empty = no Authorization header
    int max_attempts = 3;
    int backoff_initial_ms = 500;  // doubled per retry
    int timeout_seconds = 120;
};

// JSON-over-HTTP provider. Request {"model", "input": [texts]} ->
// response {"vectors": [[...], ...]}. Transient failures are retried with
// exponential backoff; 401/403 raise auth-failure immediately.
class HttpEmbedder : public Embedder {
public:
    explicit HttpEmbedder(HttpEmbedderConfig config);
    std::vector<EmbeddingVector> embed(const std::vector<EncodedSample>& samples) override;
    std::string provenance() const override { return "lm-embedding"; }

private:
    HttpEmbedderConfig config_;
};

// Externally trained per-node vectors, keyed by node id. Uniform dimension.
class GnnEmbeddingTable {
public:
    GnnEmbeddingTable() = default;

    void insert(const NodeId& id, std::vector<float> vector);
    bool has(const NodeId& id) const { return vectors_.count(id) > 0; }
    const std::vector<float>& vector_for(const NodeId& id) const;
    size_t dim() const { return dim_; }
    size_t size() const { return vectors_.size(); }

private:
    std::unordered_map<NodeId, std::vector<float>> vectors_;
    size_t dim_ = 0;
};

// JSON-lines import: {"id": ..., "vector": [..]} per line.
GnnEmbeddingTable import_gnn_embeddings(std::istream& node_vectors);
GnnEmbeddingTable import_gnn_embeddings_file(const std::string& path);

// Embeds samples from imported GNN vectors: node samples map to their stored
// vector, edge samples to the concatenation [vec(src) ++ vec(dst)] (doubled
// dimension). Sample texts are ignored.
class GnnEmbedder : public Embedder {
public:
    explicit GnnEmbedder(GnnEmbeddingTable table);
    std::vector<EmbeddingVector> embed(const std::vector<EncodedSample>& samples) override;
    std::string provenance() const override { return "gnn-embedding"; }

    const GnnEmbeddingTable& table() const { return table_; }

private:
    GnnEmbeddingTable table_;
};

} // namespace ga
