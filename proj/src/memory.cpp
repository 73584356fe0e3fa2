#include "ga/memory.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "ga/errors.hpp"
#include "ga/parallel.hpp"

static_assert(std::endian::native == std::endian::little,
              "store persistence assumes a little-endian host");

namespace ga {

MemoryStore::MemoryStore(std::vector<MemoryRecord> records, std::string provenance)
    : records_(std::move(records)), provenance_(std::move(provenance)) {
    for (size_t i = 0; i < records_.size(); ++i) {
        MemoryRecord& rec = records_[i];
        if (rec.label.empty()) {
            throw Error(ErrorCode::MalformedRecord,
                        "record '" + rec.sample_id + "' has an empty label");
        }
        if (i == 0) {
            dim_ = rec.vector.dim();
        } else if (rec.vector.dim() != dim_) {
            throw Error(ErrorCode::InconsistentDim,
                        "record '" + rec.sample_id + "' has dim " +
                            std::to_string(rec.vector.dim()) + ", store dim is " +
                            std::to_string(dim_));
        }
        for (float x : rec.vector.values) {
            if (!std::isfinite(x)) {
                throw Error(ErrorCode::MalformedRecord,
                            "record '" + rec.sample_id + "' has a non-finite component");
            }
        }
        rec.norm = l2_norm(rec.vector);
        if (rec.norm == 0.0) {
            throw Error(ErrorCode::ZeroVector,
                        "record '" + rec.sample_id + "' has a zero embedding");
        }
        if (!index_.emplace(rec.sample_id, i).second) {
            throw Error(ErrorCode::DuplicateSampleId,
                        "sample id '" + rec.sample_id + "' stored twice");
        }
    }
}

const MemoryRecord* MemoryStore::find(const std::string& sample_id) const {
    auto it = index_.find(sample_id);
    return it == index_.end() ? nullptr : &records_[it->second];
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "dims " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
    }
    double dot = 0.0;
    for (size_t i = 0; i < a.dim(); ++i) {
        dot += static_cast<double>(a.values[i]) * static_cast<double>(b.values[i]);
    }
    double norm_a = l2_norm(a);
    double norm_b = l2_norm(b);
    if (norm_a == 0.0 || norm_b == 0.0) {
        throw Error(ErrorCode::ZeroVector, "cosine similarity of a zero vector is undefined");
    }
    return dot / (norm_a * norm_b);
}

MemoryStore memorize(const std::vector<EncodedSample>& samples,
                     const std::unordered_map<std::string, std::string>& labels,
                     Embedder& embedder,
                     const MemorizeOptions& options) {
    if (samples.empty()) {
        throw Error(ErrorCode::MalformedRecord, "cannot memorize an empty sample set");
    }
    // Validate everything up front so no provider call is wasted.
    {
        std::unordered_map<std::string, bool> seen;
        for (const EncodedSample& s : samples) {
            if (!seen.emplace(s.sample_id, true).second) {
                throw Error(ErrorCode::DuplicateSampleId,
                            "sample '" + s.sample_id + "' appears twice in memorize input");
            }
            auto it = labels.find(s.sample_id);
            if (it == labels.end() || it->second.empty()) {
                throw Error(ErrorCode::MalformedRecord,
                            "no label for sample '" + s.sample_id + "'");
            }
        }
    }

    const size_t batch_size = std::max<size_t>(1, options.batch_size);
    const size_t batch_count = (samples.size() + batch_size - 1) / batch_size;
    std::vector<std::vector<EmbeddingVector>> batch_results(batch_count);

    std::atomic<size_t> next_batch{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        while (true) {
            size_t b = next_batch.fetch_add(1);
            if (b >= batch_count) return;
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error) return;
            }
            size_t begin = b * batch_size;
            size_t end = std::min(begin + batch_size, samples.size());
            std::vector<EncodedSample> batch(samples.begin() + begin, samples.begin() + end);
            try {
                batch_results[b] = embedder.embed(batch);
                if (batch_results[b].size() != batch.size()) {
                    throw Error(ErrorCode::EmbeddingProviderFailure,
                                "provider returned a short batch");
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    size_t worker_count = std::min<size_t>(
        batch_count, static_cast<size_t>(std::max(1, options.max_in_flight)));
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    for (size_t i = 0; i < worker_count; ++i) workers.emplace_back(worker);
    for (auto& t : workers) t.join();
    if (first_error) std::rethrow_exception(first_error);

    std::vector<MemoryRecord> records;
    records.reserve(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) {
        const EncodedSample& s = samples[i];
        MemoryRecord rec;
        rec.sample_id = s.sample_id;
        rec.kind = s.kind;
        rec.vector = std::move(batch_results[i / batch_size][i % batch_size]);
        rec.label = labels.at(s.sample_id);
        rec.encoded_text = s.text;
        records.push_back(std::move(rec));
    }
    return MemoryStore(std::move(records), embedder.provenance());
}

namespace {

RetrievalResult retrieve_impl(const MemoryStore& store, const EmbeddingVector& query,
                              size_t k, const RecordFilter& filter, int threads) {
    if (k < 1) throw Error(ErrorCode::InvalidConfig, "retrieval k must be >= 1");
    if (store.size() > 0 && query.dim() != store.dim()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "query dim " + std::to_string(query.dim()) + " vs store dim " +
                        std::to_string(store.dim()));
    }
    double query_norm = l2_norm(query);
    if (query_norm == 0.0) throw Error(ErrorCode::ZeroVector, "query embedding is zero");

    const auto& records = store.records();
    std::vector<size_t> candidates;
    candidates.reserve(records.size());
    for (size_t i = 0; i < records.size(); ++i) {
        if (!filter || filter(records[i])) candidates.push_back(i);
    }

    std::vector<double> scores(candidates.size());
    parallel_for(static_cast<int64_t>(candidates.size()), threads, [&](int64_t c) {
        const MemoryRecord& rec = records[candidates[static_cast<size_t>(c)]];
        double dot = 0.0;
        for (size_t i = 0; i < query.dim(); ++i) {
            dot += static_cast<double>(query.values[i]) *
                   static_cast<double>(rec.vector.values[i]);
        }
        scores[static_cast<size_t>(c)] = dot / (query_norm * rec.norm);
    });

    std::vector<size_t> order(candidates.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto better = [&](size_t a, size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return records[candidates[a]].sample_id < records[candidates[b]].sample_id;
    };
    size_t keep = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + keep, order.end(), better);

    RetrievalResult result;
    result.items.reserve(keep);
    for (size_t i = 0; i < keep; ++i) {
        result.items.push_back({&records[candidates[order[i]]], scores[order[i]]});
    }
    result.shortfall = result.items.size() < k;
    return result;
}

} // namespace

RetrievalResult retrieve_similar(const MemoryStore& store, const EmbeddingVector& query,
                                 size_t k, const RecordFilter& filter, int threads) {
    return retrieve_impl(store, query, k, filter, threads);
}

RetrievalResult retrieve_similar_serial(const MemoryStore& store, const EmbeddingVector& query,
                                        size_t k, const RecordFilter& filter) {
    return retrieve_impl(store, query, k, filter, 1);
}

void save_store(const MemoryStore& store, const std::string& path_prefix) {
    std::ofstream bin(path_prefix + ".bin", std::ios::binary | std::ios::trunc);
    if (!bin) throw Error(ErrorCode::MalformedRecord, "cannot write " + path_prefix + ".bin");
    for (const MemoryRecord& rec : store.records()) {
        bin.write(reinterpret_cast<const char*>(rec.vector.values.data()),
                  static_cast<std::streamsize>(rec.vector.values.size() * sizeof(float)));
    }
    bin.close();

    nlohmann::ordered_json sidecar;
    sidecar["schema"] = "ga.store.v1";
    sidecar["dim"] = store.dim();
    sidecar["provenance"] = store.provenance();
    sidecar["count"] = store.size();
    auto& recs = sidecar["records"] = nlohmann::ordered_json::array();
    for (const MemoryRecord& rec : store.records()) {
        nlohmann::ordered_json obj;
        obj["id"] = rec.sample_id;
        obj["kind"] = to_string(rec.kind);
        obj["label"] = rec.label;
        obj["text"] = rec.encoded_text;
        recs.push_back(std::move(obj));
    }
    std::ofstream meta(path_prefix + ".json", std::ios::trunc);
    if (!meta) throw Error(ErrorCode::MalformedRecord, "cannot write " + path_prefix + ".json");
    meta << sidecar.dump(2) << "\n";
}

MemoryStore load_store(const std::string& path_prefix) {
    std::ifstream meta(path_prefix + ".json");
    if (!meta) {
        throw Error(ErrorCode::MissingStore,
                    "no store at " + path_prefix + " (missing " + path_prefix + ".json)");
    }
    nlohmann::json sidecar;
    try {
        meta >> sidecar;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedRecord,
                    "bad store sidecar " + path_prefix + ".json: " + e.what());
    }
    const size_t dim = sidecar.at("dim").get<size_t>();
    const size_t count = sidecar.at("count").get<size_t>();

    std::ifstream bin(path_prefix + ".bin", std::ios::binary);
    if (!bin) throw Error(ErrorCode::MissingStore, "missing " + path_prefix + ".bin");
    std::vector<MemoryRecord> records;
    records.reserve(count);
    for (const auto& obj : sidecar.at("records")) {
        MemoryRecord rec;
        rec.sample_id = obj.at("id").get<std::string>();
        rec.kind = obj.at("kind").get<std::string>() == "edge" ? SampleKind::Edge
                                                               : SampleKind::Node;
        rec.label = obj.at("label").get<std::string>();
        rec.encoded_text = obj.at("text").get<std::string>();
        rec.vector.values.resize(dim);
        bin.read(reinterpret_cast<char*>(rec.vector.values.data()),
                 static_cast<std::streamsize>(dim * sizeof(float)));
        if (!bin) {
            throw Error(ErrorCode::MalformedRecord,
                        path_prefix + ".bin is shorter than the sidecar promises");
        }
        records.push_back(std::move(rec));
    }
    if (records.size() != count) {
        throw Error(ErrorCode::MalformedRecord, "record count mismatch in " + path_prefix);
    }
    return MemoryStore(std::move(records), sidecar.at("provenance").get<std::string>());
}

} // namespace ga
