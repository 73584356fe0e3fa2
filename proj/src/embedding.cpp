#include "ga/embedding.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ga/errors.hpp"
#include "ga/rng.hpp"
#include "ga/strings.hpp"

namespace ga {

double l2_norm(const EmbeddingVector& v) {
    double sum = 0.0;
    for (float x : v.values) sum += static_cast<double>(x) * static_cast<double>(x);
    return std::sqrt(sum);
}

HashEmbedder::HashEmbedder(size_t dim) : dim_(dim) {
    if (dim_ == 0) throw Error(ErrorCode::InvalidConfig, "embedding dim must be > 0");
}

std::vector<EmbeddingVector> HashEmbedder::embed(const std::vector<EncodedSample>& samples) {
    std::vector<EmbeddingVector> out;
    out.reserve(samples.size());
    for (const EncodedSample& sample : samples) {
        std::vector<double> acc(dim_, 0.0);
        std::string token;
        auto flush = [&] {
            if (token.empty()) return;
            uint64_t h = fnv1a64(token);
            double sign = ((h >> 32) & 1) ? 1.0 : -1.0;
            acc[h % dim_] += sign;
            token.clear();
        };
        for (char raw : sample.text) {
            unsigned char c = static_cast<unsigned char>(raw);
            if (std::isalnum(c)) {
                token += static_cast<char>(std::tolower(c));
            } else {
                flush();
            }
        }
        flush();

        double norm = 0.0;
        for (double x : acc) norm += x * x;
        norm = std::sqrt(norm);
        EmbeddingVector vec;
        vec.values.resize(dim_);
        for (size_t i = 0; i < dim_; ++i) {
            vec.values[i] = norm > 0.0 ? static_cast<float>(acc[i] / norm) : 0.0f;
        }
        out.push_back(std::move(vec));
    }
    return out;
}

HttpEmbedder::HttpEmbedder(HttpEmbedderConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) {
        throw Error(ErrorCode::InvalidConfig, "embedding provider base_url is empty");
    }
}

std::vector<EmbeddingVector> HttpEmbedder::embed(const std::vector<EncodedSample>& samples) {
    nlohmann::json request;
    request["model"] = config_.model;
    auto& input = request["input"] = nlohmann::json::array();
    for (const EncodedSample& sample : samples) input.push_back(sample.text);
    const std::string body = request.dump();

    std::string last_failure = "no attempt made";
    int backoff_ms = config_.backoff_initial_ms;
    for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
            backoff_ms *= 2;
        }
        httplib::Client client(config_.base_url);
        client.set_read_timeout(config_.timeout_seconds, 0);
        httplib::Headers headers;
        if (!config_.auth_token.empty()) {
            headers.emplace("Authorization", "Bearer " + config_.auth_token);
        }
        auto res = client.Post(config_.path, headers, body, "application/json");
        if (!res) {
            last_failure = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 401 || res->status == 403) {
            throw Error(ErrorCode::AuthFailure,
                        "embedding endpoint returned " + std::to_string(res->status));
        }
        if (res->status != 200) {
            last_failure = "http status " + std::to_string(res->status);
            continue;
        }
        try {
            nlohmann::json parsed = nlohmann::json::parse(res->body);
            const auto& vectors = parsed.at("vectors");
            if (vectors.size() != samples.size()) {
                throw Error(ErrorCode::EmbeddingProviderFailure,
                            "provider returned " + std::to_string(vectors.size()) +
                                " vectors for " + std::to_string(samples.size()) + " inputs");
            }
            std::vector<EmbeddingVector> out;
            out.reserve(samples.size());
            for (const auto& values : vectors) {
                EmbeddingVector vec;
                vec.values.reserve(values.size());
                for (const auto& x : values) vec.values.push_back(x.get<float>());
                out.push_back(std::move(vec));
            }
            return out;
        } catch (const nlohmann::json::exception& e) {
            last_failure = std::string("bad response body: ") + e.what();
        }
    }
    throw Error(ErrorCode::EmbeddingProviderFailure,
                "embedding request failed after " + std::to_string(config_.max_attempts) +
                    " attempts; last failure: " + last_failure);
}

void GnnEmbeddingTable::insert(const NodeId& id, std::vector<float> vector) {
    if (vector.empty()) {
        throw Error(ErrorCode::InconsistentDim, "empty vector for node '" + id + "'");
    }
    if (dim_ == 0) {
        dim_ = vector.size();
    } else if (vector.size() != dim_) {
        throw Error(ErrorCode::InconsistentDim,
                    "node '" + id + "' has dim " + std::to_string(vector.size()) +
                        ", expected " + std::to_string(dim_));
    }
    if (!vectors_.emplace(id, std::move(vector)).second) {
        throw Error(ErrorCode::DuplicateSampleId, "node '" + id + "' imported twice");
    }
}

const std::vector<float>& GnnEmbeddingTable::vector_for(const NodeId& id) const {
    auto it = vectors_.find(id);
    if (it == vectors_.end()) {
        throw Error(ErrorCode::MissingNodeVector, "no imported vector for node '" + id + "'");
    }
    return it->second;
}

GnnEmbeddingTable import_gnn_embeddings(std::istream& node_vectors) {
    GnnEmbeddingTable table;
    std::string line;
    size_t line_number = 0;
    while (std::getline(node_vectors, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            nlohmann::json obj = nlohmann::json::parse(line);
            table.insert(obj.at("id").get<std::string>(),
                         obj.at("vector").get<std::vector<float>>());
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::MalformedRecord,
                        "vector file line " + std::to_string(line_number) + ": " + e.what());
        }
    }
    return table;
}

GnnEmbeddingTable import_gnn_embeddings_file(const std::string& path) {
    std::ifstream stream(path);
    if (!stream) throw Error(ErrorCode::MalformedRecord, "cannot open vector file " + path);
    return import_gnn_embeddings(stream);
}

GnnEmbedder::GnnEmbedder(GnnEmbeddingTable table) : table_(std::move(table)) {}

std::vector<EmbeddingVector> GnnEmbedder::embed(const std::vector<EncodedSample>& samples) {
    std::vector<EmbeddingVector> out;
    out.reserve(samples.size());
    for (const EncodedSample& sample : samples) {
        EmbeddingVector vec;
        if (sample.kind == SampleKind::Node) {
            vec.values = table_.vector_for(sample.sample_id);
        } else {
            size_t sep = sample.sample_id.find('|');
            if (sep == std::string::npos) {
                throw Error(ErrorCode::MalformedRecord,
                            "edge sample id '" + sample.sample_id + "' is not 'src|dst'");
            }
            const auto& src = table_.vector_for(sample.sample_id.substr(0, sep));
            const auto& dst = table_.vector_for(sample.sample_id.substr(sep + 1));
            vec.values.reserve(src.size() + dst.size());
            vec.values.insert(vec.values.end(), src.begin(), src.end());
            vec.values.insert(vec.values.end(), dst.begin(), dst.end());
        }
        out.push_back(std::move(vec));
    }
    return out;
}

} // namespace ga
