#include "ga/llm.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

#include <httplib.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "ga/errors.hpp"
#include "ga/strings.hpp"

namespace ga {

namespace {

constexpr const char* kInductiveMarker = "List the reasons concisely.";

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

nlohmann::ordered_json response_to_json(const ChatResponse& response) {
    nlohmann::ordered_json obj;
    obj["text"] = response.text;
    obj["finish_state"] = response.finish_state == FinishState::Complete ? "complete" : "truncated";
    if (response.usage) {
        obj["usage"] = {{"prompt_tokens", response.usage->prompt_tokens},
                        {"completion_tokens", response.usage->completion_tokens}};
    } else {
        obj["usage"] = nullptr;
    }
    return obj;
}

ChatResponse response_from_json(const nlohmann::json& obj) {
    ChatResponse response;
    response.text = obj.at("text").get<std::string>();
    response.finish_state = obj.at("finish_state").get<std::string>() == "truncated"
                                ? FinishState::Truncated
                                : FinishState::Complete;
    if (obj.contains("usage") && !obj["usage"].is_null()) {
        TokenUsage usage;
        usage.prompt_tokens = obj["usage"].at("prompt_tokens").get<int64_t>();
        usage.completion_tokens = obj["usage"].at("completion_tokens").get<int64_t>();
        response.usage = usage;
    }
    return response;
}

nlohmann::ordered_json request_to_json(const ChatRequest& request) {
    nlohmann::ordered_json obj;
    obj["model"] = request.model_name;
    obj["system"] = request.system_text;
    obj["user"] = request.user_text;
    obj["temperature"] = request.temperature;
    obj["max_output_tokens"] = request.max_output_tokens;
    return obj;
}

} // namespace

ScriptedMockBackend::ScriptedMockBackend(std::vector<MockRule> rules) : rules_(std::move(rules)) {
    if (rules_.empty()) {
        throw Error(ErrorCode::InvalidConfig, "scripted mock needs at least one rule");
    }
}

ChatResponse ScriptedMockBackend::complete(const ChatRequest& request) {
    for (const MockRule& rule : rules_) {
        if (rule.contains == "*" || contains(request.user_text, rule.contains)) {
            return ChatResponse{rule.respond, FinishState::Complete, std::nullopt};
        }
    }
    throw Error(ErrorCode::NoRuleMatched, "no scripted rule matches the request");
}

std::unique_ptr<ChatBackend> scripted_mock(std::vector<MockRule> rules) {
    return std::make_unique<ScriptedMockBackend>(std::move(rules));
}

std::optional<std::string> MajorityLabelBackend::majority_label(const std::string& prompt) {
    std::map<std::string, int> counts;
    for (const std::string& line : split_lines(prompt)) {
        if (line.rfind("label: ", 0) == 0) {
            counts[trim(line.substr(7))] += 1;
        }
    }
    if (counts.empty()) return std::nullopt;
    // Most frequent; ties go to the lexicographically smallest (map order).
    std::string best;
    int best_count = -1;
    for (const auto& [label, count] : counts) {
        if (count > best_count) {
            best = label;
            best_count = count;
        }
    }
    return best;
}

ChatResponse MajorityLabelBackend::complete(const ChatRequest& request) {
    if (contains(request.user_text, kInductiveMarker)) {
        return ChatResponse{
            "Shared neighbors and recurring attribute terms distinguish the categories.",
            FinishState::Complete, std::nullopt};
    }
    auto majority = majority_label(request.user_text);
    return ChatResponse{majority.value_or(""), FinishState::Complete, std::nullopt};
}

HttpChatBackend::HttpChatBackend(HttpChatBackendConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) {
        throw Error(ErrorCode::InvalidConfig, "chat backend base_url is empty");
    }
}

ChatResponse HttpChatBackend::complete(const ChatRequest& request) {
    nlohmann::ordered_json body;
    body["model"] = request.model_name;
    body["messages"] = {{{"role", "system"}, {"content", request.system_text}},
                        {{"role", "user"}, {"content", request.user_text}}};
    body["temperature"] = request.temperature;
    body["max_tokens"] = request.max_output_tokens;

    httplib::Client client(config_.base_url);
    client.set_read_timeout(config_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!config_.auth_token.empty()) {
        headers.emplace("Authorization", "Bearer " + config_.auth_token);
    }
    auto res = client.Post(config_.path, headers, body.dump(), "application/json");
    if (!res) {
        throw TransientTransportError("transport error: " + httplib::to_string(res.error()));
    }
    if (res->status == 401 || res->status == 403) {
        throw Error(ErrorCode::AuthFailure,
                    "chat endpoint returned " + std::to_string(res->status));
    }
    if (res->status == 400) {
        std::string lowered = to_lower(res->body);
        if (contains(lowered, "context")) {
            throw Error(ErrorCode::ContextOverflow, "prompt exceeds the model context window");
        }
        throw TransientTransportError("http 400: " + res->body);
    }
    if (res->status != 200) {
        throw TransientTransportError("http status " + std::to_string(res->status));
    }

    try {
        nlohmann::json parsed = nlohmann::json::parse(res->body);
        const auto& choice = parsed.at("choices").at(0);
        ChatResponse response;
        response.text = choice.at("message").at("content").is_null()
                            ? ""
                            : choice["message"]["content"].get<std::string>();
        std::string finish = choice.value("finish_reason", "stop");
        response.finish_state =
            finish == "length" ? FinishState::Truncated : FinishState::Complete;
        if (parsed.contains("usage")) {
            TokenUsage usage;
            usage.prompt_tokens = parsed["usage"].value("prompt_tokens", int64_t{0});
            usage.completion_tokens = parsed["usage"].value("completion_tokens", int64_t{0});
            response.usage = usage;
        }
        return response;
    } catch (const nlohmann::json::exception& e) {
        throw TransientTransportError(std::string("bad chat response body: ") + e.what());
    }
}

RateLimiter::RateLimiter(int max_per_minute, Clock clock)
    : max_per_minute_(max_per_minute),
      clock_(clock ? std::move(clock) : [] { return std::chrono::steady_clock::now(); }) {}

bool RateLimiter::try_acquire_locked(TimePoint now) {
    while (!grants_.empty() && now - grants_.front() >= std::chrono::seconds(60)) {
        grants_.pop_front();
    }
    if (static_cast<int>(grants_.size()) < max_per_minute_) {
        grants_.push_back(now);
        return true;
    }
    return false;
}

bool RateLimiter::try_acquire() {
    if (max_per_minute_ <= 0) return true;
    std::lock_guard<std::mutex> lock(mutex_);
    return try_acquire_locked(clock_());
}

void RateLimiter::acquire() {
    if (max_per_minute_ <= 0) return;
    while (true) {
        std::chrono::steady_clock::duration wait;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            TimePoint now = clock_();
            if (try_acquire_locked(now)) return;
            wait = grants_.front() + std::chrono::seconds(60) - now;
        }
        std::this_thread::sleep_for(
            std::max(wait, std::chrono::steady_clock::duration(std::chrono::milliseconds(1))));
    }
}

CacheMode cache_mode_from_string(const std::string& name) {
    if (name == "record") return CacheMode::Record;
    if (name == "replay") return CacheMode::Replay;
    if (name == "passthrough") return CacheMode::Passthrough;
    throw Error(ErrorCode::InvalidConfig, "unknown cache mode '" + name + "'");
}

ReplayCache::ReplayCache(std::string directory, CacheMode mode)
    : directory_(std::move(directory)), mode_(mode) {
    if (directory_.empty()) {
        throw Error(ErrorCode::InvalidConfig, "replay cache needs a directory");
    }
    std::filesystem::create_directories(directory_);
}

std::optional<ChatResponse> ReplayCache::lookup(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::filesystem::path path = std::filesystem::path(directory_) / (key + ".json");
    std::ifstream in(path);
    if (!in) return std::nullopt;
    try {
        nlohmann::json obj;
        in >> obj;
        return response_from_json(obj.at("response"));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedRecord,
                    "bad cache entry " + path.string() + ": " + e.what());
    }
}

void ReplayCache::store(const std::string& key, const ChatRequest& request,
                        const ChatResponse& response) {
    std::lock_guard<std::mutex> lock(mutex_);
    nlohmann::ordered_json obj;
    obj["request"] = request_to_json(request);
    obj["response"] = response_to_json(response);
    std::filesystem::path path = std::filesystem::path(directory_) / (key + ".json");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::MalformedRecord, "cannot write cache entry " + path.string());
    out << obj.dump(2) << "\n";
}

Gateway::Gateway(BackendFactory factory, GatewayConfig config,
                 std::shared_ptr<RateLimiter> limiter)
    : factory_(std::move(factory)), config_(std::move(config)), limiter_(std::move(limiter)) {
    if (config_.cache_mode) {
        cache_ = std::make_unique<ReplayCache>(config_.cache_dir, *config_.cache_mode);
    }
}

std::string Gateway::cache_key(const ChatRequest& request) {
    return sha256_hex(request_to_json(request).dump());
}

ChatBackend& Gateway::backend() {
    std::lock_guard<std::mutex> lock(backend_mutex_);
    if (!backend_) {
        if (!factory_) {
            throw Error(ErrorCode::InvalidConfig, "no chat backend configured");
        }
        backend_ = factory_();
    }
    return *backend_;
}

ChatResponse Gateway::call_with_retries(const ChatRequest& request) {
    std::string last_failure;
    int backoff_ms = config_.backoff_initial_ms;
    for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
            backoff_ms *= 2;
        }
        if (limiter_) limiter_->acquire();
        try {
            return backend().complete(request);
        } catch (const TransientTransportError& e) {
            last_failure = e.what();
        }
    }
    throw Error(ErrorCode::TransportExhausted,
                "gave up after " + std::to_string(config_.max_attempts) +
                    " attempts; last failure: " + last_failure);
}

ChatResponse Gateway::complete(const ChatRequest& request) {
    if (request.user_text.empty()) {
        throw Error(ErrorCode::InvalidConfig, "chat request has empty user text");
    }
    if (!cache_) return call_with_retries(request);

    const std::string key = cache_key(request);
    switch (cache_->mode()) {
        case CacheMode::Replay: {
            auto cached = cache_->lookup(key);
            if (!cached) {
                throw Error(ErrorCode::CacheMiss, "no cached response for request " + key);
            }
            return *cached;
        }
        case CacheMode::Record: {
            if (auto cached = cache_->lookup(key)) return *cached;
            ChatResponse response = call_with_retries(request);
            cache_->store(key, request, response);
            return response;
        }
        case CacheMode::Passthrough:
            return call_with_retries(request);
    }
    throw Error(ErrorCode::InvalidConfig, "unreachable cache mode");
}

} // namespace ga
