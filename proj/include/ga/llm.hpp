#pragma once

#include <chrono>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ga {

struct ChatRequest {
    std::string system_text;
    std::string user_text;
    double temperature = 0.0;
    int max_output_tokens = 1024;
    std::string model_name;
};

enum class FinishState { Complete, Truncated };

struct TokenUsage {
    int64_t prompt_tokens = 0;
    int64_t completion_tokens = 0;
};

struct ChatResponse {
    std::string text;
    FinishState finish_state = FinishState::Complete;
    std::optional<TokenUsage> usage;
};

// Thrown by backends for failures worth retrying (connection loss, 5xx,
// throttling). The gateway converts exhausted retries into transport-exhausted.
class TransientTransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual ChatResponse complete(const ChatRequest& request) = 0;
};

// Deterministic scripted backend: ordered (matcher, response) rules, first
// match wins. A matcher is a substring of the user text; "*" matches any
// request.
struct MockRule {
    std::string contains;
    std::string respond;
};

class ScriptedMockBackend : public ChatBackend {
public:
    explicit ScriptedMockBackend(std::vector<MockRule> rules);
    ChatResponse complete(const ChatRequest& request) override;

private:
    std::vector<MockRule> rules_;
};

std::unique_ptr<ChatBackend> scripted_mock(std::vector<MockRule> rules);

// Answers deductive prompts with the most frequent "label: X" value found in
// the prompt (ties to the lexicographically smallest label) and inductive
// prompts with a fixed reasons text. Drives offline end-to-end runs whose
// accuracy an independent oracle can recompute.
class MajorityLabelBackend : public ChatBackend {
public:
    ChatResponse complete(const ChatRequest& request) override;

    static std::optional<std::string> majority_label(const std::string& prompt);
};

struct HttpChatBackendConfig {
    std::string base_url;
    std::string path = "/v1/chat/completions";
    std::string auth_token; // empty = no Authorization header
    int timeout_seconds = 300;
};

// OpenAI-style chat-completion wire format: {"model", "messages", then
// sampling parameters} -> {"choices": [{"message": {"content"}, "finish_reason"}]}.
class HttpChatBackend : public ChatBackend {
public:
    explicit HttpChatBackend(HttpChatBackendConfig config);
    ChatResponse complete(const ChatRequest& request) override;

private:
    HttpChatBackendConfig config_;
};

// Sliding-window limiter: at most max_per_minute grants in any 60 s window.
// max_per_minute <= 0 disables limiting. The clock is injectable for tests.
class RateLimiter {
public:
    using TimePoint = std::chrono::steady_clock::time_point;
    using Clock = std::function<TimePoint()>;

    explicit RateLimiter(int max_per_minute, Clock clock = nullptr);

    // Blocks (sleeping) until a slot is available, then records the grant.
    void acquire();
    // Non-blocking variant; records the grant when it returns true.
    bool try_acquire();

private:
    bool try_acquire_locked(TimePoint now);

    int max_per_minute_;
    Clock clock_;
    std::mutex mutex_;
    std::deque<TimePoint> grants_;
};

enum class CacheMode { Record, Replay, Passthrough };

CacheMode cache_mode_from_string(const std::string& name);

// One JSON file per entry under a content-addressed directory. Replay mode
// never touches the network; a miss is an error.
class ReplayCache {
public:
    ReplayCache(std::string directory, CacheMode mode);

    CacheMode mode() const { return mode_; }
    std::optional<ChatResponse> lookup(const std::string& key) const;
    void store(const std::string& key, const ChatRequest& request, const ChatResponse& response);

private:
    std::string directory_;
    CacheMode mode_;
    mutable std::mutex mutex_;
};

struct GatewayConfig {
    std::optional<CacheMode> cache_mode; // nullopt = no cache at all
    std::string cache_dir;
    int max_attempts = 3;
    int backoff_initial_ms = 500;
};

// The single chat-completion entry point: replay cache in front, rate-limited
// retried transport behind. The backend is constructed lazily from a factory,
// so replay-mode runs never build a network client.
class Gateway {
public:
    using BackendFactory = std::function<std::unique_ptr<ChatBackend>()>;

    Gateway(BackendFactory factory, GatewayConfig config,
            std::shared_ptr<RateLimiter> limiter = nullptr);

    ChatResponse complete(const ChatRequest& request);

    // SHA-256 over the canonicalized request JSON; covers every field.
    static std::string cache_key(const ChatRequest& request);

private:
    ChatBackend& backend();
    ChatResponse call_with_retries(const ChatRequest& request);

    BackendFactory factory_;
    GatewayConfig config_;
    std::shared_ptr<RateLimiter> limiter_;
    std::unique_ptr<ReplayCache> cache_;
    std::unique_ptr<ChatBackend> backend_;
    std::mutex backend_mutex_;
};

} // namespace ga
