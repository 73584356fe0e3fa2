#pragma once

#include <stdexcept>
#include <string>

namespace ga {

enum class ErrorCode {
    // data errors
    DanglingEdgeEndpoint,
    DuplicateNodeId,
    MalformedRecord,
    RatioSumInvalid,
    InsufficientNegativeSpace,
    UnknownNode,
    UnknownSample,
    DimensionMismatch,
    ZeroVector,
    MissingNodeVector,
    InconsistentDim,
    DuplicateSampleId,
    EmptySplit,
    MissingStore,
    // backend errors
    TransportExhausted,
    AuthFailure,
    ContextOverflow,
    CacheMiss,
    NoRuleMatched,
    EmbeddingProviderFailure,
    // response handling
    UnparseableResponse,
    // configuration / usage
    InvalidConfig,
};

// Exit-code buckets used by the CLI: 1 usage, 2 data, 3 backend.
enum class ErrorCategory { Usage = 1, Data = 2, Backend = 3 };

inline ErrorCategory category_of(ErrorCode code) {
    switch (code) {
        case ErrorCode::TransportExhausted:
        case ErrorCode::AuthFailure:
        case ErrorCode::ContextOverflow:
        case ErrorCode::CacheMiss:
        case ErrorCode::NoRuleMatched:
        case ErrorCode::EmbeddingProviderFailure:
            return ErrorCategory::Backend;
        case ErrorCode::InvalidConfig:
            return ErrorCategory::Usage;
        default:
            return ErrorCategory::Data;
    }
}

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DanglingEdgeEndpoint: return "dangling-edge-endpoint";
        case ErrorCode::DuplicateNodeId: return "duplicate-node-id";
        case ErrorCode::MalformedRecord: return "malformed-record";
        case ErrorCode::RatioSumInvalid: return "ratio-sum-invalid";
        case ErrorCode::InsufficientNegativeSpace: return "insufficient-negative-space";
        case ErrorCode::UnknownNode: return "unknown-node";
        case ErrorCode::UnknownSample: return "unknown-sample";
        case ErrorCode::DimensionMismatch: return "dimension-mismatch";
        case ErrorCode::ZeroVector: return "zero-vector";
        case ErrorCode::MissingNodeVector: return "missing-node-vector";
        case ErrorCode::InconsistentDim: return "inconsistent-dim";
        case ErrorCode::DuplicateSampleId: return "duplicate-sample-id";
        case ErrorCode::EmptySplit: return "empty-split";
        case ErrorCode::MissingStore: return "missing-store";
        case ErrorCode::TransportExhausted: return "transport-exhausted";
        case ErrorCode::AuthFailure: return "auth-failure";
        case ErrorCode::ContextOverflow: return "context-overflow";
        case ErrorCode::CacheMiss: return "cache-miss";
        case ErrorCode::NoRuleMatched: return "no-rule-matched";
        case ErrorCode::EmbeddingProviderFailure: return "embedding-provider-failure";
        case ErrorCode::UnparseableResponse: return "unparseable-response";
        case ErrorCode::InvalidConfig: return "invalid-config";
    }
    return "unknown-error";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    ErrorCategory category() const noexcept { return category_of(code_); }

private:
    ErrorCode code_;
};

} // namespace ga
