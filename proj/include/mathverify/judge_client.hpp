// judge_client.hpp - Prompt construction and HTTP client for the
// model-based verifier.

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mathverify {

enum class PromptTemplate { WithQuestion, WithoutQuestion };

const char* template_id(PromptTemplate t);  // versioned, e.g. "v1/without_question"

struct DecodeParams {
    double temperature = 0.0;  // greedy by default
    double top_p = 1.0;
    int max_tokens = 4096;
};

// Long-CoT judges sample; see the endpoint defaults.
inline constexpr DecodeParams kLongCotDecode{0.6, 0.95, 8192};

struct JudgeRequest {
    std::optional<std::string> question;
    std::string ground_truth;
    std::string candidate;
    PromptTemplate template_kind = PromptTemplate::WithoutQuestion;
    DecodeParams decode;
};

enum class DecisionValue { Yes, No, Unparseable };

const char* to_string(DecisionValue v);

struct JudgeDecision {
    DecisionValue value = DecisionValue::Unparseable;
    std::string rationale_text;
    double latency_ms = 0.0;
    long token_count = 0;
};

// Fills the fixed template. Throws std::invalid_argument when the
// with-question template has no question.
std::string build_prompt(const JudgeRequest& req);

// Takes the LAST "Final Decision: Yes|No" line in the completion, so long
// chains of reasoning before the decision are fine. No marker means
// Unparseable. Total on arbitrary text.
DecisionValue parse_decision(std::string_view completion);

struct EndpointConfig {
    std::string base_url;  // scheme://host:port
    std::string model;
    std::string api_key;
    int max_retries = 3;
    double timeout_s = 60.0;
    double backoff_base_s = 0.25;
    int max_in_flight = 16;
};

class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using JudgeFn = std::function<JudgeDecision(const JudgeRequest&)>;

class JudgeClient {
public:
    explicit JudgeClient(EndpointConfig cfg);
    ~JudgeClient();

    JudgeClient(const JudgeClient&) = delete;
    JudgeClient& operator=(const JudgeClient&) = delete;

    // One chat completion round trip. Retries transient failures with
    // exponential backoff; throws TransportError when retries run out or
    // the body is malformed.
    JudgeDecision judge(const JudgeRequest& req);

    const EndpointConfig& config() const { return cfg_; }

private:
    EndpointConfig cfg_;
    struct Gate;
    std::unique_ptr<Gate> gate_;  // bounds in-flight requests
};

// Wraps a shared JudgeClient as a JudgeFn. Transport errors propagate.
JudgeFn make_http_judge(const EndpointConfig& cfg);

}  // namespace mathverify
