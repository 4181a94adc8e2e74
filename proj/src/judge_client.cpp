#include "mathverify/judge_client.hpp"

#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace mathverify {

const char* template_id(PromptTemplate t) {
    return t == PromptTemplate::WithQuestion ? "v1/with_question" : "v1/without_question";
}

const char* to_string(DecisionValue v) {
    switch (v) {
        case DecisionValue::Yes: return "yes";
        case DecisionValue::No: return "no";
        case DecisionValue::Unparseable: return "unparseable";
    }
    return "unparseable";
}

namespace {

// Templates are versioned constants; runs stay comparable because nobody
// can edit the wording per call. Slot values are spliced verbatim.
constexpr std::string_view kHeader =
    "You are a strict verifier for mathematical answers. Given a ground-truth "
    "answer and a candidate answer, decide whether the candidate is "
    "mathematically equivalent to the ground truth.\n\n";

constexpr std::string_view kFooter =
    "\nJudge only mathematical equivalence with the ground truth. Reply with "
    "your reasoning if needed, then end with exactly one line:\nFinal "
    "Decision: Yes\nor\nFinal Decision: No\n";

std::string slot_or_placeholder(const std::string& s) {
    return s.empty() ? "(empty answer)" : s;
}

char lower(char c) { return c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c; }

bool word_boundary(std::string_view s, size_t end) {
    if (end >= s.size()) return true;
    char c = s[end];
    return !((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'));
}

}  // namespace

std::string build_prompt(const JudgeRequest& req) {
    if (req.template_kind == PromptTemplate::WithQuestion && !req.question)
        throw std::invalid_argument("with_question template requires a question");
    std::ostringstream out;
    out << kHeader;
    if (req.template_kind == PromptTemplate::WithQuestion)
        out << "Question: " << *req.question << "\n\n";
    out << "Ground Truth Answer: " << slot_or_placeholder(req.ground_truth) << "\n";
    out << "Candidate Answer: " << slot_or_placeholder(req.candidate) << "\n";
    out << kFooter;
    return out.str();
}

DecisionValue parse_decision(std::string_view completion) {
    constexpr std::string_view kMarker = "final decision:";
    DecisionValue result = DecisionValue::Unparseable;
    for (size_t i = 0; i + kMarker.size() <= completion.size(); ++i) {
        bool hit = true;
        for (size_t k = 0; k < kMarker.size(); ++k) {
            if (lower(completion[i + k]) != kMarker[k]) {
                hit = false;
                break;
            }
        }
        if (!hit) continue;
        size_t j = i + kMarker.size();
        // allow markdown/quoting noise before the verdict, same line only
        while (j < completion.size() && completion[j] != '\n' &&
               (completion[j] == ' ' || completion[j] == '\t' || completion[j] == '*' ||
                completion[j] == '"' || completion[j] == '\'' || completion[j] == '[' ||
                completion[j] == '('))
            ++j;
        if (j + 3 <= completion.size() && lower(completion[j]) == 'y' &&
            lower(completion[j + 1]) == 'e' && lower(completion[j + 2]) == 's' &&
            word_boundary(completion, j + 3)) {
            result = DecisionValue::Yes;
        } else if (j + 2 <= completion.size() && lower(completion[j]) == 'n' &&
                   lower(completion[j + 1]) == 'o' && word_boundary(completion, j + 2)) {
            result = DecisionValue::No;
        }
        // keep scanning: the last parseable marker wins
    }
    return result;
}

// ---------------------------------------------------------------------------
// HTTP client
// ---------------------------------------------------------------------------

struct JudgeClient::Gate {
    std::mutex m;
    std::condition_variable cv;
    int available;

    explicit Gate(int n) : available(n) {}

    void acquire() {
        std::unique_lock<std::mutex> lk(m);
        cv.wait(lk, [&] { return available > 0; });
        --available;
    }
    void release() {
        {
            std::lock_guard<std::mutex> lk(m);
            ++available;
        }
        cv.notify_one();
    }
};

JudgeClient::JudgeClient(EndpointConfig cfg)
    : cfg_(std::move(cfg)), gate_(std::make_unique<Gate>(std::max(1, cfg_.max_in_flight))) {}

JudgeClient::~JudgeClient() = default;

JudgeDecision JudgeClient::judge(const JudgeRequest& req) {
    std::string prompt = build_prompt(req);
    nlohmann::json body = {
        {"model", cfg_.model},
        {"messages", nlohmann::json::array({nlohmann::json{{"role", "user"},
                                                           {"content", prompt}}})},
        {"temperature", req.decode.temperature},
        {"top_p", req.decode.top_p},
        {"max_tokens", req.decode.max_tokens},
    };
    std::string payload = body.dump();

    gate_->acquire();
    struct Release {
        Gate* g;
        ~Release() { g->release(); }
    } release{gate_.get()};

    auto t0 = std::chrono::steady_clock::now();
    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
        if (attempt > 0) {
            double s = cfg_.backoff_base_s * static_cast<double>(1 << (attempt - 1));
            s = std::min(s, 5.0);
            std::this_thread::sleep_for(std::chrono::duration<double>(s));
        }
        httplib::Client cli(cfg_.base_url);
        auto whole = static_cast<time_t>(cfg_.timeout_s);
        auto frac = static_cast<time_t>((cfg_.timeout_s - static_cast<double>(whole)) * 1e6);
        cli.set_connection_timeout(whole, frac);
        cli.set_read_timeout(whole, frac);
        cli.set_write_timeout(whole, frac);
        httplib::Headers headers;
        if (!cfg_.api_key.empty())
            headers.emplace("Authorization", "Bearer " + cfg_.api_key);

        auto res = cli.Post("/v1/chat/completions", headers, payload, "application/json");
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            continue;  // transient
        }
        if (res->status >= 500 || res->status == 429) {
            last_error = "server returned status " + std::to_string(res->status);
            continue;  // transient
        }
        if (res->status != 200)
            throw TransportError("judge endpoint returned status " +
                                 std::to_string(res->status));

        nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("choices") ||
            !parsed["choices"].is_array() || parsed["choices"].empty() ||
            !parsed["choices"][0].contains("message") ||
            !parsed["choices"][0]["message"].contains("content") ||
            !parsed["choices"][0]["message"]["content"].is_string())
            throw TransportError("malformed judge response body");

        JudgeDecision d;
        d.rationale_text = parsed["choices"][0]["message"]["content"].get<std::string>();
        d.value = parse_decision(d.rationale_text);
        d.latency_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
        if (parsed.contains("usage") && parsed["usage"].contains("completion_tokens") &&
            parsed["usage"]["completion_tokens"].is_number()) {
            d.token_count = parsed["usage"]["completion_tokens"].get<long>();
        } else {
            // rough whitespace estimate when the server omits usage
            long n = 0;
            bool in_tok = false;
            for (char c : d.rationale_text) {
                bool sp = c == ' ' || c == '\n' || c == '\t';
                if (!sp && !in_tok) ++n;
                in_tok = !sp;
            }
            d.token_count = n;
        }
        return d;
    }
    throw TransportError("judge request failed after " +
                         std::to_string(cfg_.max_retries + 1) + " attempts: " + last_error);
}

JudgeFn make_http_judge(const EndpointConfig& cfg) {
    auto client = std::make_shared<JudgeClient>(cfg);
    return [client](const JudgeRequest& req) { return client->judge(req); };
}

}  // namespace mathverify
