// hybrid.hpp - Rule-first cascade with a model-judge fallback.
//
// The rule verifier screens everything; the judge is consulted only for
// rule-stage rejections, so precision is floored by the rule layer and
// judge workload is bounded by its rejection count.

#pragma once

#include <atomic>
#include <cstddef>
#include <list>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "mathverify/judge_client.hpp"
#include "mathverify/judgment.hpp"
#include "mathverify/rule_verifier.hpp"

namespace mathverify {

struct HybridConfig {
    EquivConfig equiv;
    PromptTemplate template_kind = PromptTemplate::WithoutQuestion;
    DecodeParams decode;
    size_t cache_capacity = 100000;
    bool cache_enabled = true;
    size_t raw_tail_limit = 2000;  // candidate fallback when extraction is empty
};

// Thread-safe LRU of judge decisions keyed on normalized (gt, answer,
// template) triples. Stores decisions only; enabling or disabling it can
// change judge call counts, never verdicts.
class JudgeCache {
public:
    explicit JudgeCache(size_t capacity) : capacity_(capacity) {}

    bool get(const std::string& key, DecisionValue& out);
    void put(const std::string& key, DecisionValue value);
    size_t size() const;

private:
    size_t capacity_;
    mutable std::mutex m_;
    std::list<std::pair<std::string, DecisionValue>> order_;
    std::unordered_map<std::string,
                       std::list<std::pair<std::string, DecisionValue>>::iterator>
        index_;
};

struct BatchItem {
    std::string question;
    std::string ground_truth;
    std::string response;
};

class HybridVerifier {
public:
    explicit HybridVerifier(HybridConfig cfg = {}, JudgeFn judge = nullptr);

    // Rule stage first; returns immediately on Correct. Judge failures are
    // absorbed as Incorrect. Without a judge this is exactly verify_rule.
    Judgment verify(const std::string& question, const std::string& ground_truth,
                    const std::string& response);

    // Order-preserving; duplicate (gt, answer) pairs hit the cache.
    std::vector<Judgment> verify_batch(const std::vector<BatchItem>& items);

    size_t judge_calls() const { return judge_calls_.load(); }
    const HybridConfig& config() const { return cfg_; }
    bool has_judge() const { return static_cast<bool>(judge_); }

private:
    HybridConfig cfg_;
    JudgeFn judge_;
    JudgeCache cache_;
    std::atomic<size_t> judge_calls_{0};
};

// Judge-only verifier: extraction feeds the candidate slot, no rule stage.
Judgment verify_model(const std::string& question, const std::string& ground_truth,
                      const std::string& response, const JudgeFn& judge,
                      const HybridConfig& cfg = {});

// Candidate slot value: the rule layer's extracted answer when available,
// else the trailing `tail_limit` bytes of the response.
std::string candidate_for_judge(const std::string& response, const EquivConfig& equiv,
                                size_t tail_limit);

}  // namespace mathverify
