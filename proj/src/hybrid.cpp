#include "mathverify/hybrid.hpp"

#include <chrono>

#include "mathverify/normalize.hpp"
#include "mathverify/parse.hpp"

namespace mathverify {

bool JudgeCache::get(const std::string& key, DecisionValue& out) {
    std::lock_guard<std::mutex> lk(m_);
    auto it = index_.find(key);
    if (it == index_.end()) return false;
    order_.splice(order_.begin(), order_, it->second);
    out = it->second->second;
    return true;
}

void JudgeCache::put(const std::string& key, DecisionValue value) {
    if (capacity_ == 0) return;
    std::lock_guard<std::mutex> lk(m_);
    auto it = index_.find(key);
    if (it != index_.end()) {
        it->second->second = value;
        order_.splice(order_.begin(), order_, it->second);
        return;
    }
    order_.emplace_front(key, value);
    index_[key] = order_.begin();
    if (index_.size() > capacity_) {
        index_.erase(order_.back().first);
        order_.pop_back();
    }
}

size_t JudgeCache::size() const {
    std::lock_guard<std::mutex> lk(m_);
    return index_.size();
}

namespace {

// Normalized canonical form when parseable, else a tagged raw form, so the
// cache key treats "0.5" and "1/2" as the same answer.
std::string cache_facet(const std::string& text, const EquivConfig& equiv) {
    ParseResult p = parse_answer(text);
    if (p.ok())
        return to_canonical_string(normalize(p.expr, NormalizeOptions{equiv.strip_percent}));
    return "raw:" + normalized_string_form(text);
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

std::string candidate_for_judge(const std::string& response, const EquivConfig& equiv,
                                size_t tail_limit) {
    Extraction ex = extract_answer(response, equiv.marker_phrases);
    if (!ex.raw_span.empty()) return ex.raw_span;
    if (response.size() <= tail_limit) return response;
    return response.substr(response.size() - tail_limit);
}

HybridVerifier::HybridVerifier(HybridConfig cfg, JudgeFn judge)
    : cfg_(std::move(cfg)), judge_(std::move(judge)), cache_(cfg_.cache_capacity) {}

Judgment HybridVerifier::verify(const std::string& question,
                                const std::string& ground_truth,
                                const std::string& response) {
    auto t0 = std::chrono::steady_clock::now();
    Judgment rule = verify_rule(response, ground_truth, cfg_.equiv);
    if (!judge_) return rule;  // degenerates exactly to the rule verifier
    if (rule.correct()) {
        rule.provenance = Provenance::HybridRuleStage;
        return rule;
    }

    std::string candidate = candidate_for_judge(response, cfg_.equiv, cfg_.raw_tail_limit);
    std::string key = cache_facet(ground_truth, cfg_.equiv) + '\x1f' +
                      cache_facet(candidate, cfg_.equiv) + '\x1f' +
                      template_id(cfg_.template_kind);

    DecisionValue decision;
    bool cached = cfg_.cache_enabled && cache_.get(key, decision);
    std::string basis;
    if (!cached) {
        JudgeRequest req;
        if (cfg_.template_kind == PromptTemplate::WithQuestion) req.question = question;
        req.ground_truth = ground_truth;
        req.candidate = candidate;
        req.template_kind = cfg_.template_kind;
        req.decode = cfg_.decode;
        try {
            ++judge_calls_;
            decision = judge_(req).value;
        } catch (const std::exception&) {
            // fail closed: a broken judge never grants reward
            Judgment j;
            j.verdict = VerdictValue::Incorrect;
            j.provenance = Provenance::HybridModelStage;
            j.basis = "judge_error";
            j.elapsed_ms = ms_since(t0);
            return j;
        }
        if (cfg_.cache_enabled) cache_.put(key, decision);
    }

    Judgment j;
    j.verdict =
        decision == DecisionValue::Yes ? VerdictValue::Correct : VerdictValue::Incorrect;
    j.provenance = Provenance::HybridModelStage;
    j.basis = std::string("judge_") + to_string(decision);
    j.elapsed_ms = ms_since(t0);
    return j;
}

std::vector<Judgment> HybridVerifier::verify_batch(const std::vector<BatchItem>& items) {
    std::vector<Judgment> out;
    out.reserve(items.size());
    for (const auto& it : items) out.push_back(verify(it.question, it.ground_truth, it.response));
    return out;
}

Judgment verify_model(const std::string& question, const std::string& ground_truth,
                      const std::string& response, const JudgeFn& judge,
                      const HybridConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    Judgment j;
    j.provenance = Provenance::Model;
    JudgeRequest req;
    if (cfg.template_kind == PromptTemplate::WithQuestion) req.question = question;
    req.ground_truth = ground_truth;
    req.candidate = candidate_for_judge(response, cfg.equiv, cfg.raw_tail_limit);
    req.template_kind = cfg.template_kind;
    req.decode = cfg.decode;
    try {
        JudgeDecision d = judge(req);
        j.verdict = d.value == DecisionValue::Yes ? VerdictValue::Correct
                                                  : VerdictValue::Incorrect;
        j.basis = std::string("judge_") + to_string(d.value);
    } catch (const std::exception&) {
        j.verdict = VerdictValue::Incorrect;
        j.basis = "judge_error";
    }
    j.elapsed_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
    return j;
}

}  // namespace mathverify
