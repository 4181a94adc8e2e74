// eval_harness.hpp - Static classification evaluation over labeled records.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mathverify/judgment.hpp"

namespace mathverify {

struct EvalRecord {
    std::string id;
    std::string dataset;
    std::string question;
    std::string ground_truth;
    std::string response;
    std::optional<VerdictValue> gold_label;
    std::string sampler_model;
    nlohmann::json extra = nlohmann::json::object();  // unknown fields, preserved
    size_t line_number = 0;
};

// One JSON object per line. Schema violations throw std::runtime_error
// naming the offending line.
std::vector<EvalRecord> load_records(const std::string& path);
std::vector<EvalRecord> parse_records(const std::string& jsonl_text);
void write_records(const std::string& path, const std::vector<EvalRecord>& records);
nlohmann::ordered_json record_to_json(const EvalRecord& r);

struct ConfusionCounts {
    long tp = 0, fp = 0, tn = 0, fn = 0;
    long total() const { return tp + fp + tn + fn; }
    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        tn += o.tn;
        fn += o.fn;
        return *this;
    }
};

// Positive class is Correct. Throws when a gold label is missing.
ConfusionCounts score_verifier(const std::vector<EvalRecord>& records,
                               const VerifierFn& verifier);

struct Prf {
    std::optional<double> precision;  // null when tp+fp == 0
    std::optional<double> recall;     // null when tp+fn == 0
    double f1 = 0.0;
};

Prf precision_recall_f1(const ConfusionCounts& c);

// Binary Cohen's kappa over two equal-length label vectors.
double cohen_kappa(const std::vector<VerdictValue>& a, const std::vector<VerdictValue>& b);

// Mean over samples per problem, then mean over problems. Every problem
// needs at least one sample.
double avg_at_k(const std::vector<std::vector<bool>>& correctness);

struct DatasetMetrics {
    ConfusionCounts counts;
    Prf prf;
};

struct MetricsReport {
    std::map<std::string, DatasetMetrics> per_dataset;
    DatasetMetrics overall;
    std::optional<double> kappa;
};

// Runs the verifier over every record and aggregates per dataset.
MetricsReport evaluate(const std::vector<EvalRecord>& records, const VerifierFn& verifier);

struct RenderedReport {
    std::string json;  // stable key order, full precision
    std::string text;  // aligned table, three decimals
};

RenderedReport render_report(const MetricsReport& report);

}  // namespace mathverify
