#include "mathverify/eval_harness.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mathverify {

namespace {

[[noreturn]] void line_error(size_t line, const std::string& what) {
    throw std::runtime_error("line " + std::to_string(line) + ": " + what);
}

std::string need_string(const nlohmann::json& obj, const char* field, size_t line) {
    auto it = obj.find(field);
    if (it == obj.end()) line_error(line, std::string("missing field '") + field + "'");
    if (!it->is_string()) line_error(line, std::string("field '") + field + "' must be a string");
    return it->get<std::string>();
}

std::string opt_string(const nlohmann::json& obj, const char* field, size_t line) {
    auto it = obj.find(field);
    if (it == obj.end()) return {};
    if (!it->is_string()) line_error(line, std::string("field '") + field + "' must be a string");
    return it->get<std::string>();
}

bool is_known_field(const std::string& k) {
    return k == "id" || k == "dataset" || k == "question" || k == "ground_truth" ||
           k == "response" || k == "gold_label" || k == "sampler_model";
}

}  // namespace

std::vector<EvalRecord> parse_records(const std::string& jsonl_text) {
    std::vector<EvalRecord> out;
    std::istringstream in(jsonl_text);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
        if (blank) continue;
        nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded()) line_error(line_no, "invalid JSON");
        if (!obj.is_object()) line_error(line_no, "expected a JSON object");

        EvalRecord r;
        r.line_number = line_no;
        r.id = need_string(obj, "id", line_no);
        r.ground_truth = need_string(obj, "ground_truth", line_no);
        if (r.ground_truth.empty()) line_error(line_no, "field 'ground_truth' is empty");
        r.response = need_string(obj, "response", line_no);
        r.dataset = opt_string(obj, "dataset", line_no);
        r.question = opt_string(obj, "question", line_no);
        r.sampler_model = opt_string(obj, "sampler_model", line_no);
        if (obj.contains("gold_label")) {
            if (!obj["gold_label"].is_string())
                line_error(line_no, "field 'gold_label' must be a string");
            std::string g = obj["gold_label"].get<std::string>();
            for (auto& c : g) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (g == "correct") {
                r.gold_label = VerdictValue::Correct;
            } else if (g == "incorrect") {
                r.gold_label = VerdictValue::Incorrect;
            } else {
                line_error(line_no, "field 'gold_label' must be 'correct' or 'incorrect'");
            }
        }
        for (auto it = obj.begin(); it != obj.end(); ++it)
            if (!is_known_field(it.key())) r.extra[it.key()] = it.value();
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<EvalRecord> load_records(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open records file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_records(ss.str());
}

nlohmann::ordered_json record_to_json(const EvalRecord& r) {
    nlohmann::ordered_json obj;
    obj["id"] = r.id;
    obj["dataset"] = r.dataset;
    obj["question"] = r.question;
    obj["ground_truth"] = r.ground_truth;
    obj["response"] = r.response;
    if (r.gold_label)
        obj["gold_label"] = *r.gold_label == VerdictValue::Correct ? "correct" : "incorrect";
    if (!r.sampler_model.empty()) obj["sampler_model"] = r.sampler_model;
    for (auto it = r.extra.begin(); it != r.extra.end(); ++it) obj[it.key()] = it.value();
    return obj;
}

void write_records(const std::string& path, const std::vector<EvalRecord>& records) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write records file: " + path);
    for (const auto& r : records) f << record_to_json(r).dump() << "\n";
}

ConfusionCounts score_verifier(const std::vector<EvalRecord>& records,
                               const VerifierFn& verifier) {
    ConfusionCounts c;
    for (const auto& r : records) {
        if (!r.gold_label)
            throw std::runtime_error("record '" + r.id + "' has no gold_label");
        bool predicted = verifier(r.question, r.ground_truth, r.response).correct();
        bool gold = *r.gold_label == VerdictValue::Correct;
        if (predicted && gold) ++c.tp;
        else if (predicted && !gold) ++c.fp;
        else if (!predicted && !gold) ++c.tn;
        else ++c.fn;
    }
    return c;
}

Prf precision_recall_f1(const ConfusionCounts& c) {
    Prf out;
    if (c.tp + c.fp > 0) out.precision = static_cast<double>(c.tp) / (c.tp + c.fp);
    if (c.tp + c.fn > 0) out.recall = static_cast<double>(c.tp) / (c.tp + c.fn);
    if (out.precision && out.recall && (*out.precision + *out.recall) > 0)
        out.f1 = 2.0 * *out.precision * *out.recall / (*out.precision + *out.recall);
    return out;
}

double cohen_kappa(const std::vector<VerdictValue>& a, const std::vector<VerdictValue>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("label vectors differ in length");
    if (a.empty()) throw std::invalid_argument("label vectors are empty");
    double n = static_cast<double>(a.size());
    long agree = 0, a_pos = 0, b_pos = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) ++agree;
        if (a[i] == VerdictValue::Correct) ++a_pos;
        if (b[i] == VerdictValue::Correct) ++b_pos;
    }
    double po = agree / n;
    double pa = a_pos / n, pb = b_pos / n;
    double pe = pa * pb + (1 - pa) * (1 - pb);
    if (pe >= 1.0) return po >= 1.0 ? 1.0 : 0.0;
    return (po - pe) / (1 - pe);
}

double avg_at_k(const std::vector<std::vector<bool>>& correctness) {
    if (correctness.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& problem : correctness) {
        if (problem.empty()) throw std::invalid_argument("empty sample list for a problem");
        long hits = 0;
        for (bool b : problem) hits += b ? 1 : 0;
        sum += static_cast<double>(hits) / static_cast<double>(problem.size());
    }
    return sum / static_cast<double>(correctness.size());
}

MetricsReport evaluate(const std::vector<EvalRecord>& records, const VerifierFn& verifier) {
    MetricsReport report;
    for (const auto& r : records) {
        if (!r.gold_label)
            throw std::runtime_error("record '" + r.id + "' has no gold_label");
        bool predicted = verifier(r.question, r.ground_truth, r.response).correct();
        bool gold = *r.gold_label == VerdictValue::Correct;
        auto bump = [&](ConfusionCounts& c) {
            if (predicted && gold) ++c.tp;
            else if (predicted && !gold) ++c.fp;
            else if (!predicted && !gold) ++c.tn;
            else ++c.fn;
        };
        bump(report.per_dataset[r.dataset.empty() ? "default" : r.dataset].counts);
        bump(report.overall.counts);
    }
    for (auto& [name, m] : report.per_dataset) m.prf = precision_recall_f1(m.counts);
    report.overall.prf = precision_recall_f1(report.overall.counts);
    return report;
}

namespace {

nlohmann::ordered_json prf_json(const DatasetMetrics& m) {
    nlohmann::ordered_json j;
    j["counts"] = {{"tp", m.counts.tp}, {"fp", m.counts.fp}, {"tn", m.counts.tn},
                   {"fn", m.counts.fn}};
    j["precision"] = m.prf.precision ? nlohmann::ordered_json(*m.prf.precision)
                                     : nlohmann::ordered_json(nullptr);
    j["recall"] = m.prf.recall ? nlohmann::ordered_json(*m.prf.recall)
                               : nlohmann::ordered_json(nullptr);
    j["f1"] = m.prf.f1;
    return j;
}

std::string fmt3(const std::optional<double>& v) {
    if (!v) return "null";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", *v);
    return buf;
}

}  // namespace

RenderedReport render_report(const MetricsReport& report) {
    nlohmann::ordered_json j;
    j["overall"] = prf_json(report.overall);
    nlohmann::ordered_json per = nlohmann::ordered_json::object();
    for (const auto& [name, m] : report.per_dataset) per[name] = prf_json(m);
    j["per_dataset"] = per;
    j["kappa"] = report.kappa ? nlohmann::ordered_json(*report.kappa)
                              : nlohmann::ordered_json(nullptr);

    std::ostringstream t;
    auto row = [&](const std::string& name, const DatasetMetrics& m) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-16s %8ld %8ld %8ld %8ld %10s %10s %10s\n",
                      name.c_str(), m.counts.tp, m.counts.fp, m.counts.tn, m.counts.fn,
                      fmt3(m.prf.precision).c_str(), fmt3(m.prf.recall).c_str(),
                      fmt3(m.prf.f1).c_str());
        t << buf;
    };
    char head[160];
    std::snprintf(head, sizeof(head), "%-16s %8s %8s %8s %8s %10s %10s %10s\n", "dataset",
                  "tp", "fp", "tn", "fn", "precision", "recall", "f1");
    t << head;
    for (const auto& [name, m] : report.per_dataset) row(name, m);
    row("overall", report.overall);
    if (report.kappa) t << "kappa: " << fmt3(report.kappa) << "\n";

    RenderedReport out;
    out.json = j.dump(2);
    out.text = t.str();
    return out;
}

}  // namespace mathverify
