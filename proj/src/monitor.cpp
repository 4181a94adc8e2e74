#include "mathverify/monitor.hpp"

#include <fstream>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace mathverify {

void RewardTrace::append(const TracePoint& p) {
    if (!points_.empty() && p.step <= points_.back().step)
        throw std::invalid_argument("trace steps must be strictly increasing");
    auto in_range = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_range(p.train_reward) || (p.oracle_reward && !in_range(*p.oracle_reward)))
        throw std::invalid_argument("rewards must lie in [0, 1]");
    points_.push_back(p);
}

std::vector<QaPair> sample_oracle_batch(const std::vector<QaPair>& pool, size_t n,
                                        uint64_t seed) {
    if (pool.empty()) throw std::invalid_argument("empty training pool");
    std::vector<size_t> idx(pool.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::mt19937_64 rng(seed);
    size_t take = std::min(n, pool.size());
    // partial Fisher-Yates: only the taken prefix needs shuffling
    for (size_t i = 0; i < take; ++i) {
        std::uniform_int_distribution<size_t> d(i, idx.size() - 1);
        std::swap(idx[i], idx[d(rng)]);
    }
    std::vector<QaPair> out;
    out.reserve(take);
    for (size_t i = 0; i < take; ++i) out.push_back(pool[idx[i]]);
    return out;
}

namespace {

struct GapSeries {
    std::vector<long> steps;
    std::vector<double> gaps;
};

GapSeries oracle_gaps(const RewardTrace& trace) {
    GapSeries s;
    for (const auto& p : trace.points()) {
        if (!p.oracle_reward) continue;
        s.steps.push_back(p.step);
        s.gaps.push_back(p.train_reward - *p.oracle_reward);
    }
    return s;
}

}  // namespace

std::optional<DivergenceAlert> detect_divergence(const RewardTrace& trace, int window,
                                                 double threshold) {
    if (window < 1) throw std::invalid_argument("window must be positive");
    GapSeries s = oracle_gaps(trace);
    if (s.gaps.size() < static_cast<size_t>(window))
        throw std::invalid_argument("not enough oracle-annotated points for the window");
    double sum = 0.0;
    for (size_t i = 0; i < s.gaps.size(); ++i) {
        sum += s.gaps[i];
        if (i >= static_cast<size_t>(window)) sum -= s.gaps[i - window];
        if (i + 1 >= static_cast<size_t>(window)) {
            double mean = sum / window;
            if (mean >= threshold) {
                DivergenceAlert a;
                a.first_flag_step = s.steps[i];
                a.window_mean_gap = mean;
                a.threshold = threshold;
                a.window = window;
                return a;
            }
        }
    }
    return std::nullopt;
}

GapStats gap_stats(const RewardTrace& trace, int window, double threshold) {
    GapStats out;
    GapSeries s = oracle_gaps(trace);
    out.oracle_points = s.gaps.size();
    if (s.gaps.size() < static_cast<size_t>(window)) return out;
    double sum = 0.0;
    for (size_t i = 0; i < s.gaps.size(); ++i) {
        sum += s.gaps[i];
        if (i >= static_cast<size_t>(window)) sum -= s.gaps[i - window];
        if (i + 1 >= static_cast<size_t>(window)) {
            double mean = sum / window;
            out.last_window_mean = mean;
            if (!out.min_window_mean || mean < *out.min_window_mean)
                out.min_window_mean = mean;
            if (!out.max_window_mean || mean > *out.max_window_mean)
                out.max_window_mean = mean;
            if (!out.alert && mean >= threshold) {
                DivergenceAlert a;
                a.first_flag_step = s.steps[i];
                a.window_mean_gap = mean;
                a.threshold = threshold;
                a.window = window;
                out.alert = a;
            }
        }
    }
    return out;
}

RewardTrace load_trace(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open trace file: " + path);
    RewardTrace trace;
    std::string line;
    size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object() || !obj.contains("step") ||
            !obj["step"].is_number() || !obj.contains("train_reward") ||
            !obj["train_reward"].is_number())
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": invalid trace point");
        TracePoint p;
        p.step = obj["step"].get<long>();
        p.train_reward = obj["train_reward"].get<double>();
        if (obj.contains("oracle_reward") && obj["oracle_reward"].is_number())
            p.oracle_reward = obj["oracle_reward"].get<double>();
        try {
            trace.append(p);
        } catch (const std::invalid_argument& ex) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": " + ex.what());
        }
    }
    return trace;
}

void save_trace(const std::string& path, const RewardTrace& trace) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write trace file: " + path);
    for (const auto& p : trace.points()) {
        nlohmann::ordered_json obj;
        obj["step"] = p.step;
        obj["train_reward"] = p.train_reward;
        obj["oracle_reward"] =
            p.oracle_reward ? nlohmann::ordered_json(*p.oracle_reward)
                            : nlohmann::ordered_json(nullptr);
        f << obj.dump() << "\n";
    }
}

}  // namespace mathverify
