// monitor.hpp - Training-vs-oracle reward divergence tracking.
//
// Reward hacking shows up as the training reward inflating above the oracle
// reward; the detector flags a sustained one-sided gap. Under-rewarding is
// reported as a negative gap statistic, never an alert.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mathverify {

struct TracePoint {
    long step = 0;
    double train_reward = 0.0;
    std::optional<double> oracle_reward;
};

class RewardTrace {
public:
    // Steps must be strictly increasing; rewards must lie in [0, 1].
    void append(const TracePoint& p);
    const std::vector<TracePoint>& points() const { return points_; }
    bool empty() const { return points_.empty(); }

private:
    std::vector<TracePoint> points_;
};

struct DivergenceAlert {
    long first_flag_step = 0;
    double window_mean_gap = 0.0;
    double threshold = 0.0;
    int window = 0;
};

struct QaPair {
    std::string question;
    std::string ground_truth;
};

// n draws without replacement (the whole pool when n exceeds it),
// deterministic under the seed.
std::vector<QaPair> sample_oracle_batch(const std::vector<QaPair>& pool, size_t n,
                                        uint64_t seed);

// Sliding mean of (train - oracle) over consecutive oracle-annotated
// points; flags the first window whose mean reaches the threshold. Throws
// std::invalid_argument when fewer than `window` oracle points exist.
std::optional<DivergenceAlert> detect_divergence(const RewardTrace& trace,
                                                 int window = 20,
                                                 double threshold = 0.15);

struct GapStats {
    size_t oracle_points = 0;
    std::optional<double> last_window_mean;
    std::optional<double> min_window_mean;
    std::optional<double> max_window_mean;
    std::optional<DivergenceAlert> alert;
};

// Never throws; callers poll this regardless of how much data arrived.
GapStats gap_stats(const RewardTrace& trace, int window = 20, double threshold = 0.15);

// JSONL persistence: {"step":n,"train_reward":x,"oracle_reward":y|null}
RewardTrace load_trace(const std::string& path);
void save_trace(const std::string& path, const RewardTrace& trace);

}  // namespace mathverify
