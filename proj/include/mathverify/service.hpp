// service.hpp - HTTP reward endpoint for RL training loops.

#pragma once

#include <memory>
#include <string>

#include "mathverify/config.hpp"
#include "mathverify/judge_client.hpp"

namespace mathverify {

// POST /verify        one (question?, ground_truth, response) -> judgment
// POST /verify_batch  array in, order-preserving array out
// GET  /health        {"status":"ok","mode":...}
// GET  /monitor       gap statistics and alert state
// POST /trace         append one reward-trace point
//
// Verdicts over the wire equal direct library calls; the wire adds nothing.
class RewardService {
public:
    // judge_override replaces the HTTP judge built from options (tests use
    // in-process stubs).
    explicit RewardService(ServiceOptions options, JudgeFn judge_override = nullptr);
    ~RewardService();

    RewardService(const RewardService&) = delete;
    RewardService& operator=(const RewardService&) = delete;

    // Binds to options.listen_host/port and serves until stop(). Throws
    // ConfigError when the port cannot be bound.
    void run();

    // Binds to an ephemeral port and serves on a background thread until
    // stop(); returns the port.
    int start_background();

    void stop();

    const ServiceOptions& options() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace mathverify
