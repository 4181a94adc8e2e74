// judgment.hpp - Verdict types shared by every verifier flavor.

#pragma once

#include <functional>
#include <string>

namespace mathverify {

enum class VerdictValue { Correct, Incorrect };

enum class Provenance { Rule, Model, HybridRuleStage, HybridModelStage };

const char* to_string(VerdictValue v);
const char* to_string(Provenance p);

struct Judgment {
    VerdictValue verdict = VerdictValue::Incorrect;
    Provenance provenance = Provenance::Rule;
    std::string basis;  // rule basis or judge decision, e.g. "numeric_equal"
    double elapsed_ms = 0.0;

    bool correct() const { return verdict == VerdictValue::Correct; }
};

struct RewardSpec {
    double correct_reward = 1.0;
    double incorrect_reward = 0.0;
};

double reward(const Judgment& j, const RewardSpec& spec = {});

// Any verifier: (question, ground_truth, response) -> Judgment.
using VerifierFn = std::function<Judgment(
    const std::string& question, const std::string& ground_truth,
    const std::string& response)>;

}  // namespace mathverify
