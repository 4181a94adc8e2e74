// rule_verifier.hpp - Deterministic answer extraction and equivalence.
//
// The high-precision side of the verifier pair: if this layer says Correct,
// the answer matches the ground truth under exact arithmetic or a tight
// numeric tolerance. Anything it cannot establish is Incorrect.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mathverify/expr.hpp"
#include "mathverify/judgment.hpp"

namespace mathverify {

struct Domain {
    long lo = -10;
    long hi = 10;
    unsigned max_denominator = 12;
};

struct EquivConfig {
    double rel_tol = 1e-6;
    double abs_tol = 1e-9;
    int n_points = 8;           // random evaluation points for symbolic pairs
    uint64_t seed = 0x9e3779b9;
    bool strip_percent = false;
    bool degree_coercion = false;  // Degree(x) <-> x*pi/180
    std::vector<std::string> marker_phrases = {"final answer is", "the answer is",
                                               "Final Answer:"};
    Domain domain;
    int max_draws_per_point = 32;
};

enum class ExtractionStrategy { BoxedLast, MarkerPhrase, LastLine, None };

const char* to_string(ExtractionStrategy s);

struct Extraction {
    std::string raw_span;
    ExtractionStrategy strategy = ExtractionStrategy::None;
    size_t span_begin = 0;  // byte offsets into the response
    size_t span_end = 0;
};

// Tries, in order: the last \boxed{...} with balanced braces, the last
// marker phrase (remainder of that sentence/line), then the last non-empty
// line capped at 512 bytes.
Extraction extract_answer(std::string_view response);
Extraction extract_answer(std::string_view response,
                          const std::vector<std::string>& marker_phrases);

enum class Basis {
    StringMatch,
    NumericEqual,
    SymbolicEqual,
    SetEqual,
    NoMatch,
    Unparseable,
};

const char* to_string(Basis b);

struct Verdict {
    VerdictValue value = VerdictValue::Incorrect;
    Basis basis = Basis::NoMatch;
};

// Decision ladder over normalized inputs: canonical-form equality, then
// exact/tolerance numerics, then probabilistic symbolic equality at seeded
// random rational points, then elementwise container recursion. Internal
// failures degrade to NoMatch.
Basis check_equivalence(const ExprPtr& pred, const ExprPtr& gt, const EquivConfig& cfg);

// extract -> parse -> normalize -> check_equivalence, with a raw-string
// fast path. Unparseable predictions are Incorrect; an unparseable ground
// truth falls back to normalized string comparison only.
Judgment verify_rule(std::string_view response, std::string_view ground_truth,
                     const EquivConfig& cfg = {});

// Whitespace-collapsed, lowercased copy used by the fast path.
std::string normalized_string_form(std::string_view s);

}  // namespace mathverify
