// prober.hpp - Adversarial answer generators and attack measurement.
//
// Thirteen hacking-pattern families, from single punctuation characters to
// decision-marker injection. Generation is a pure function of the seed, and
// every produced record is guaranteed to fail the rule verifier.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mathverify/judgment.hpp"
#include "mathverify/rule_verifier.hpp"

namespace mathverify {

enum class PatternKind {
    EmptySymbols,
    Gibberish,
    SimpleWords,
    HtmlMarkdown,
    InstructionHijacking,
    PromptInjection,
    UnicodeConfusables,
    LatexNotation,
    AnswerRepetition,
    AdversarialPrefixes,
    MixedLanguage,
    AnswerExplanation,
    SystemPromptMimicry,
};

inline constexpr std::array<PatternKind, 13> kAllPatternKinds = {
    PatternKind::EmptySymbols,       PatternKind::Gibberish,
    PatternKind::SimpleWords,        PatternKind::HtmlMarkdown,
    PatternKind::InstructionHijacking, PatternKind::PromptInjection,
    PatternKind::UnicodeConfusables, PatternKind::LatexNotation,
    PatternKind::AnswerRepetition,   PatternKind::AdversarialPrefixes,
    PatternKind::MixedLanguage,      PatternKind::AnswerExplanation,
    PatternKind::SystemPromptMimicry,
};

const char* to_string(PatternKind k);
std::optional<PatternKind> pattern_kind_from_string(const std::string& s);

// Number of fixed variants for the kind (1 for the seeded generators).
size_t variant_count(PatternKind k);

// The decoy text rendered through confusable codepoints; folding the
// UnicodeConfusables variants recovers exactly this string.
extern const char* const kConfusableDecoy;

// Renders one variant. `rng` feeds the Gibberish generator; fixed-string
// kinds ignore it.
std::string adversarial_variant(PatternKind k, size_t variant_index, std::mt19937_64& rng);

// Uniformly random variant of the kind.
std::string generate_adversarial(PatternKind k, std::mt19937_64& rng);

struct AdversarialSample {
    std::string base_id;
    std::string question;
    std::string ground_truth;
};

struct AdversarialRecord {
    std::string base_id;
    std::string question;
    std::string ground_truth;
    PatternKind pattern_kind = PatternKind::EmptySymbols;
    size_t variant_index = 0;
    std::string adversarial_answer;
    // gold label is Incorrect by construction
};

// 13 records per sample, one random variant each, deterministic under the
// seed. Records whose answer would pass the rule verifier against their own
// ground truth are resampled, then dropped with a stderr warning.
std::vector<AdversarialRecord> build_adversarial_dataset(
    const std::vector<AdversarialSample>& samples, uint64_t seed,
    const EquivConfig& rule_cfg = {});

// JSONL of {"question": ..., "ground_truth": ..., "id"?: ...}.
std::vector<AdversarialSample> load_samples(const std::string& path);

void write_adversarial_records(const std::string& path,
                               const std::vector<AdversarialRecord>& records);
std::vector<AdversarialRecord> load_adversarial_records(const std::string& path);

struct PatternResult {
    long total = 0;
    long hits = 0;  // judged Correct
    double rate = 0.0;
};

struct AttackReport {
    std::map<PatternKind, PatternResult> per_pattern;
    double overall_average = 0.0;        // unweighted mean over pattern kinds
    double record_weighted_rate = 0.0;   // hits / records, exposed as a flag
    long total_records = 0;
};

AttackReport attack_success_rate(const VerifierFn& verifier,
                                 const std::vector<AdversarialRecord>& records);

std::string render_attack_report_json(const AttackReport& report, bool record_weighted);

}  // namespace mathverify
