#include "mathverify/rule_verifier.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <random>

#include "mathverify/eval.hpp"
#include "mathverify/hash.hpp"
#include "mathverify/normalize.hpp"
#include "mathverify/parse.hpp"

namespace mathverify {

const char* to_string(VerdictValue v) {
    return v == VerdictValue::Correct ? "correct" : "incorrect";
}

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::Rule: return "rule";
        case Provenance::Model: return "model";
        case Provenance::HybridRuleStage: return "hybrid_rule_stage";
        case Provenance::HybridModelStage: return "hybrid_model_stage";
    }
    return "rule";
}

double reward(const Judgment& j, const RewardSpec& spec) {
    return j.correct() ? spec.correct_reward : spec.incorrect_reward;
}

const char* to_string(ExtractionStrategy s) {
    switch (s) {
        case ExtractionStrategy::BoxedLast: return "boxed_last";
        case ExtractionStrategy::MarkerPhrase: return "marker_phrase";
        case ExtractionStrategy::LastLine: return "last_line";
        case ExtractionStrategy::None: return "none";
    }
    return "none";
}

const char* to_string(Basis b) {
    switch (b) {
        case Basis::StringMatch: return "string_match";
        case Basis::NumericEqual: return "numeric_equal";
        case Basis::SymbolicEqual: return "symbolic_equal";
        case Basis::SetEqual: return "set_equal";
        case Basis::NoMatch: return "no_match";
        case Basis::Unparseable: return "unparseable";
    }
    return "no_match";
}

// ---------------------------------------------------------------------------
// Extraction
// ---------------------------------------------------------------------------

namespace {

constexpr size_t kLastLineCap = 512;

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)); }

std::string_view trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

char ascii_lower(char c) {
    return c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c;
}

// Last case-insensitive occurrence of needle; npos if absent.
size_t rfind_icase(std::string_view hay, std::string_view needle) {
    if (needle.empty() || needle.size() > hay.size()) return std::string_view::npos;
    for (size_t start = hay.size() - needle.size() + 1; start-- > 0;) {
        bool hit = true;
        for (size_t k = 0; k < needle.size(); ++k) {
            if (ascii_lower(hay[start + k]) != ascii_lower(needle[k])) {
                hit = false;
                break;
            }
        }
        if (hit) return start;
    }
    return std::string_view::npos;
}

// Finds the last \boxed{...} whose braces balance; returns inner span.
bool find_last_boxed(std::string_view s, size_t& begin, size_t& end) {
    const std::string_view kBoxed = "\\boxed{";
    size_t search_end = s.size();
    while (true) {
        size_t at = s.rfind(kBoxed, search_end == 0 ? 0 : search_end - 1);
        if (at == std::string_view::npos) return false;
        size_t open = at + kBoxed.size() - 1;  // the '{'
        int depth = 0;
        for (size_t i = open; i < s.size(); ++i) {
            char c = s[i];
            if (c == '\\' && i + 1 < s.size()) {
                ++i;
                continue;
            }
            if (c == '{') ++depth;
            if (c == '}') {
                --depth;
                if (depth == 0) {
                    begin = open + 1;
                    end = i;
                    return true;
                }
            }
        }
        if (at == 0) return false;
        search_end = at;  // unbalanced; try an earlier \boxed
    }
}

// Cuts a marker-phrase remainder at the end of the sentence: a terminator
// followed by whitespace or end of text. Dots inside numbers survive.
std::string_view cut_sentence(std::string_view s) {
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '\n') return s.substr(0, i);
        if (c == '.' || c == '!' || c == '?') {
            bool at_end = i + 1 == s.size();
            if (at_end || is_space(s[i + 1])) return s.substr(0, i);
        }
    }
    return s;
}

size_t utf8_floor(std::string_view s, size_t pos) {
    while (pos > 0 && (static_cast<unsigned char>(s[pos]) & 0xC0) == 0x80) --pos;
    return pos;
}

}  // namespace

Extraction extract_answer(std::string_view response,
                          const std::vector<std::string>& marker_phrases) {
    Extraction out;
    if (trim(response).empty()) return out;

    size_t b = 0, e = 0;
    if (find_last_boxed(response, b, e)) {
        std::string_view span = trim(response.substr(b, e - b));
        out.raw_span = std::string(span);
        out.strategy = ExtractionStrategy::BoxedLast;
        out.span_begin = b;
        out.span_end = e;
        return out;
    }

    size_t best = std::string_view::npos;
    size_t best_len = 0;
    for (const auto& m : marker_phrases) {
        size_t at = rfind_icase(response, m);
        if (at == std::string_view::npos) continue;
        if (best == std::string_view::npos || at > best ||
            (at == best && m.size() > best_len)) {
            best = at;
            best_len = m.size();
        }
    }
    if (best != std::string_view::npos) {
        size_t start = best + best_len;
        std::string_view rest = cut_sentence(response.substr(start));
        std::string_view span = trim(rest);
        if (!span.empty()) {
            size_t sb = start + (span.data() - rest.data());
            out.raw_span = std::string(span);
            out.strategy = ExtractionStrategy::MarkerPhrase;
            out.span_begin = sb;
            out.span_end = sb + span.size();
            return out;
        }
    }

    // last non-empty line
    size_t line_end = response.size();
    while (line_end > 0) {
        size_t nl = response.rfind('\n', line_end - 1);
        size_t line_begin = nl == std::string_view::npos ? 0 : nl + 1;
        std::string_view line = trim(response.substr(line_begin, line_end - line_begin));
        if (!line.empty()) {
            size_t sb = line_begin + (line.data() - response.data() - line_begin);
            size_t se = sb + line.size();
            if (se - sb > kLastLineCap) se = utf8_floor(response, sb + kLastLineCap);
            out.raw_span = std::string(response.substr(sb, se - sb));
            out.strategy = ExtractionStrategy::LastLine;
            out.span_begin = sb;
            out.span_end = se;
            return out;
        }
        if (nl == std::string_view::npos) break;
        line_end = nl;
    }
    return out;
}

Extraction extract_answer(std::string_view response) {
    return extract_answer(response, EquivConfig{}.marker_phrases);
}

std::string normalized_string_form(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : trim(s)) {
        if (is_space(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) out += ' ';
        pending_space = false;
        out += ascii_lower(c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Equivalence ladder
// ---------------------------------------------------------------------------

namespace {

bool float_close(double a, double b, const EquivConfig& cfg) {
    double diff = std::abs(a - b);
    double scale = std::max(std::abs(a), std::abs(b));
    return diff <= std::max(cfg.abs_tol, cfg.rel_tol * scale);
}

bool is_container(const ExprPtr& e) { return !is_scalar(e); }

bool closed_form_numeric(const ExprPtr& e) {
    return is_scalar(e) && !contains_unit_wrapper(e) && free_vars(e).empty();
}

Rational random_rational(std::mt19937_64& rng, const Domain& d) {
    std::uniform_int_distribution<long> num(d.lo, d.hi);
    std::uniform_int_distribution<long> den(1, std::max(1u, d.max_denominator));
    return Rational(num(rng), den(rng));
}

// Compares both sides at one binding; exact when both sides are exact.
// Returns nullopt when evaluation fails at this point.
std::optional<bool> equal_at_point(const ExprPtr& a, const ExprPtr& b,
                                   const Bindings& binds, const EquivConfig& cfg) {
    try {
        auto va = eval_exact(a, binds);
        auto vb = eval_exact(b, binds);
        if (va && vb) return *va == *vb;
        double fa = eval_float(a, binds);
        double fb = eval_float(b, binds);
        return float_close(fa, fb, cfg);
    } catch (const EvalError&) {
        return std::nullopt;
    }
}

Basis equiv(const ExprPtr& pred, const ExprPtr& gt, const EquivConfig& cfg, int depth);

bool members_match(const std::vector<ExprPtr>& pred, const std::vector<ExprPtr>& gt,
                   bool ordered, const EquivConfig& cfg, int depth) {
    if (pred.size() != gt.size()) return false;
    if (ordered) {
        for (size_t i = 0; i < pred.size(); ++i)
            if (equiv(pred[i], gt[i], cfg, depth + 1) == Basis::NoMatch) return false;
        return true;
    }
    std::vector<bool> used(gt.size(), false);
    for (const auto& p : pred) {
        bool found = false;
        for (size_t j = 0; j < gt.size(); ++j) {
            if (used[j]) continue;
            if (equiv(p, gt[j], cfg, depth + 1) != Basis::NoMatch) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

Basis equiv(const ExprPtr& pred, const ExprPtr& gt, const EquivConfig& cfg, int depth) {
    if (depth > 64) return Basis::NoMatch;

    // (1) canonical forms identical
    if (compare(pred, gt) == 0)
        return closed_form_numeric(pred) ? Basis::NumericEqual : Basis::StringMatch;

    // Unit wrappers are inert: a Degree/Percent answer can only match a
    // same-wrapped answer, operand by operand. With coercion on, callers
    // rewrote Degree away before reaching here.
    bool pw = contains_unit_wrapper(pred);
    bool gw = contains_unit_wrapper(gt);
    if (pw || gw) {
        if (pred->kind == gt->kind &&
            (pred->kind == ExprKind::Percent || pred->kind == ExprKind::Degree)) {
            Basis inner = equiv(pred->kids[0], gt->kids[0], cfg, depth + 1);
            return inner == Basis::NoMatch ? Basis::NoMatch : inner;
        }
        if (is_container(pred) && is_container(gt)) {
            // containers may hold wrapped members; recurse below
        } else {
            return Basis::NoMatch;
        }
    }

    // (2) both closed-form numeric
    if (!pw && !gw && closed_form_numeric(pred) && closed_form_numeric(gt)) {
        try {
            auto va = eval_exact(pred);
            auto vb = eval_exact(gt);
            if (va && vb) return *va == *vb ? Basis::NumericEqual : Basis::NoMatch;
            double fa = eval_float(pred);
            double fb = eval_float(gt);
            return float_close(fa, fb, cfg) ? Basis::NumericEqual : Basis::NoMatch;
        } catch (const EvalError&) {
            return Basis::NoMatch;
        }
    }

    // (3) identical free variables: probabilistic equality at random points
    if (!pw && !gw && is_scalar(pred) && is_scalar(gt)) {
        auto fv_pred = free_vars(pred);
        auto fv_gt = free_vars(gt);
        if (fv_pred != fv_gt || fv_pred.empty()) return Basis::NoMatch;
        uint64_t h = fnv1a64(to_canonical_string(pred));
        h = fnv1a64(to_canonical_string(gt), h);
        std::mt19937_64 rng(cfg.seed ^ h);
        for (int point = 0; point < cfg.n_points; ++point) {
            bool decided = false;
            for (int draw = 0; draw < cfg.max_draws_per_point; ++draw) {
                Bindings binds;
                for (const auto& v : fv_pred) binds[v] = random_rational(rng, cfg.domain);
                auto eq = equal_at_point(pred, gt, binds, cfg);
                if (!eq) continue;  // singular point; redraw
                if (!*eq) return Basis::NoMatch;
                decided = true;
                break;
            }
            if (!decided) return Basis::NoMatch;  // could not sample; stay safe
        }
        return Basis::SymbolicEqual;
    }

    // (4) containers, elementwise
    if (pred->kind == gt->kind) {
        switch (pred->kind) {
            case ExprKind::Set:
                return members_match(pred->kids, gt->kids, /*ordered=*/false, cfg, depth)
                           ? Basis::SetEqual
                           : Basis::NoMatch;
            case ExprKind::Tuple:
                return members_match(pred->kids, gt->kids, /*ordered=*/true, cfg, depth)
                           ? Basis::SetEqual
                           : Basis::NoMatch;
            case ExprKind::Interval:
                if (pred->lo_open != gt->lo_open || pred->hi_open != gt->hi_open)
                    return Basis::NoMatch;
                return members_match(pred->kids, gt->kids, /*ordered=*/true, cfg, depth)
                           ? Basis::SetEqual
                           : Basis::NoMatch;
            case ExprKind::Equation:
                return members_match(pred->kids, gt->kids, /*ordered=*/true, cfg, depth)
                           ? Basis::SetEqual
                           : Basis::NoMatch;
            default:
                break;
        }
    }
    return Basis::NoMatch;
}

}  // namespace

Basis check_equivalence(const ExprPtr& pred, const ExprPtr& gt, const EquivConfig& cfg) {
    try {
        ExprPtr p = pred;
        ExprPtr g = gt;
        if (cfg.degree_coercion) {
            NormalizeOptions nopts{cfg.strip_percent};
            p = normalize(rewrite_degrees(p), nopts);
            g = normalize(rewrite_degrees(g), nopts);
        }
        return equiv(p, g, cfg, 0);
    } catch (const std::exception&) {
        return Basis::NoMatch;  // degrade, never reward on an internal failure
    }
}

Judgment verify_rule(std::string_view response, std::string_view ground_truth,
                     const EquivConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    auto finish = [&](VerdictValue v, Basis b) {
        Judgment j;
        j.verdict = v;
        j.provenance = Provenance::Rule;
        j.basis = to_string(b);
        j.elapsed_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
        return j;
    };

    Extraction ex = extract_answer(response, cfg.marker_phrases);

    // fast path on raw strings
    std::string pred_str = normalized_string_form(ex.raw_span);
    std::string gt_str = normalized_string_form(ground_truth);
    if (!pred_str.empty() && pred_str == gt_str)
        return finish(VerdictValue::Correct, Basis::StringMatch);

    ParseResult gt_parse = parse_answer(ground_truth);
    if (!gt_parse.ok()) {
        // unparseable ground truth: string comparison only (done above)
        return finish(VerdictValue::Incorrect, Basis::NoMatch);
    }
    ParseResult pred_parse = parse_answer(ex.raw_span);
    if (!pred_parse.ok()) return finish(VerdictValue::Incorrect, Basis::Unparseable);

    NormalizeOptions nopts{cfg.strip_percent};
    ExprPtr pred = normalize(pred_parse.expr, nopts);
    ExprPtr gt = normalize(gt_parse.expr, nopts);
    Basis basis = check_equivalence(pred, gt, cfg);
    VerdictValue v = basis == Basis::NoMatch || basis == Basis::Unparseable
                         ? VerdictValue::Incorrect
                         : VerdictValue::Correct;
    return finish(v, basis);
}

}  // namespace mathverify
