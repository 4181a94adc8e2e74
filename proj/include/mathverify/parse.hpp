// parse.hpp - Answer-string parser.
//
// Accepts a LaTeX subset plus plain math notation and produces an Expr
// tree. Total over arbitrary bytes: malformed input yields a diagnostics
// record, never an exception or crash.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mathverify/expr.hpp"

namespace mathverify {

struct ParseIssue {
    size_t position = 0;  // byte offset into the original input
    std::string message;
};

struct ParseDiagnostics {
    std::string input;
    size_t consumed_prefix_len = 0;
    std::vector<ParseIssue> issues;

    bool ok() const { return issues.empty(); }
};

struct ParseResult {
    ExprPtr expr;  // null on failure
    ParseDiagnostics diagnostics;

    bool ok() const { return expr != nullptr; }
};

// Grammar summary:
//   integers (thousands separators allowed), decimals, scientific notation,
//   \frac/\dfrac/\tfrac/\cfrac, \sqrt[n]{x}, ^ exponents, pi/\pi/e,
//   + - * / \cdot \times \div and implicit multiplication, mixed numbers
//   ("2 1/2"), parentheses, \left/\right stripped, \text{...} stripped,
//   % and \% and ^\circ / \degree / U+00B0 wrappers, \pm/\mp, tuples (a,b),
//   sets \{a,b\}, intervals [a,b] (a,b] [a,b), |x|, single equations.
// Confusable codepoints are folded before tokenizing.
ParseResult parse_answer(std::string_view text);

}  // namespace mathverify
