// expr.hpp - Canonical AST for short math answers.
//
// Nodes are immutable and shared; every operation over them is a pure
// function, so trees can be used freely across threads.

#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "mathverify/rational.hpp"

namespace mathverify {

enum class ExprKind {
    Number,    // exact rational
    Decimal,   // significand * 10^exponent, with declared precision
    Constant,  // pi | e
    Symbol,
    Negate,
    Add,
    Sub,
    Mul,
    Div,
    Pow,       // kids: base, exponent
    Root,      // kids: radicand, degree
    Abs,
    Set,       // finite set, canonical order after normalize
    Interval,  // kids: lo, hi; openness flags
    Tuple,
    Equation,  // kids: lhs, rhs
    Percent,   // unit wrapper, inert unless config says otherwise
    Degree,    // unit wrapper, inert unless config says otherwise
};

enum class ConstantKind { Pi, E };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind;

    Rational number;           // Number
    mpz_class significand;     // Decimal
    int exponent = 0;          // Decimal: value = significand * 10^exponent
    int decimal_places = 0;    // Decimal: digits after the point as written
    ConstantKind constant = ConstantKind::Pi;
    std::string symbol;        // Symbol name
    std::vector<ExprPtr> kids;
    bool lo_open = false;      // Interval
    bool hi_open = false;      // Interval
};

ExprPtr make_number(Rational v);
ExprPtr make_integer(long v);
// significand * 10^exponent; decimal_places records how the literal was
// written so declared precision survives parsing.
ExprPtr make_decimal(mpz_class significand, int exponent, int decimal_places);
ExprPtr make_constant(ConstantKind c);
ExprPtr make_symbol(std::string name);
ExprPtr make_unary(ExprKind kind, ExprPtr operand);
ExprPtr make_binary(ExprKind kind, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_nary(ExprKind kind, std::vector<ExprPtr> kids);
ExprPtr make_interval(ExprPtr lo, ExprPtr hi, bool lo_open, bool hi_open);

// Exact value of a Decimal node.
Rational decimal_value(const Expr& e);

// Total order over trees; 0 means structurally identical. Drives the
// canonical sort of commutative operands and set dedup.
int compare(const ExprPtr& a, const ExprPtr& b);
bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

// Names of all Symbol nodes reachable from e.
std::set<std::string> free_vars(const ExprPtr& e);

// Render in a form parse_answer accepts; normalize(parse(render(e))) equals
// normalize(e).
std::string to_canonical_string(const ExprPtr& e);

// True if the tree contains a Percent or Degree wrapper anywhere.
bool contains_unit_wrapper(const ExprPtr& e);

// Number of nodes; guards recursion-heavy callers.
size_t tree_size(const ExprPtr& e);

}  // namespace mathverify
