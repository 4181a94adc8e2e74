// eval.hpp - Numeric evaluation of expression trees.

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "mathverify/expr.hpp"

namespace mathverify {

using Bindings = std::map<std::string, Rational>;

enum class EvalErrorKind { DivisionByZero, UnboundSymbol, NonFinite, Unsupported };

class EvalError : public std::runtime_error {
public:
    EvalError(EvalErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    EvalErrorKind kind() const { return kind_; }

private:
    EvalErrorKind kind_;
};

// Exact evaluation. Returns nullopt when an irrational constant or root
// keeps the value from being expressed as a rational (the inexactness
// marker). Throws EvalError on division by zero, unbound symbols, and
// non-scalar nodes.
std::optional<Rational> eval_exact(const ExprPtr& e, const Bindings& bindings = {});

// Double-precision evaluation. Throws EvalError on division by zero,
// unbound symbols, non-finite results, and non-scalar nodes.
double eval_float(const ExprPtr& e, const Bindings& bindings = {});

// Scalar nodes can be evaluated to a number; sets, tuples, intervals and
// equations cannot.
bool is_scalar(const ExprPtr& e);

}  // namespace mathverify
