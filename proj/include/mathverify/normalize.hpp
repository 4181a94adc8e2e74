// normalize.hpp - Canonical form for expression trees.

#pragma once

#include "mathverify/expr.hpp"

namespace mathverify {

struct NormalizeOptions {
    // Rewrite Percent(x) to x/100. Off by default: the wrapper stays inert
    // so "50%" does not silently equal "1/2".
    bool strip_percent = false;
};

// Idempotent canonicalization: constant folding over exact rationals,
// decimal-to-rational conversion, sign folding, Add/Mul flattening with a
// total operand order, set dedup. Never changes the numeric value.
ExprPtr normalize(const ExprPtr& e, const NormalizeOptions& opts = {});

// Degree(x) -> x * pi / 180, applied recursively. Used by the equivalence
// layer when unit coercion is enabled.
ExprPtr rewrite_degrees(const ExprPtr& e);

}  // namespace mathverify
