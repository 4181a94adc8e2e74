// ast_gen.hpp - Seeded random expression trees for property tests.
//
// Generates trees the grammar can round-trip: fully-open intervals and
// lone-symbol equations are excluded because the parser canonicalizes them
// away. Mul factors avoid zero constants so normalize preserves free vars.

#pragma once

#include <random>
#include <string>
#include <vector>

#include "mathverify/expr.hpp"

namespace testsupport {

using namespace mathverify;

class AstGen {
public:
    explicit AstGen(uint64_t seed) : rng_(seed) {}

    // Scalar expression, depth-bounded.
    ExprPtr scalar(int depth = 3) {
        if (depth <= 0) return leaf();
        switch (pick(9)) {
            case 0:
            case 1: return leaf();
            case 2: return make_nary(ExprKind::Add, {scalar(depth - 1), scalar(depth - 1)});
            case 3: return make_binary(ExprKind::Sub, scalar(depth - 1), scalar(depth - 1));
            case 4:
                return make_nary(ExprKind::Mul,
                                 {nonzero_leaf(), scalar(depth - 1)});
            case 5: return make_binary(ExprKind::Div, scalar(depth - 1), nonzero_leaf());
            case 6: return make_unary(ExprKind::Negate, scalar(depth - 1));
            case 7: return make_unary(ExprKind::Abs, scalar(depth - 1));
            default:
                return make_binary(ExprKind::Pow, small_int(), small_pos_int());
        }
    }

    // Any answer-shaped value: scalar, set, tuple, interval, or wrapped.
    ExprPtr answer(int depth = 3) {
        switch (pick(8)) {
            case 0: {
                std::vector<ExprPtr> elems;
                size_t n = 1 + pick(3);
                for (size_t i = 0; i < n; ++i) elems.push_back(scalar(depth - 1));
                return make_nary(ExprKind::Set, std::move(elems));
            }
            case 1: {
                std::vector<ExprPtr> elems;
                size_t n = 2 + pick(2);
                for (size_t i = 0; i < n; ++i) elems.push_back(scalar(depth - 1));
                return make_nary(ExprKind::Tuple, std::move(elems));
            }
            case 2: {
                long lo = static_cast<long>(pick(10));
                long hi = lo + 1 + static_cast<long>(pick(10));
                int openness = static_cast<int>(pick(3));  // fully-open is ambiguous
                return make_interval(make_integer(lo), make_integer(hi), openness == 1,
                                     openness == 2);
            }
            case 3: return make_unary(ExprKind::Percent, small_pos_int());
            case 4: return make_unary(ExprKind::Degree, small_pos_int());
            default: return scalar(depth);
        }
    }

    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;

    size_t pick(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng_); }

    ExprPtr small_int() {
        return make_integer(static_cast<long>(pick(9)) - 4);
    }
    ExprPtr small_pos_int() { return make_integer(1 + static_cast<long>(pick(6))); }

    ExprPtr nonzero_leaf() {
        switch (pick(3)) {
            case 0: return make_number(Rational(1 + static_cast<long>(pick(7)),
                                                1 + static_cast<long>(pick(5))));
            case 1: return symbol();
            default: return make_integer(1 + static_cast<long>(pick(6)));
        }
    }

    ExprPtr symbol() {
        static const char* names[] = {"x", "y", "z"};
        return make_symbol(names[pick(3)]);
    }

    ExprPtr leaf() {
        switch (pick(6)) {
            case 0: return make_integer(static_cast<long>(pick(19)) - 9);
            case 1:
                return make_number(Rational(1 + static_cast<long>(pick(9)),
                                            1 + static_cast<long>(pick(7))));
            case 2: return make_decimal(mpz_class(static_cast<long>(pick(500))), -2, 2);
            case 3: return symbol();
            case 4: return make_constant(pick(2) ? ConstantKind::Pi : ConstantKind::E);
            default: return make_integer(1 + static_cast<long>(pick(5)));
        }
    }
};

}  // namespace testsupport
