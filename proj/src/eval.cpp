#include "mathverify/eval.hpp"

#include <cmath>

namespace mathverify {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kE = 2.71828182845904523536;

// Keeps exact Pow folding from materializing huge numbers; callers fall
// back to float evaluation past this.
constexpr long kMaxExactPow = 4096;
constexpr size_t kMaxExactPowBits = 1u << 20;

[[noreturn]] void div_by_zero() {
    throw EvalError(EvalErrorKind::DivisionByZero, "division by zero");
}

std::optional<Rational> exact_pow(const Rational& base, const Rational& exp) {
    if (exp.is_integer()) {
        auto e = exp.to_long();
        if (!e || *e > kMaxExactPow || *e < -kMaxExactPow) return std::nullopt;
        if (base.is_zero() && *e < 0) div_by_zero();
        if (base.bit_size() * static_cast<size_t>(*e < 0 ? -*e : *e) > kMaxExactPowBits)
            return std::nullopt;
        return base.pow_int(*e);
    }
    // rational exponent p/q: exact only when the q-th root is rational
    if (!exp.den().fits_ulong_p()) return std::nullopt;
    unsigned long q = exp.den().get_ui();
    if (q > 64) return std::nullopt;
    auto root = base.nth_root(q);
    if (!root) return std::nullopt;
    Rational p_part{exp.num()};
    auto p = p_part.to_long();
    if (!p || *p > kMaxExactPow || *p < -kMaxExactPow) return std::nullopt;
    if (root->is_zero() && *p < 0) div_by_zero();
    if (root->bit_size() * static_cast<size_t>(*p < 0 ? -*p : *p) > kMaxExactPowBits)
        return std::nullopt;
    return root->pow_int(*p);
}

}  // namespace

bool is_scalar(const ExprPtr& e) {
    switch (e->kind) {
        case ExprKind::Set:
        case ExprKind::Tuple:
        case ExprKind::Interval:
        case ExprKind::Equation:
            return false;
        default:
            return true;
    }
}

std::optional<Rational> eval_exact(const ExprPtr& e, const Bindings& bindings) {
    switch (e->kind) {
        case ExprKind::Number:
            return e->number;
        case ExprKind::Decimal:
            return decimal_value(*e);
        case ExprKind::Constant:
            return std::nullopt;  // pi, e: no exact rational value
        case ExprKind::Symbol: {
            auto it = bindings.find(e->symbol);
            if (it == bindings.end())
                throw EvalError(EvalErrorKind::UnboundSymbol,
                                "unbound symbol '" + e->symbol + "'");
            return it->second;
        }
        case ExprKind::Negate: {
            auto v = eval_exact(e->kids[0], bindings);
            if (!v) return std::nullopt;
            return -*v;
        }
        case ExprKind::Add: {
            Rational sum(0);
            for (const auto& k : e->kids) {
                auto v = eval_exact(k, bindings);
                if (!v) return std::nullopt;
                sum = sum + *v;
            }
            return sum;
        }
        case ExprKind::Sub: {
            auto a = eval_exact(e->kids[0], bindings);
            auto b = eval_exact(e->kids[1], bindings);
            if (!a || !b) return std::nullopt;
            return *a - *b;
        }
        case ExprKind::Mul: {
            Rational prod(1);
            for (const auto& k : e->kids) {
                auto v = eval_exact(k, bindings);
                if (!v) return std::nullopt;
                prod = prod * *v;
            }
            return prod;
        }
        case ExprKind::Div: {
            auto a = eval_exact(e->kids[0], bindings);
            auto b = eval_exact(e->kids[1], bindings);
            if (b && b->is_zero()) div_by_zero();
            if (!a || !b) return std::nullopt;
            return *a / *b;
        }
        case ExprKind::Pow: {
            auto a = eval_exact(e->kids[0], bindings);
            auto b = eval_exact(e->kids[1], bindings);
            if (!a || !b) return std::nullopt;
            return exact_pow(*a, *b);
        }
        case ExprKind::Root: {
            auto a = eval_exact(e->kids[0], bindings);
            auto d = eval_exact(e->kids[1], bindings);
            if (!a || !d) return std::nullopt;
            if (!d->is_integer()) return std::nullopt;
            auto deg = d->to_long();
            if (!deg || *deg < 1) return std::nullopt;
            return a->nth_root(static_cast<unsigned long>(*deg));
        }
        case ExprKind::Abs: {
            auto v = eval_exact(e->kids[0], bindings);
            if (!v) return std::nullopt;
            return v->abs();
        }
        case ExprKind::Percent: {
            auto v = eval_exact(e->kids[0], bindings);
            if (!v) return std::nullopt;
            return *v / Rational(100);
        }
        case ExprKind::Degree: {
            auto v = eval_exact(e->kids[0], bindings);
            if (!v) return std::nullopt;
            if (v->is_zero()) return Rational(0);
            return std::nullopt;  // x * pi/180 is irrational for x != 0
        }
        default:
            throw EvalError(EvalErrorKind::Unsupported,
                            "cannot evaluate a non-scalar expression");
    }
}

double eval_float(const ExprPtr& e, const Bindings& bindings) {
    auto finite = [](double v) {
        if (!std::isfinite(v))
            throw EvalError(EvalErrorKind::NonFinite, "non-finite result");
        return v;
    };
    switch (e->kind) {
        case ExprKind::Number:
            return finite(e->number.to_double());
        case ExprKind::Decimal:
            return finite(decimal_value(*e).to_double());
        case ExprKind::Constant:
            return e->constant == ConstantKind::Pi ? kPi : kE;
        case ExprKind::Symbol: {
            auto it = bindings.find(e->symbol);
            if (it == bindings.end())
                throw EvalError(EvalErrorKind::UnboundSymbol,
                                "unbound symbol '" + e->symbol + "'");
            return finite(it->second.to_double());
        }
        case ExprKind::Negate:
            return -eval_float(e->kids[0], bindings);
        case ExprKind::Add: {
            double sum = 0;
            for (const auto& k : e->kids) sum += eval_float(k, bindings);
            return finite(sum);
        }
        case ExprKind::Sub:
            return finite(eval_float(e->kids[0], bindings) -
                          eval_float(e->kids[1], bindings));
        case ExprKind::Mul: {
            double prod = 1;
            for (const auto& k : e->kids) prod *= eval_float(k, bindings);
            return finite(prod);
        }
        case ExprKind::Div: {
            double b = eval_float(e->kids[1], bindings);
            if (b == 0.0) div_by_zero();
            return finite(eval_float(e->kids[0], bindings) / b);
        }
        case ExprKind::Pow: {
            double a = eval_float(e->kids[0], bindings);
            double b = eval_float(e->kids[1], bindings);
            if (a == 0.0 && b < 0) div_by_zero();
            return finite(std::pow(a, b));
        }
        case ExprKind::Root: {
            double a = eval_float(e->kids[0], bindings);
            double d = eval_float(e->kids[1], bindings);
            if (d == 0.0) div_by_zero();
            if (a < 0) {
                // odd integer degrees have a real root
                if (std::abs(d - std::round(d)) < 1e-9 &&
                    static_cast<long>(std::llround(d)) % 2 != 0)
                    return finite(-std::pow(-a, 1.0 / d));
                throw EvalError(EvalErrorKind::NonFinite,
                                "even root of a negative number");
            }
            return finite(std::pow(a, 1.0 / d));
        }
        case ExprKind::Abs:
            return std::abs(eval_float(e->kids[0], bindings));
        case ExprKind::Percent:
            return finite(eval_float(e->kids[0], bindings) / 100.0);
        case ExprKind::Degree:
            return finite(eval_float(e->kids[0], bindings) * kPi / 180.0);
        default:
            throw EvalError(EvalErrorKind::Unsupported,
                            "cannot evaluate a non-scalar expression");
    }
}

}  // namespace mathverify
