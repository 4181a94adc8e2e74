#include "mathverify/normalize.hpp"

#include <algorithm>

#include "mathverify/eval.hpp"

namespace mathverify {

namespace {

bool is_num(const ExprPtr& e) { return e->kind == ExprKind::Number; }

bool is_num_value(const ExprPtr& e, long v) {
    return is_num(e) && e->number == Rational(v);
}

ExprPtr norm(const ExprPtr& e, const NormalizeOptions& opts);

std::vector<ExprPtr> norm_kids(const ExprPtr& e, const NormalizeOptions& opts) {
    std::vector<ExprPtr> kids;
    kids.reserve(e->kids.size());
    for (const auto& k : e->kids) kids.push_back(norm(k, opts));
    return kids;
}

// Flattens same-kind children, folds Number operands, drops the identity
// element, and sorts by the canonical order.
ExprPtr norm_commutative(ExprKind kind, std::vector<ExprPtr> kids) {
    std::vector<ExprPtr> flat;
    for (auto& k : kids) {
        if (k->kind == kind) {
            for (const auto& kk : k->kids) flat.push_back(kk);
        } else {
            flat.push_back(std::move(k));
        }
    }
    const bool is_add = kind == ExprKind::Add;
    Rational acc(is_add ? 0 : 1);
    std::vector<ExprPtr> rest;
    for (auto& k : flat) {
        if (is_num(k)) {
            acc = is_add ? acc + k->number : acc * k->number;
        } else {
            rest.push_back(std::move(k));
        }
    }
    const Rational identity(is_add ? 0 : 1);
    if (acc != identity || rest.empty()) rest.push_back(make_number(acc));
    std::stable_sort(rest.begin(), rest.end(),
                     [](const ExprPtr& a, const ExprPtr& b) { return compare(a, b) < 0; });
    if (rest.size() == 1) return rest[0];
    return make_nary(kind, std::move(rest));
}

ExprPtr norm(const ExprPtr& e, const NormalizeOptions& opts) {
    switch (e->kind) {
        case ExprKind::Number:
        case ExprKind::Constant:
        case ExprKind::Symbol:
            return e;
        case ExprKind::Decimal:
            return make_number(decimal_value(*e));
        case ExprKind::Negate: {
            ExprPtr k = norm(e->kids[0], opts);
            if (is_num(k)) return make_number(-k->number);
            return norm_commutative(ExprKind::Mul, {make_integer(-1), std::move(k)});
        }
        case ExprKind::Add:
            return norm_commutative(ExprKind::Add, norm_kids(e, opts));
        case ExprKind::Sub: {
            ExprPtr a = norm(e->kids[0], opts);
            ExprPtr b = norm(e->kids[1], opts);
            ExprPtr neg_b = is_num(b)
                                ? make_number(-b->number)
                                : norm_commutative(ExprKind::Mul,
                                                   {make_integer(-1), std::move(b)});
            return norm_commutative(ExprKind::Add, {std::move(a), std::move(neg_b)});
        }
        case ExprKind::Mul:
            return norm_commutative(ExprKind::Mul, norm_kids(e, opts));
        case ExprKind::Div: {
            ExprPtr a = norm(e->kids[0], opts);
            ExprPtr b = norm(e->kids[1], opts);
            if (is_num(a) && is_num(b) && !b->number.is_zero())
                return make_number(a->number / b->number);
            if (is_num_value(b, 1)) return a;
            return make_binary(ExprKind::Div, std::move(a), std::move(b));
        }
        case ExprKind::Pow: {
            ExprPtr a = norm(e->kids[0], opts);
            ExprPtr b = norm(e->kids[1], opts);
            if (is_num_value(b, 1)) return a;
            if (is_num(a) && is_num(b)) {
                auto folded = make_binary(ExprKind::Pow, a, b);
                try {
                    auto v = eval_exact(folded);
                    if (v) return make_number(*v);
                } catch (const EvalError&) {
                    // 0^-n stays symbolic; equivalence degrades safely
                }
            }
            return make_binary(ExprKind::Pow, std::move(a), std::move(b));
        }
        case ExprKind::Root: {
            ExprPtr a = norm(e->kids[0], opts);
            ExprPtr d = norm(e->kids[1], opts);
            if (is_num(a) && is_num(d) && d->number.is_integer()) {
                auto deg = d->number.to_long();
                if (deg && *deg >= 1) {
                    auto r = a->number.nth_root(static_cast<unsigned long>(*deg));
                    if (r) return make_number(*r);
                }
            }
            return make_binary(ExprKind::Root, std::move(a), std::move(d));
        }
        case ExprKind::Abs: {
            ExprPtr k = norm(e->kids[0], opts);
            if (is_num(k)) return make_number(k->number.abs());
            return make_unary(ExprKind::Abs, std::move(k));
        }
        case ExprKind::Percent: {
            if (opts.strip_percent) {
                ExprPtr unwrapped =
                    make_binary(ExprKind::Div, e->kids[0], make_integer(100));
                return norm(unwrapped, opts);
            }
            return make_unary(ExprKind::Percent, norm(e->kids[0], opts));
        }
        case ExprKind::Degree:
            return make_unary(ExprKind::Degree, norm(e->kids[0], opts));
        case ExprKind::Set: {
            std::vector<ExprPtr> kids = norm_kids(e, opts);
            std::vector<ExprPtr> flat;
            for (auto& k : kids) {
                if (k->kind == ExprKind::Set) {
                    for (const auto& kk : k->kids) flat.push_back(kk);
                } else {
                    flat.push_back(std::move(k));
                }
            }
            std::stable_sort(flat.begin(), flat.end(), [](const ExprPtr& a, const ExprPtr& b) {
                return compare(a, b) < 0;
            });
            flat.erase(std::unique(flat.begin(), flat.end(),
                                   [](const ExprPtr& a, const ExprPtr& b) {
                                       return compare(a, b) == 0;
                                   }),
                       flat.end());
            return make_nary(ExprKind::Set, std::move(flat));
        }
        case ExprKind::Tuple:
            return make_nary(ExprKind::Tuple, norm_kids(e, opts));
        case ExprKind::Interval: {
            auto kids = norm_kids(e, opts);
            return make_interval(std::move(kids[0]), std::move(kids[1]), e->lo_open,
                                 e->hi_open);
        }
        case ExprKind::Equation: {
            auto kids = norm_kids(e, opts);
            return make_binary(ExprKind::Equation, std::move(kids[0]), std::move(kids[1]));
        }
    }
    return e;
}

}  // namespace

ExprPtr normalize(const ExprPtr& e, const NormalizeOptions& opts) {
    return norm(e, opts);
}

ExprPtr rewrite_degrees(const ExprPtr& e) {
    std::vector<ExprPtr> kids;
    kids.reserve(e->kids.size());
    bool changed = false;
    for (const auto& k : e->kids) {
        ExprPtr nk = rewrite_degrees(k);
        changed |= nk != k;
        kids.push_back(std::move(nk));
    }
    if (e->kind == ExprKind::Degree) {
        return make_nary(ExprKind::Mul,
                         {kids[0], make_binary(ExprKind::Div,
                                               make_constant(ConstantKind::Pi),
                                               make_integer(180))});
    }
    if (!changed) return e;
    auto copy = std::make_shared<Expr>(*e);
    copy->kids = std::move(kids);
    return copy;
}

}  // namespace mathverify
