#include "mathverify/expr.hpp"

#include <algorithm>
#include <sstream>

namespace mathverify {

namespace {

std::shared_ptr<Expr> blank(ExprKind k) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    return e;
}

}  // namespace

ExprPtr make_number(Rational v) {
    auto e = blank(ExprKind::Number);
    e->number = std::move(v);
    return e;
}

ExprPtr make_integer(long v) { return make_number(Rational(v)); }

ExprPtr make_decimal(mpz_class significand, int exponent, int decimal_places) {
    auto e = blank(ExprKind::Decimal);
    e->significand = std::move(significand);
    e->exponent = exponent;
    e->decimal_places = decimal_places;
    return e;
}

ExprPtr make_constant(ConstantKind c) {
    auto e = blank(ExprKind::Constant);
    e->constant = c;
    return e;
}

ExprPtr make_symbol(std::string name) {
    auto e = blank(ExprKind::Symbol);
    e->symbol = std::move(name);
    return e;
}

ExprPtr make_unary(ExprKind kind, ExprPtr operand) {
    auto e = blank(kind);
    e->kids.push_back(std::move(operand));
    return e;
}

ExprPtr make_binary(ExprKind kind, ExprPtr lhs, ExprPtr rhs) {
    auto e = blank(kind);
    e->kids.push_back(std::move(lhs));
    e->kids.push_back(std::move(rhs));
    return e;
}

ExprPtr make_nary(ExprKind kind, std::vector<ExprPtr> kids) {
    auto e = blank(kind);
    e->kids = std::move(kids);
    return e;
}

ExprPtr make_interval(ExprPtr lo, ExprPtr hi, bool lo_open, bool hi_open) {
    auto e = blank(ExprKind::Interval);
    e->kids.push_back(std::move(lo));
    e->kids.push_back(std::move(hi));
    e->lo_open = lo_open;
    e->hi_open = hi_open;
    return e;
}

Rational decimal_value(const Expr& e) {
    Rational sig{e.significand};
    if (e.exponent >= 0)
        return sig * pow10(static_cast<unsigned long>(e.exponent));
    return sig / pow10(static_cast<unsigned long>(-e.exponent));
}

int compare(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return 0;
    if (a->kind != b->kind)
        return static_cast<int>(a->kind) < static_cast<int>(b->kind) ? -1 : 1;
    switch (a->kind) {
        case ExprKind::Number:
            return a->number.cmp(b->number);
        case ExprKind::Decimal: {
            int c = decimal_value(*a).cmp(decimal_value(*b));
            if (c != 0) return c;
            if (a->decimal_places != b->decimal_places)
                return a->decimal_places < b->decimal_places ? -1 : 1;
            return 0;
        }
        case ExprKind::Constant:
            if (a->constant != b->constant)
                return a->constant == ConstantKind::Pi ? 1 : -1;  // e < pi
            return 0;
        case ExprKind::Symbol:
            return a->symbol.compare(b->symbol) < 0 ? -1
                 : (a->symbol == b->symbol ? 0 : 1);
        default:
            break;
    }
    if (a->kind == ExprKind::Interval) {
        if (a->lo_open != b->lo_open) return a->lo_open ? 1 : -1;
        if (a->hi_open != b->hi_open) return a->hi_open ? 1 : -1;
    }
    if (a->kids.size() != b->kids.size())
        return a->kids.size() < b->kids.size() ? -1 : 1;
    for (size_t i = 0; i < a->kids.size(); ++i) {
        int c = compare(a->kids[i], b->kids[i]);
        if (c != 0) return c;
    }
    return 0;
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
    return compare(a, b) == 0;
}

namespace {

void collect_vars(const ExprPtr& e, std::set<std::string>& out) {
    if (e->kind == ExprKind::Symbol) out.insert(e->symbol);
    for (const auto& k : e->kids) collect_vars(k, out);
}

}  // namespace

std::set<std::string> free_vars(const ExprPtr& e) {
    std::set<std::string> out;
    collect_vars(e, out);
    return out;
}

bool contains_unit_wrapper(const ExprPtr& e) {
    if (e->kind == ExprKind::Percent || e->kind == ExprKind::Degree) return true;
    for (const auto& k : e->kids)
        if (contains_unit_wrapper(k)) return true;
    return false;
}

size_t tree_size(const ExprPtr& e) {
    size_t n = 1;
    for (const auto& k : e->kids) n += tree_size(k);
    return n;
}

namespace {

// Rendering precedence, loosest to tightest. min_prec is the precedence the
// surrounding context demands; anything looser gets parenthesized.
enum Prec { kPrecTop = 0, kPrecAdd = 1, kPrecMul = 2, kPrecUnary = 3, kPrecPow = 4, kPrecAtom = 5 };

void render(const ExprPtr& e, std::ostringstream& out, int min_prec);

std::string decimal_digits(const Expr& e) {
    mpz_class s = e.significand;
    bool neg = s < 0;
    if (neg) s = -s;
    std::string digits = s.get_str();
    std::string o = neg ? "-" : "";
    int dp = e.decimal_places;
    if (dp <= 0) {
        o += digits;
        for (int i = 0; i < e.exponent; ++i) o += '0';
        return o;
    }
    while (static_cast<int>(digits.size()) < dp + 1)
        digits.insert(digits.begin(), '0');
    o += digits.substr(0, digits.size() - dp);
    o += ".";
    o += digits.substr(digits.size() - dp);
    return o;
}

void render_list(const std::vector<ExprPtr>& kids, std::ostringstream& out) {
    for (size_t i = 0; i < kids.size(); ++i) {
        if (i) out << ", ";
        render(kids[i], out, kPrecTop);
    }
}

void render(const ExprPtr& e, std::ostringstream& out, int min_prec) {
    auto wrap = [&](int my_prec, auto&& body) {
        if (my_prec < min_prec) {
            out << "(";
            body();
            out << ")";
        } else {
            body();
        }
    };
    switch (e->kind) {
        case ExprKind::Number: {
            int prec = e->number.is_negative() ? kPrecUnary : kPrecAtom;
            wrap(prec, [&] { out << e->number.to_string(); });
            return;
        }
        case ExprKind::Decimal: {
            std::string d = decimal_digits(*e);
            int prec = (!d.empty() && d[0] == '-') ? kPrecUnary : kPrecAtom;
            wrap(prec, [&] { out << d; });
            return;
        }
        case ExprKind::Constant:
            out << (e->constant == ConstantKind::Pi ? "pi" : "e");
            return;
        case ExprKind::Symbol:
            out << e->symbol;
            return;
        case ExprKind::Negate:
            wrap(kPrecUnary, [&] {
                out << "-";
                render(e->kids[0], out, kPrecUnary + 1);
            });
            return;
        case ExprKind::Add:
            wrap(kPrecAdd, [&] {
                for (size_t i = 0; i < e->kids.size(); ++i) {
                    if (i) out << " + ";
                    render(e->kids[i], out, kPrecAdd + (i ? 1 : 0));
                }
            });
            return;
        case ExprKind::Sub:
            wrap(kPrecAdd, [&] {
                render(e->kids[0], out, kPrecAdd);
                out << " - ";
                render(e->kids[1], out, kPrecAdd + 1);
            });
            return;
        case ExprKind::Mul:
            wrap(kPrecMul, [&] {
                for (size_t i = 0; i < e->kids.size(); ++i) {
                    if (i) out << "*";
                    render(e->kids[i], out, kPrecMul + (i ? 1 : 0));
                }
            });
            return;
        case ExprKind::Div:
            wrap(kPrecMul, [&] {
                render(e->kids[0], out, kPrecMul);
                out << "/";
                render(e->kids[1], out, kPrecMul + 1);
            });
            return;
        case ExprKind::Pow:
            wrap(kPrecPow, [&] {
                render(e->kids[0], out, kPrecPow + 1);
                out << "^(";
                render(e->kids[1], out, kPrecTop);
                out << ")";
            });
            return;
        case ExprKind::Root: {
            const auto& deg = e->kids[1];
            bool square = deg->kind == ExprKind::Number && deg->number == Rational(2);
            if (square) {
                out << "\\sqrt{";
            } else {
                out << "\\sqrt[";
                render(deg, out, kPrecTop);
                out << "]{";
            }
            render(e->kids[0], out, kPrecTop);
            out << "}";
            return;
        }
        case ExprKind::Abs:
            out << "|";
            render(e->kids[0], out, kPrecTop);
            out << "|";
            return;
        case ExprKind::Set:
            out << "\\{";
            render_list(e->kids, out);
            out << "\\}";
            return;
        case ExprKind::Tuple:
            out << "(";
            render_list(e->kids, out);
            out << ")";
            return;
        case ExprKind::Interval:
            out << (e->lo_open ? "(" : "[");
            render(e->kids[0], out, kPrecTop);
            out << ", ";
            render(e->kids[1], out, kPrecTop);
            out << (e->hi_open ? ")" : "]");
            return;
        case ExprKind::Equation:
            render(e->kids[0], out, kPrecTop);
            out << " = ";
            render(e->kids[1], out, kPrecTop);
            return;
        case ExprKind::Percent:
            wrap(kPrecAtom, [&] {
                render(e->kids[0], out, kPrecAtom);
                out << "%";
            });
            return;
        case ExprKind::Degree:
            wrap(kPrecAtom, [&] {
                render(e->kids[0], out, kPrecAtom);
                out << "^\\circ";
            });
            return;
    }
}

}  // namespace

std::string to_canonical_string(const ExprPtr& e) {
    std::ostringstream out;
    render(e, out, kPrecTop);
    return out.str();
}

}  // namespace mathverify
