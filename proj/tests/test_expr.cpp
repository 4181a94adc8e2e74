#include <algorithm>

#include "doctest.h"
#include "mathverify/expr.hpp"
#include "support/ast_gen.hpp"

using namespace mathverify;

TEST_CASE("compare is a total order") {
    testsupport::AstGen gen(11);
    std::vector<ExprPtr> pool;
    for (int i = 0; i < 40; ++i) pool.push_back(gen.answer());
    for (const auto& a : pool) {
        CHECK(compare(a, a) == 0);
        for (const auto& b : pool) {
            CHECK(compare(a, b) == -compare(b, a));
            if (compare(a, b) == 0) CHECK(structurally_equal(a, b));
        }
    }
    std::sort(pool.begin(), pool.end(),
              [](const ExprPtr& a, const ExprPtr& b) { return compare(a, b) < 0; });
    for (size_t i = 1; i < pool.size(); ++i) CHECK(compare(pool[i - 1], pool[i]) <= 0);
}

TEST_CASE("free_vars collects reachable symbols") {
    CHECK(free_vars(make_integer(3)).empty());
    auto e = make_nary(ExprKind::Mul,
                       {make_symbol("x"),
                        make_nary(ExprKind::Add, {make_symbol("y"), make_integer(1)})});
    auto fv = free_vars(e);
    CHECK(fv == std::set<std::string>{"x", "y"});
}

TEST_CASE("decimal payload keeps declared precision") {
    auto d = make_decimal(mpz_class(50), -2, 2);  // "0.50"
    CHECK(d->decimal_places == 2);
    CHECK(decimal_value(*d) == Rational(1, 2));
    CHECK(to_canonical_string(d) == "0.50");
}

TEST_CASE("canonical strings for the basic shapes") {
    CHECK(to_canonical_string(make_number(Rational(1, 2))) == "1/2");
    auto set = make_nary(ExprKind::Set, {make_integer(2), make_integer(1)});
    CHECK(to_canonical_string(set) == "\\{2, 1\\}");  // sorting happens in normalize
    auto tup = make_nary(ExprKind::Tuple, {make_integer(1), make_integer(2)});
    CHECK(to_canonical_string(tup) == "(1, 2)");
    auto iv = make_interval(make_integer(0), make_integer(1), false, true);
    CHECK(to_canonical_string(iv) == "[0, 1)");
    auto deg = make_unary(ExprKind::Degree, make_integer(45));
    CHECK(to_canonical_string(deg) == "45^\\circ");
    auto pct = make_unary(ExprKind::Percent, make_integer(50));
    CHECK(to_canonical_string(pct) == "50%");
}

TEST_CASE("unit wrapper detection") {
    CHECK(contains_unit_wrapper(make_unary(ExprKind::Degree, make_integer(1))));
    CHECK(contains_unit_wrapper(make_nary(
        ExprKind::Add, {make_integer(1), make_unary(ExprKind::Percent, make_integer(2))})));
    CHECK(!contains_unit_wrapper(make_integer(7)));
}
