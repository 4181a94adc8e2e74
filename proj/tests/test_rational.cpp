#include "doctest.h"
#include "mathverify/rational.hpp"

using mathverify::Rational;

TEST_CASE("rationals reduce to lowest terms with positive denominator") {
    Rational r(6, -4);
    CHECK(r.num() == -3);
    CHECK(r.den() == 2);
    CHECK(r.to_string() == "-3/2");
    CHECK(Rational(4, 2).to_string() == "2");
}

TEST_CASE("parse accepts integers and fractions, rejects junk") {
    CHECK(Rational::parse("42")->to_string() == "42");
    CHECK(Rational::parse("-6/8")->to_string() == "-3/4");
    CHECK(!Rational::parse(""));
    CHECK(!Rational::parse("1/0"));
    CHECK(!Rational::parse("a/b"));
    CHECK(!Rational::parse("1.5"));
}

TEST_CASE("integer powers") {
    CHECK(Rational(2).pow_int(10) == Rational(1024));
    CHECK(Rational(2, 3).pow_int(-2) == Rational(9, 4));
    CHECK(Rational(5).pow_int(0) == Rational(1));
}

TEST_CASE("exact nth roots") {
    CHECK(*Rational(9, 4).nth_root(2) == Rational(3, 2));
    CHECK(*Rational(-27).nth_root(3) == Rational(-3));
    CHECK(!Rational(2).nth_root(2));
    CHECK(!Rational(-4).nth_root(2));
}

TEST_CASE("pow10") {
    CHECK(mathverify::pow10(0) == Rational(1));
    CHECK(mathverify::pow10(3) == Rational(1000));
}
