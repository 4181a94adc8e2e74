// rational.hpp - Arbitrary-precision rational numbers.
//
// Thin value wrapper over GMP's mpq_class. Values are always stored in
// canonical form: denominator > 0 and gcd(num, den) == 1.

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mathverify {

class Rational {
public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}  // NOLINT: implicit by design
    Rational(long n, long d) : v_(n, d) { v_.canonicalize(); }
    explicit Rational(const mpz_class& z) : v_(z) {}
    Rational(const mpz_class& n, const mpz_class& d) : v_(n, d) { v_.canonicalize(); }
    explicit Rational(const mpq_class& q) : v_(q) { v_.canonicalize(); }

    // Parses "123", "-4/5". Returns nullopt on malformed input or zero
    // denominator.
    static std::optional<Rational> parse(std::string_view s);

    const mpz_class& num() const { return v_.get_num(); }
    const mpz_class& den() const { return v_.get_den(); }

    bool is_zero() const { return v_ == 0; }
    bool is_integer() const { return v_.get_den() == 1; }
    bool is_negative() const { return v_ < 0; }

    // Integer value when is_integer() and it fits in long; nullopt otherwise.
    std::optional<long> to_long() const;
    double to_double() const { return v_.get_d(); }

    // "p/q" for non-integers, plain digits for integers.
    std::string to_string() const;

    Rational operator-() const { return Rational(mpq_class(-v_)); }
    Rational operator+(const Rational& o) const { return Rational(mpq_class(v_ + o.v_)); }
    Rational operator-(const Rational& o) const { return Rational(mpq_class(v_ - o.v_)); }
    Rational operator*(const Rational& o) const { return Rational(mpq_class(v_ * o.v_)); }
    // Caller must ensure o != 0.
    Rational operator/(const Rational& o) const { return Rational(mpq_class(v_ / o.v_)); }

    Rational abs() const { return v_ < 0 ? -*this : *this; }

    // this^e for integer exponents. Negative e requires a nonzero base
    // (checked by caller).
    Rational pow_int(long e) const;

    // Exact rational nth root, if one exists. degree >= 1.
    std::optional<Rational> nth_root(unsigned long degree) const;

    bool operator==(const Rational& o) const { return v_ == o.v_; }
    bool operator!=(const Rational& o) const { return v_ != o.v_; }
    bool operator<(const Rational& o) const { return v_ < o.v_; }
    bool operator<=(const Rational& o) const { return v_ <= o.v_; }
    bool operator>(const Rational& o) const { return v_ > o.v_; }
    bool operator>=(const Rational& o) const { return v_ >= o.v_; }

    int cmp(const Rational& o) const {
        return ::cmp(v_, o.v_) < 0 ? -1 : (::cmp(v_, o.v_) > 0 ? 1 : 0);
    }

    // Approximate size guard used to keep constant folding bounded.
    size_t bit_size() const {
        return mpz_sizeinbase(v_.get_num().get_mpz_t(), 2) +
               mpz_sizeinbase(v_.get_den().get_mpz_t(), 2);
    }

private:
    mpq_class v_;
};

// Ten to the given non-negative power, as an exact integer rational.
Rational pow10(unsigned long e);

}  // namespace mathverify
