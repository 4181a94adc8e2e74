#include "mathverify/rational.hpp"

#include <cctype>

namespace mathverify {

std::optional<Rational> Rational::parse(std::string_view s) {
    if (s.empty()) return std::nullopt;
    // mpq_class accepts forms like "1/0"; validate shape and denominator here.
    size_t slash = s.find('/');
    auto valid_int = [](std::string_view t) {
        if (t.empty()) return false;
        size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
        return true;
    };
    if (slash == std::string_view::npos) {
        if (!valid_int(s)) return std::nullopt;
        return Rational(mpq_class(std::string(s)));
    }
    std::string_view num = s.substr(0, slash);
    std::string_view den = s.substr(slash + 1);
    if (!valid_int(num) || !valid_int(den)) return std::nullopt;
    mpz_class n{std::string(num)};
    mpz_class d{std::string(den)};
    if (d == 0) return std::nullopt;
    return Rational(n, d);
}

std::optional<long> Rational::to_long() const {
    if (!is_integer()) return std::nullopt;
    if (!v_.get_num().fits_slong_p()) return std::nullopt;
    return v_.get_num().get_si();
}

std::string Rational::to_string() const {
    if (is_integer()) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

Rational Rational::pow_int(long e) const {
    mpz_class n, d;
    unsigned long ae = static_cast<unsigned long>(e < 0 ? -e : e);
    mpz_pow_ui(n.get_mpz_t(), v_.get_num().get_mpz_t(), ae);
    mpz_pow_ui(d.get_mpz_t(), v_.get_den().get_mpz_t(), ae);
    if (e < 0) std::swap(n, d);
    return Rational(n, d);
}

std::optional<Rational> Rational::nth_root(unsigned long degree) const {
    if (degree == 0) return std::nullopt;
    if (degree == 1) return *this;
    if (is_negative() && degree % 2 == 0) return std::nullopt;
    mpz_class n = v_.get_num(), d = v_.get_den();
    mpz_class rn, rd;
    int exact_n = mpz_root(rn.get_mpz_t(), n.get_mpz_t(), degree);
    int exact_d = mpz_root(rd.get_mpz_t(), d.get_mpz_t(), degree);
    if (!exact_n || !exact_d) return std::nullopt;
    return Rational(rn, rd);
}

Rational pow10(unsigned long e) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, e);
    return Rational(p);
}

}  // namespace mathverify
