#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

#include "renyi/errors.hpp"

namespace renyi {

/// Exact rational scalar. GMP keeps it canonical (den > 0, gcd = 1) after
/// every arithmetic operation.
using Rational = mpq_class;
using Integer = mpz_class;

/// "num/den" form, always with an explicit denominator ("0/1", "-6/5").
inline std::string to_string(const Rational& q)
{
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// Parses "num/den" or a bare integer. The result is canonicalized.
inline Rational parse_rational(std::string_view text)
{
    std::string s(text);
    if (s.empty()) throw ParseError("empty rational literal");
    Rational q;
    if (q.set_str(s, 10) != 0) throw ParseError("malformed rational literal '" + s + "'");
    if (q.get_den() == 0) throw ParseError("zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
}

/// num/den in canonical form.
inline Rational make_rational(long num, unsigned long den)
{
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline double to_double(const Rational& q) { return q.get_d(); }

/// Exact conversion of a finite double.
inline Rational from_double(double v) { return Rational(v); }

inline Rational pow(const Rational& base, unsigned exponent)
{
    Rational result(1);
    mpz_pow_ui(result.get_num_mpz_t(), base.get_num_mpz_t(), exponent);
    mpz_pow_ui(result.get_den_mpz_t(), base.get_den_mpz_t(), exponent);
    result.canonicalize();
    return result;
}

inline Integer factorial(unsigned k)
{
    Integer r;
    mpz_fac_ui(r.get_mpz_t(), k);
    return r;
}

inline Integer binomial(unsigned n, unsigned k)
{
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

}  // namespace renyi
