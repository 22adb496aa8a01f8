#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <gmpxx.h>

#include "inflacert/errors.hpp"

// Scalar layer: every quantity in the library is either an exact
// arbitrary-precision rational (GMP mpq, always in lowest terms) or a
// float64 with a fixed comparison tolerance.  All numeric code is
// templated on the scalar type; Scalar<T> supplies the mode-dependent
// pieces (tolerance, comparisons, printing).

namespace inflacert {

using Rational = mpq_class;

template <class T>
struct Scalar;

template <>
struct Scalar<double> {
    static constexpr bool exact = false;
    // Equality tolerance used by every float-mode comparison.
    static constexpr double tolerance = 1e-12;

    static bool equal(double a, double b) { return std::fabs(a - b) <= tolerance; }
    static bool is_zero(double a) { return std::fabs(a) <= tolerance; }
    static bool nonneg(double a) { return a >= -tolerance; }
    static double to_double(double a) { return a; }
    static double abs(double a) { return std::fabs(a); }

    // Shortest representation that round-trips bit-exactly.
    static std::string str(double a) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", a);
        return buf;
    }
};

template <>
struct Scalar<Rational> {
    static constexpr bool exact = true;

    static bool equal(const Rational& a, const Rational& b) { return a == b; }
    static bool is_zero(const Rational& a) { return sgn(a) == 0; }
    static bool nonneg(const Rational& a) { return sgn(a) >= 0; }
    static double to_double(const Rational& a) { return a.get_d(); }
    static Rational abs(const Rational& a) { return ::abs(a); }

    static std::string str(const Rational& a) { return a.get_str(); }
};

inline Rational make_rational(long num, long den) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// Accepts "p/q", an integer, or a plain decimal ("0.8090", "-.25").
inline Rational rational_from_string(const std::string& text) {
    if (text.empty())
        throw ParseError("empty numeric string");
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        try {
            Rational r(text, 10);
            if (r.get_den() == 0)
                throw ParseError("zero denominator in '" + text + "'");
            r.canonicalize();
            return r;
        } catch (const std::invalid_argument&) {
            throw ParseError("cannot parse rational '" + text + "'");
        }
    }
    std::string digits;
    digits.reserve(text.size());
    long frac_digits = 0;
    bool seen_dot = false, seen_digit = false;
    std::size_t i = 0;
    if (text[i] == '+' || text[i] == '-') {
        if (text[i] == '-') digits.push_back('-');
        ++i;
    }
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '.') {
            if (seen_dot)
                throw ParseError("cannot parse number '" + text + "'");
            seen_dot = true;
        } else if (c >= '0' && c <= '9') {
            digits.push_back(c);
            if (seen_dot) ++frac_digits;
            seen_digit = true;
        } else {
            throw ParseError("cannot parse number '" + text + "'");
        }
    }
    if (!seen_digit)
        throw ParseError("cannot parse number '" + text + "'");
    mpz_class num(digits, 10);
    mpz_class den = 1;
    for (long k = 0; k < frac_digits; ++k)
        den *= 10;
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline bool is_perfect_square(const mpz_class& n, mpz_class* root = nullptr) {
    if (sgn(n) < 0)
        return false;
    if (mpz_perfect_square_p(n.get_mpz_t()) == 0)
        return false;
    if (root) {
        mpz_class r;
        mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
        *root = r;
    }
    return true;
}

// Element a + b*sqrt(d) of the real quadratic extension Q(sqrt(d)),
// d a nonnegative rational, non-square unless b is unused.  Only the
// operations needed to evaluate discrete local models exactly.
struct QuadExt {
    Rational a, b, d;

    QuadExt() : a(0), b(0), d(0) {}
    QuadExt(const Rational& ra) : a(ra), b(0), d(0) {}
    QuadExt(int n) : a(n), b(0), d(0) {}
    QuadExt(const Rational& ra, const Rational& rb, const Rational& rd)
        : a(ra), b(rb), d(rd) {}

    bool pure_rational() const { return sgn(b) == 0; }

    static Rational join_d(const QuadExt& x, const QuadExt& y) {
        if (sgn(x.b) == 0) return y.d;
        if (sgn(y.b) == 0) return x.d;
        if (x.d != y.d)
            throw InvalidParameter("mixed quadratic extensions");
        return x.d;
    }

    friend QuadExt operator+(const QuadExt& x, const QuadExt& y) {
        return QuadExt(x.a + y.a, x.b + y.b, join_d(x, y));
    }
    friend QuadExt operator-(const QuadExt& x, const QuadExt& y) {
        return QuadExt(x.a - y.a, x.b - y.b, join_d(x, y));
    }
    friend QuadExt operator*(const QuadExt& x, const QuadExt& y) {
        const Rational d = join_d(x, y);
        return QuadExt(x.a * y.a + x.b * y.b * d, x.a * y.b + x.b * y.a, d);
    }
    QuadExt& operator+=(const QuadExt& y) { return *this = *this + y; }
    QuadExt& operator-=(const QuadExt& y) { return *this = *this - y; }
    QuadExt& operator*=(const QuadExt& y) { return *this = *this * y; }

    friend bool operator==(const QuadExt& x, const QuadExt& y) {
        return x.a == y.a && x.b == y.b && (sgn(x.b) == 0 || x.d == y.d);
    }

    // sign of a + b*sqrt(d)
    int sign() const {
        const int sa = sgn(a), sb = sgn(b);
        if (sb == 0) return sa;
        if (sa == 0) return sb;
        if (sa == sb) return sa;
        // opposite signs: compare a^2 with b^2 d
        const int cmp = cmp3(a * a, b * b * d);
        if (cmp == 0) return 0;
        return cmp > 0 ? sa : sb;
    }

    double to_double() const {
        return a.get_d() + b.get_d() * std::sqrt(d.get_d());
    }

  private:
    static int cmp3(const Rational& x, const Rational& y) {
        return cmp(x, y);
    }
};

template <>
struct Scalar<QuadExt> {
    static constexpr bool exact = true;

    static bool equal(const QuadExt& a, const QuadExt& b) { return a == b; }
    static bool is_zero(const QuadExt& a) { return a.sign() == 0; }
    static bool nonneg(const QuadExt& a) { return a.sign() >= 0; }
    static double to_double(const QuadExt& a) { return a.to_double(); }

    static std::string str(const QuadExt& a) {
        if (a.pure_rational()) return a.a.get_str();
        return a.a.get_str() + "+" + a.b.get_str() + "*sqrt(" + a.d.get_str() + ")";
    }
};

inline std::string scalar_str(double x) { return Scalar<double>::str(x); }
inline std::string scalar_str(const Rational& x) { return Scalar<Rational>::str(x); }

} // namespace inflacert
