#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>

namespace ksyg {

using Rational = mpq_class;

inline int sign(const Rational& r) { return sgn(r); }

/// Parses a plain decimal literal ("-0.5", "3", "1e-3", "+2.25") into an exact
/// rational. Returns nullopt on anything else.
inline std::optional<Rational> parse_decimal(std::string_view text) {
    if (text.empty()) return std::nullopt;
    std::size_t i = 0;
    bool negative = false;
    if (text[i] == '+' || text[i] == '-') {
        negative = text[i] == '-';
        ++i;
    }
    std::string digits;
    long exponent = 0;
    bool seen_digit = false;
    bool seen_point = false;
    for (; i < text.size(); ++i) {
        char ch = text[i];
        if (ch >= '0' && ch <= '9') {
            digits.push_back(ch);
            seen_digit = true;
            if (seen_point) --exponent;
        } else if (ch == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit) return std::nullopt;
    if (i < text.size()) {
        if (text[i] != 'e' && text[i] != 'E') return std::nullopt;
        ++i;
        bool exp_negative = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
            exp_negative = text[i] == '-';
            ++i;
        }
        if (i >= text.size()) return std::nullopt;
        long e = 0;
        for (; i < text.size(); ++i) {
            if (text[i] < '0' || text[i] > '9') return std::nullopt;
            e = e * 10 + (text[i] - '0');
            if (e > 100000) return std::nullopt;
        }
        exponent += exp_negative ? -e : e;
    }
    mpz_class numerator(digits, 10);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
    Rational value;
    if (exponent >= 0) {
        value = Rational(numerator * scale);
    } else {
        value = Rational(numerator, scale);
        value.canonicalize();
    }
    if (negative) value = -value;
    return value;
}

/// Exact rational value of a finite double.
inline Rational from_double(double v) {
    Rational r;
    mpq_set_d(r.get_mpq_t(), v);
    return r;
}

/// Nearest double (mpq_get_d truncates toward zero).
inline double to_double(const Rational& r) {
    double d = r.get_d();
    if (!std::isfinite(d)) return d;
    double best = d;
    Rational err = abs(from_double(d) - r);
    for (double c : {std::nextafter(d, -HUGE_VAL), std::nextafter(d, HUGE_VAL)}) {
        if (!std::isfinite(c)) continue;
        Rational e = abs(from_double(c) - r);
        if (e < err) {
            err = e;
            best = c;
        }
    }
    return best;
}

/// Decimal rendering: integers and short terminating fractions print exactly,
/// everything else falls back to 17 significant digits.
inline std::string format_rational(const Rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    mpz_class den = r.get_den();
    unsigned twos = 0;
    unsigned fives = 0;
    while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
        den /= 2;
        ++twos;
    }
    while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
        den /= 5;
        ++fives;
    }
    unsigned places = std::max(twos, fives);
    if (den == 1 && places <= 30) {
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, places);
        mpz_class scaled = r.get_num() * scale / r.get_den();
        bool negative = scaled < 0;
        if (negative) scaled = -scaled;
        std::string s = scaled.get_str();
        if (s.size() <= places) s.insert(0, places - s.size() + 1, '0');
        s.insert(s.size() - places, ".");
        return negative ? "-" + s : s;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", to_double(r));
    return buf;
}

}  // namespace ksyg
