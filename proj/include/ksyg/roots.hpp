#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "ksyg/polynomial.hpp"

namespace ksyg {

namespace detail {

inline void taylor_shift_one(std::vector<Rational>& c) {
    const int n = static_cast<int>(c.size()) - 1;
    for (int i = 0; i < n; ++i)
        for (int j = n - 1; j >= i; --j) c[j] += c[j + 1];
}

inline int sign_variations(const std::vector<Rational>& c) {
    int count = 0;
    int last = 0;
    for (const auto& v : c) {
        int s = sgn(v);
        if (s == 0) continue;
        if (last != 0 && s != last) ++count;
        last = s;
    }
    return count;
}

}  // namespace detail

/// Descartes bound on the number of roots of p in the open interval (a, b),
/// counted with multiplicity. Zero and one are exact answers.
inline int descartes_count(const Polynomial& p, const Rational& a, const Rational& b) {
    if (p.degree() <= 0) return 0;
    Polynomial q = p.compose_affine(a, b - a);
    auto cs = q.coefficients();
    std::vector<Rational> c(cs.rbegin(), cs.rend());
    // q has the same degree as p, but compose may leave low zero terms; keep them.
    c.resize(static_cast<std::size_t>(p.degree()) + 1, Rational(0));
    detail::taylor_shift_one(c);
    return detail::sign_variations(c);
}

/// Power of two strictly exceeding the absolute value of every real root.
inline Rational root_bound(const Polynomial& p) {
    Rational m(0);
    for (int i = 0; i < p.degree(); ++i) {
        Rational r = abs(p.coeff(i) / p.leading());
        if (r > m) m = r;
    }
    m += 1;
    Rational b(1);
    while (b <= m) b *= 2;
    return b;
}

/// Yun's square-free factorization: pairs (factor, multiplicity), factors monic.
inline std::vector<std::pair<Polynomial, int>> squarefree_factorization(const Polynomial& f) {
    std::vector<std::pair<Polynomial, int>> out;
    if (f.degree() <= 0) return out;
    Polynomial fp = f.derivative();
    Polynomial a0 = gcd(f, fp);
    Polynomial b = Polynomial::divmod(f, a0).first;
    Polynomial c = Polynomial::divmod(fp, a0).first;
    Polynomial d = c - b.derivative();
    for (int i = 1; b.degree() > 0; ++i) {
        Polynomial a = gcd(b, d);
        b = Polynomial::divmod(b, a).first;
        c = Polynomial::divmod(d, a).first;
        d = c - b.derivative();
        if (a.degree() > 0) out.emplace_back(a.monic(), i);
    }
    return out;
}

/// Product of the square-free factors of odd multiplicity: the roots where f
/// changes sign.
inline Polynomial odd_part(const Polynomial& f) {
    if (f.degree() <= 0) return Polynomial::constant(Rational(1));
    if (gcd(f, f.derivative()).degree() <= 0) return f.monic();
    Polynomial o = Polynomial::constant(Rational(1));
    for (auto& [fac, mult] : squarefree_factorization(f))
        if (mult % 2 == 1) o = o * fac;
    return o;
}

}  // namespace ksyg
