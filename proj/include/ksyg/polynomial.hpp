#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ksyg/rational.hpp"

namespace ksyg {

/// Closed double interval used as a floating-point filter in front of exact
/// rational arithmetic. Bounds are widened by one ulp after every operation.
struct DoubleInterval {
    double lo = 0.0;
    double hi = 0.0;

    static DoubleInterval around(double v) {
        return {std::nextafter(v, -HUGE_VAL), std::nextafter(v, HUGE_VAL)};
    }
    static DoubleInterval of(const Rational& r) { return around(r.get_d()); }

    bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
    bool excludes_zero() const { return finite() && (lo > 0.0 || hi < 0.0); }
    int sign() const { return lo > 0.0 ? 1 : (hi < 0.0 ? -1 : 0); }

    friend DoubleInterval operator+(DoubleInterval a, DoubleInterval b) {
        return {std::nextafter(a.lo + b.lo, -HUGE_VAL), std::nextafter(a.hi + b.hi, HUGE_VAL)};
    }
    friend DoubleInterval operator*(DoubleInterval a, DoubleInterval b) {
        double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
        auto [mn, mx] = std::minmax_element(p, p + 4);
        return {std::nextafter(*mn, -HUGE_VAL), std::nextafter(*mx, HUGE_VAL)};
    }
};

/// Univariate polynomial in time with exact rational coefficients, stored
/// lowest degree first. The leading coefficient is nonzero unless the
/// polynomial is zero (empty coefficient vector).
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

    static Polynomial constant(const Rational& c) { return Polynomial(std::vector<Rational>{c}); }
    static Polynomial identity() { return Polynomial(std::vector<Rational>{Rational(0), Rational(1)}); }
    static Polynomial linear(const Rational& c0, const Rational& c1) {
        return Polynomial(std::vector<Rational>{c0, c1});
    }

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    bool is_constant() const { return coeffs_.size() <= 1; }
    std::span<const Rational> coefficients() const { return coeffs_; }
    const Rational& leading() const { return coeffs_.back(); }
    Rational coeff(int i) const {
        return i >= 0 && i < static_cast<int>(coeffs_.size()) ? coeffs_[i] : Rational(0);
    }

    Rational operator()(const Rational& t) const {
        Rational acc(0);
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            acc *= t;
            acc += *it;
        }
        return acc;
    }

    int sign_at(const Rational& t) const { return ksyg::sign((*this)(t)); }

    /// Enclosure of the polynomial over a double interval (Horner form).
    DoubleInterval enclose(DoubleInterval t) const {
        if (coeffs_.empty()) return {0.0, 0.0};
        DoubleInterval acc = DoubleInterval::of(coeffs_.back());
        for (int i = degree() - 1; i >= 0; --i) acc = acc * t + DoubleInterval::of(coeffs_[i]);
        return acc;
    }

    double approx(double t) const {
        double acc = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + it->get_d();
        return acc;
    }

    Polynomial derivative() const {
        if (coeffs_.size() <= 1) return {};
        std::vector<Rational> d(coeffs_.size() - 1);
        for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * static_cast<long>(i);
        return Polynomial(std::move(d));
    }

    Polynomial operator-() const {
        Polynomial r = *this;
        for (auto& c : r.coeffs_) c = -c;
        return r;
    }
    Polynomial& operator+=(const Polynomial& o) {
        if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
        for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        trim();
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
        for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
        trim();
        return *this;
    }
    Polynomial& operator*=(const Rational& s) {
        if (s == 0) {
            coeffs_.clear();
            return *this;
        }
        for (auto& c : coeffs_) c *= s;
        return *this;
    }
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
    friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Rational> r(a.coeffs_.size() + b.coeffs_.size() - 1, Rational(0));
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j) r[i + j] += a.coeffs_[i] * b.coeffs_[j];
        return Polynomial(std::move(r));
    }
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

    /// Euclidean division; divisor must be nonzero.
    static std::pair<Polynomial, Polynomial> divmod(const Polynomial& num, const Polynomial& den) {
        if (den.is_zero()) throw std::domain_error("polynomial division by zero");
        std::vector<Rational> rem = num.coeffs_;
        int dd = den.degree();
        if (num.degree() < dd) return {Polynomial{}, num};
        std::vector<Rational> quot(num.degree() - dd + 1, Rational(0));
        for (int i = num.degree(); i >= dd; --i) {
            if (rem[i] == 0) continue;
            Rational f = rem[i] / den.leading();
            quot[i - dd] = f;
            for (int j = 0; j <= dd; ++j) rem[i - dd + j] -= f * den.coeffs_[j];
        }
        rem.resize(dd);
        return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
    }

    Polynomial monic() const {
        if (is_zero()) return {};
        Polynomial r = *this;
        Rational lead = leading();
        for (auto& c : r.coeffs_) c /= lead;
        return r;
    }

    friend Polynomial gcd(Polynomial a, Polynomial b) {
        while (!b.is_zero()) {
            Polynomial r = divmod(a, b).second;
            a = std::move(b);
            b = r.monic();
        }
        return a.monic();
    }

    /// The polynomial with the same real roots, each of multiplicity one.
    Polynomial squarefree() const {
        if (degree() <= 1) return monic();
        Polynomial g = gcd(*this, derivative());
        if (g.degree() <= 0) return monic();
        return divmod(*this, g).first.monic();
    }

    /// p(a + b x)
    Polynomial compose_affine(const Rational& a, const Rational& b) const {
        // Horner over polynomials in x.
        Polynomial acc;
        Polynomial lin = Polynomial::linear(a, b);
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            acc = acc * lin;
            acc += Polynomial::constant(*it);
        }
        return acc;
    }

    std::string to_string() const {
        if (is_zero()) return "0";
        std::string s;
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (i) s += ' ';
            s += format_rational(coeffs_[i]);
        }
        return s;
    }

private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
    }

    std::vector<Rational> coeffs_;
};

}  // namespace ksyg
