#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <unsupported/Eigen/Polynomials>

#include "ksyg/roots.hpp"

namespace ksyg {

/// A point in time: an exact rational or a real algebraic number given by a
/// square-free polynomial and an isolating open interval (lo, hi) whose
/// endpoints are not roots. Refinement is shared between copies.
class Instant {
    struct Algebraic {
        Polynomial poly;
        Rational lo, hi;
        int sign_lo = 0;
        double dlo = 0.0, dhi = 0.0;
        std::optional<Rational> exact;

        void update_doubles() {
            dlo = std::nextafter(lo.get_d(), -HUGE_VAL);
            dhi = std::nextafter(hi.get_d(), HUGE_VAL);
        }
    };

public:
    Instant() : value_(0) {}
    Instant(const Rational& v) : value_(v) {}  // NOLINT(google-explicit-constructor)
    Instant(long v) : value_(v) {}              // NOLINT(google-explicit-constructor)

    /// poly must be square-free with exactly one root in (lo, hi) and nonzero
    /// values at both endpoints.
    static Instant isolated(Polynomial poly, Rational lo, Rational hi) {
        Instant t;
        auto a = std::make_shared<Algebraic>();
        a->poly = poly.monic();
        a->sign_lo = a->poly.sign_at(lo);
        a->lo = std::move(lo);
        a->hi = std::move(hi);
        a->update_doubles();
        t.alg_ = std::move(a);
        return t;
    }

    bool is_rational() const { return !alg_ || alg_->exact.has_value(); }
    const Rational& rational() const { return alg_ ? *alg_->exact : value_; }
    const Polynomial& poly() const { return alg_->poly; }
    const Rational& lower() const { return is_rational() ? rational() : alg_->lo; }
    const Rational& upper() const { return is_rational() ? rational() : alg_->hi; }

    DoubleInterval enclosure() const {
        if (is_rational()) return DoubleInterval::of(rational());
        return {alg_->dlo, alg_->dhi};
    }

    /// Halves the isolating interval. No-op for rationals.
    void refine() const {
        if (is_rational()) return;
        Algebraic& a = *alg_;
        Rational mid = (a.lo + a.hi) / 2;
        int s = a.poly.sign_at(mid);
        if (s == 0) {
            a.exact = mid;
            return;
        }
        if (s == a.sign_lo) a.lo = mid; else a.hi = mid;
        a.update_doubles();
    }

    double approx() const {
        if (is_rational()) return to_double(rational());
        while (!is_rational()) {
            Rational w = alg_->hi - alg_->lo;
            Rational scale = abs(alg_->lo) + 1;
            if (w * Rational(mpz_class(1) << 60) < scale) break;
            refine();
        }
        if (is_rational()) return to_double(rational());
        return to_double(Rational((alg_->lo + alg_->hi) / 2));
    }

    std::string to_string() const {
        char buf[40];
        double v = approx();
        if (v == 0.0) v = 0.0;
        std::snprintf(buf, sizeof buf, "%.15g", v);
        return buf;
    }

    friend int compare(const Instant& a, const Instant& b) {
        if (a.alg_ && a.alg_ == b.alg_) return 0;
        if (a.is_rational() && b.is_rational()) return cmp(a.rational(), b.rational());
        if (a.is_rational()) return compare_rational(a.rational(), b);
        if (b.is_rational()) return -compare_rational(b.rational(), a);
        return compare_algebraic(a, b);
    }
    friend bool operator==(const Instant& a, const Instant& b) { return compare(a, b) == 0; }
    friend bool operator!=(const Instant& a, const Instant& b) { return compare(a, b) != 0; }
    friend bool operator<(const Instant& a, const Instant& b) { return compare(a, b) < 0; }
    friend bool operator>(const Instant& a, const Instant& b) { return compare(a, b) > 0; }
    friend bool operator<=(const Instant& a, const Instant& b) { return compare(a, b) <= 0; }
    friend bool operator>=(const Instant& a, const Instant& b) { return compare(a, b) >= 0; }

private:
    static int compare_rational(const Rational& r, const Instant& b) {
        Algebraic& a = *b.alg_;
        if (r <= a.lo) return -1;
        if (r >= a.hi) return 1;
        int s = a.poly.sign_at(r);
        if (s == 0) {
            a.exact = r;
            return 0;
        }
        return s == a.sign_lo ? -1 : 1;
    }

    static int compare_algebraic(const Instant& a, const Instant& b) {
        for (int round = 0;; ++round) {
            if (a.is_rational() || b.is_rational()) return compare(a, b);
            const Algebraic& x = *a.alg_;
            const Algebraic& y = *b.alg_;
            if (x.dhi < y.dlo) return -1;
            if (y.dhi < x.dlo) return 1;
            if (x.hi <= y.lo) return -1;
            if (y.hi <= x.lo) return 1;
            // Same polynomial: equal iff the overlap brackets a root.
            if (round == 0 && x.poly == y.poly) {
                const Rational& lo = x.lo > y.lo ? x.lo : y.lo;
                const Rational& hi = x.hi < y.hi ? x.hi : y.hi;
                if (x.poly.sign_at(lo) != x.poly.sign_at(hi)) return 0;
            }
            if (round == 4) {
                Polynomial g = gcd(x.poly, y.poly);
                if (g.degree() > 0) {
                    const Rational& lo = x.lo > y.lo ? x.lo : y.lo;
                    const Rational& hi = x.hi < y.hi ? x.hi : y.hi;
                    if (g.sign_at(lo) != g.sign_at(hi)) return 0;
                }
            }
            a.refine();
            b.refine();
        }
    }

    Rational value_;
    std::shared_ptr<Algebraic> alg_;
};

/// Sign of f at t.
inline int sign_at(const Polynomial& f, const Instant& t) {
    if (f.is_zero()) return 0;
    if (t.is_rational()) return f.sign_at(t.rational());
    for (int i = 0; i < 3; ++i) {
        DoubleInterval e = f.enclose(t.enclosure());
        if (e.excludes_zero()) return e.sign();
        t.refine();
        if (t.is_rational()) return f.sign_at(t.rational());
    }
    Polynomial g = gcd(f, t.poly());
    if (g.degree() > 0 && g.sign_at(t.lower()) != g.sign_at(t.upper())) return 0;
    for (;;) {
        if (t.is_rational()) return f.sign_at(t.rational());
        DoubleInterval e = f.enclose(t.enclosure());
        if (e.excludes_zero()) return e.sign();
        if (descartes_count(f, t.lower(), t.upper()) == 0)
            return f.sign_at((t.lower() + t.upper()) / 2);
        t.refine();
    }
}

/// Sign of f on (t, t + eps) for small eps.
inline int sign_after(const Polynomial& f, const Instant& t) {
    Polynomial g = f;
    while (!g.is_zero()) {
        int s = sign_at(g, t);
        if (s != 0) return s;
        g = g.derivative();
    }
    return 0;
}

/// Visits the real roots of square-free s in (a, b) in increasing order until
/// the visitor returns true. Returns whether the visitor stopped the walk.
template <class Visit>
bool visit_roots(const Polynomial& s, const Rational& a, const Rational& b, Visit&& visit) {
    int v = descartes_count(s, a, b);
    if (v == 0) return false;
    if (v == 1 && s.sign_at(a) != 0 && s.sign_at(b) != 0) return visit(Instant::isolated(s, a, b));
    Rational m = (a + b) / 2;
    if (visit_roots(s, a, m, visit)) return true;
    if (s.sign_at(m) == 0 && visit(Instant(m))) return true;
    return visit_roots(s, m, b, visit);
}

namespace detail {

/// Roots of a square-free quadratic, ascending, isolated from double
/// estimates. Empty optional when the estimates cannot be certified.
inline std::optional<std::vector<Instant>> quadratic_roots(const Polynomial& s) {
    const Rational& a = s.coeff(2);
    const Rational& b = s.coeff(1);
    const Rational& c = s.coeff(0);
    Rational disc = b * b - 4 * a * c;
    if (sgn(disc) < 0) return std::vector<Instant>{};
    if (mpz_perfect_square_p(disc.get_num_mpz_t()) && mpz_perfect_square_p(disc.get_den_mpz_t())) {
        mpz_class rn, rd;
        mpz_sqrt(rn.get_mpz_t(), disc.get_num_mpz_t());
        mpz_sqrt(rd.get_mpz_t(), disc.get_den_mpz_t());
        Rational root(rn, rd);
        root.canonicalize();
        Rational r1 = (-b - root) / (2 * a), r2 = (-b + root) / (2 * a);
        if (r2 < r1) std::swap(r1, r2);
        return std::vector<Instant>{Instant(r1), Instant(r2)};
    }
    double da = a.get_d(), db = b.get_d(), dd = std::sqrt(disc.get_d());
    if (!std::isfinite(da) || !std::isfinite(db) || !std::isfinite(dd) || da == 0.0) return std::nullopt;
    // Cancellation-free pair of estimates.
    double q = -0.5 * (db + (db >= 0 ? dd : -dd));
    double x1 = q / da, x2 = c.get_d() / q;
    if (q == 0.0 || !std::isfinite(x1) || !std::isfinite(x2)) return std::nullopt;
    if (x2 < x1) std::swap(x1, x2);
    std::vector<Instant> out;
    Rational prev_hi;
    for (double x : {x1, x2}) {
        // Tight bracket first so most comparisons settle on doubles.
        Rational lo, hi;
        bool ok = false;
        for (double rel : {1e-14, 1e-9}) {
            double delta = rel * (1.0 + std::fabs(x));
            lo = from_double(x - delta);
            hi = from_double(x + delta);
            int sl = s.sign_at(lo), sh = s.sign_at(hi);
            if (sl != 0 && sh != 0 && sl != sh) {
                ok = true;
                break;
            }
        }
        if (!ok) return std::nullopt;
        if (!out.empty() && !(prev_hi < lo)) return std::nullopt;
        prev_hi = hi;
        out.push_back(Instant::isolated(s, lo, hi));
    }
    return out;
}

/// Next root of square-free s after t from numeric estimates, certified by
/// Descartes counts. Outer empty optional when certification fails.
inline std::optional<std::optional<Instant>> certified_next_root(const Polynomial& s, const Instant& t) {
    const int n = s.degree();
    Eigen::VectorXd c(n + 1);
    for (int i = 0; i <= n; ++i) {
        c[i] = s.coeff(i).get_d();
        if (!std::isfinite(c[i])) return std::nullopt;
    }
    if (c[n] == 0.0) return std::nullopt;
    for (int i = 0; i < 64 && !t.is_rational(); ++i) {
        auto e = t.enclosure();
        if (e.hi - e.lo <= 1e-13 * (1.0 + std::fabs(e.lo))) break;
        t.refine();
    }
    // A rational root at t would sit on an interval endpoint; leave it to
    // the general path. An algebraic t inside (lower, upper) counts once.
    const Rational tl = t.lower(), tu = t.upper();
    if (t.is_rational() && s.sign_at(tl) == 0) return std::nullopt;
    const int allowance = !t.is_rational() && sign_at(s, t) == 0 ? 1 : 0;

    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(c);
    std::vector<double> cand;
    for (const auto& r : solver.roots())
        if (std::fabs(r.imag()) <= 1e-7 * (1.0 + std::fabs(r.real()))) cand.push_back(r.real());
    std::sort(cand.begin(), cand.end());
    const double after = tu.get_d();
    for (double x : cand) {
        if (!(x > after)) continue;
        for (double rel : {1e-13, 1e-9}) {
            double delta = rel * (1.0 + std::fabs(x));
            Rational bl = from_double(x - delta), bh = from_double(x + delta);
            if (!(tu < bl)) continue;
            int sl = s.sign_at(bl), sh = s.sign_at(bh);
            if (sl == 0 || sh == 0 || sl == sh) continue;
            if (descartes_count(s, bl, bh) != 1) continue;
            if (descartes_count(s, tl, bl) != allowance) return std::nullopt;
            return std::optional<Instant>(Instant::isolated(s, std::move(bl), std::move(bh)));
        }
        return std::nullopt;
    }
    Rational bound = root_bound(s);
    if (tl >= bound || descartes_count(s, tl, bound) == allowance) return std::optional<Instant>();
    return std::nullopt;
}

}  // namespace detail

/// Smallest root of square-free s strictly greater than t.
inline std::optional<Instant> next_root_after(const Polynomial& s, const Instant& t) {
    if (s.degree() <= 0) return std::nullopt;
    if (s.degree() == 1) {
        Rational r = -s.coeff(0) / s.coeff(1);
        if (Instant(r) > t) return Instant(r);
        return std::nullopt;
    }
    if (s.degree() == 2) {
        if (auto roots = detail::quadratic_roots(s)) {
            for (auto& r : *roots)
                if (r > t) return std::move(r);
            return std::nullopt;
        }
    }
    if (s.degree() >= 3)
        if (auto r = detail::certified_next_root(s, t)) return std::move(*r);
    Rational bound = root_bound(s);
    Rational lo = t.lower();
    if (lo >= bound) return std::nullopt;
    if (lo < -bound) lo = -bound;
    std::optional<Instant> found;
    visit_roots(s, lo, bound, [&](Instant r) {
        if (r > t) {
            found = std::move(r);
            return true;
        }
        return false;
    });
    return found;
}

enum class Parity { odd, even };

/// Smallest root of poly greater than t with whether poly changes sign there.
inline std::optional<std::pair<Instant, Parity>> next_sign_change_after(const Polynomial& poly,
                                                                        const Instant& t) {
    if (poly.degree() <= 0) return std::nullopt;
    auto r = next_root_after(poly.squarefree(), t);
    if (!r) return std::nullopt;
    Polynomial o = odd_part(poly);
    Parity parity = sign_at(o, *r) == 0 ? Parity::odd : Parity::even;
    return std::make_pair(std::move(*r), parity);
}

/// When a certificate "h > 0 just after now" first fails: nullopt if never,
/// now itself if it already fails just after now.
inline std::optional<Instant> failure_time(const Polynomial& h, const Instant& now) {
    if (h.is_zero()) return std::nullopt;
    if (h.degree() == 0) {
        if (sign(h.coeff(0)) < 0) return now;
        return std::nullopt;
    }
    int s = sign_after(h, now);
    if (s < 0) return now;
    if (h.degree() <= 2) {
        // A quadratic is its own odd part unless it is a square.
        if (h.degree() == 2 && h.coeff(1) * h.coeff(1) == 4 * h.coeff(2) * h.coeff(0)) return std::nullopt;
        return next_root_after(h, now);
    }
    return next_root_after(odd_part(h), now);
}

/// A dyadic rational strictly between a and b, a < b, with the smallest
/// power-of-two denominator available.
inline Rational rational_between(const Instant& a, const Instant& b) {
    if (!(a < b)) throw std::invalid_argument("empty interval");
    while (!(a.upper() < b.lower())) {
        a.refine();
        b.refine();
    }
    const Rational& lo = a.upper();
    const Rational& hi = b.lower();
    for (int e = 0;; ++e) {
        mpz_class den = mpz_class(1) << e;
        Rational scaled = lo * Rational(den);
        mpz_class m = scaled.get_num() / scaled.get_den();  // truncation toward zero
        if (Rational(m) > scaled) m -= 1;
        Rational cand(m + 1, den);
        cand.canonicalize();
        if (cand > lo && cand < hi) return cand;
    }
}

}  // namespace ksyg
