#pragma once

#include <stdexcept>
#include <vector>

#include "ksyg/instant.hpp"

namespace ksyg {

using Point = std::vector<Rational>;
using Direction = std::vector<Rational>;

/// A moving point: one polynomial in t per coordinate.
struct Trajectory {
    int id = 0;
    std::vector<Polynomial> coords;

    int dim() const { return static_cast<int>(coords.size()); }
    int degree() const {
        int s = 0;
        for (const auto& c : coords) s = std::max(s, c.degree());
        return s;
    }
};

inline Point evaluate(const Trajectory& traj, const Rational& t) {
    Point p;
    p.reserve(traj.coords.size());
    for (const auto& c : traj.coords) p.push_back(c(t));
    return p;
}

inline Trajectory stationary(int id, const Point& p) {
    Trajectory tr{id, {}};
    for (const auto& v : p) tr.coords.push_back(Polynomial::constant(v));
    return tr;
}

inline Polynomial distance_sq_polynomial(const Trajectory& a, const Trajectory& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
    Polynomial sum;
    for (int i = 0; i < a.dim(); ++i) {
        Polynomial diff = a.coords[i] - b.coords[i];
        sum += diff * diff;
    }
    return sum;
}

inline Rational distance_sq(const Point& a, const Point& b) {
    Rational s(0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        Rational d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

/// v . traj(t) as a polynomial in t.
inline Polynomial project(const Direction& v, const Trajectory& traj) {
    Polynomial sum;
    for (int i = 0; i < traj.dim(); ++i)
        if (v[i] != 0) sum += traj.coords[i] * v[i];
    return sum;
}

inline Rational dot(const Direction& v, const Point& p) {
    Rational s(0);
    for (std::size_t i = 0; i < p.size(); ++i) s += v[i] * p[i];
    return s;
}

}  // namespace ksyg
