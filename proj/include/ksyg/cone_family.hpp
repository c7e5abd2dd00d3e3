#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ksyg/kinetic_key.hpp"
#include "ksyg/motion.hpp"

namespace ksyg {

/// One polyhedral cone of the cover: the intersection of d half-spaces
/// u_i . x >= 0 (exact integer normals) plus reporting data in doubles.
struct ConeTemplate {
    int id = 0;
    std::vector<std::vector<double>> normals;  // unit inward normals u_1..u_d
    std::vector<double> axis;                  // unit axis x_l
    double opening_angle = 0.0;                // bound on the angle between two directions inside
    std::vector<std::vector<double>> rays;     // unit extreme directions

    std::vector<Direction> exact_normals;
    Direction exact_axis;
    // frame_levels[i] = (u_i, R u_i, ..., R^{d-1} u_i): the perturbed frame
    // coordinate i compares these lexicographically, then sign(u_i . w) * id.
    std::vector<std::vector<Direction>> frame_levels;
    std::vector<int> frame_tie_sign;
};

struct ConeFamily {
    int dim = 0;
    double theta = 0.0;
    int grid = 0;  // cells per facet axis for d >= 3, 0 for d = 2
    bool wider_than_pi_over_3 = false;  // the k-NN graph is only guaranteed inside the k-SYG up to pi/3
    std::vector<ConeTemplate> cones;

    int c() const { return static_cast<int>(cones.size()); }
};

/// Documented constant C(d) with c <= C(d) * theta^{-(d-1)}.
inline double cone_count_constant(int d) {
    if (d == 2) return 3.0 * std::numbers::pi;
    double fact = 1.0;
    for (int i = 2; i < d; ++i) fact *= i;
    return 2.0 * d * fact * std::pow(2.0 * std::numbers::pi * std::sqrt(d - 1.0), d - 1);
}

namespace detail {

constexpr double kScale = 1099511627776.0;  // 2^40

inline Rational scaled_integer(double v) { return Rational(mpz_class(static_cast<long>(std::llround(v * kScale)))); }

inline std::vector<double> unit(const Direction& v) {
    std::vector<double> out(v.size());
    double n = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = to_double(v[i]);
        n += out[i] * out[i];
    }
    n = std::sqrt(n);
    for (auto& x : out) x /= n;
    return out;
}

inline double dotd(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double angle_between(const std::vector<double>& a, const std::vector<double>& b) {
    return std::acos(std::clamp(dotd(a, b), -1.0, 1.0));
}

inline Rational determinant(std::vector<std::vector<Rational>> m) {
    const int n = static_cast<int>(m.size());
    Rational det(1);
    for (int c = 0; c < n; ++c) {
        int piv = c;
        while (piv < n && m[piv][c] == 0) ++piv;
        if (piv == n) return Rational(0);
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (int r = c + 1; r < n; ++r) {
            if (m[r][c] == 0) continue;
            Rational f = m[r][c] / m[c][c];
            for (int k = c; k < n; ++k) m[r][k] -= f * m[c][k];
        }
    }
    return det;
}

/// Vector orthogonal to the d-1 given vectors (cofactor expansion).
inline Direction cross(const std::vector<Direction>& vs, int d) {
    Direction out(d);
    for (int j = 0; j < d; ++j) {
        std::vector<std::vector<Rational>> m;
        for (const auto& v : vs) {
            std::vector<Rational> row;
            for (int k = 0; k < d; ++k)
                if (k != j) row.push_back(v[k]);
            m.push_back(std::move(row));
        }
        Rational det = determinant(std::move(m));
        out[j] = (j % 2 == 0) ? det : Rational(-det);
    }
    return out;
}

/// Divides an integer vector by the gcd of its entries.
inline Direction primitive(Direction v) {
    mpz_class g(0);
    for (const auto& x : v) g = gcd(g, mpz_class(x.get_num()));
    if (g > 1)
        for (auto& x : v) x /= Rational(g);
    return v;
}

inline Rational dotq(const Direction& a, const Direction& b) {
    Rational s(0);
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline Direction mat_vec(const std::vector<std::vector<long>>& m, const Direction& v) {
    Direction out(v.size(), Rational(0));
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j)
            if (m[i][j] != 0) out[i] += v[j] * m[i][j];
    return out;
}

/// Equal-angle direction to the rays if it lies inside the cone, otherwise
/// the normalized mean.
inline std::vector<double> central_axis(const std::vector<std::vector<double>>& rays,
                                        const std::vector<std::vector<double>>& normals) {
    const int d = static_cast<int>(rays.size());
    // Solve E a = 1 with Gaussian elimination in doubles.
    std::vector<std::vector<double>> m(d, std::vector<double>(d + 1, 1.0));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m[i][j] = rays[i][j];
    bool ok = true;
    for (int c = 0; c < d && ok; ++c) {
        int piv = c;
        for (int r = c + 1; r < d; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        if (std::abs(m[piv][c]) < 1e-14) {
            ok = false;
            break;
        }
        std::swap(m[piv], m[c]);
        for (int r = 0; r < d; ++r) {
            if (r == c) continue;
            double f = m[r][c] / m[c][c];
            for (int k = c; k <= d; ++k) m[r][k] -= f * m[c][k];
        }
    }
    std::vector<double> a(d, 0.0);
    if (ok) {
        for (int i = 0; i < d; ++i) a[i] = m[i][d] / m[i][i];
        double n = std::sqrt(dotd(a, a));
        for (auto& x : a) x /= n;
        for (const auto& u : normals)
            if (dotd(u, a) <= 1e-12) ok = false;
    }
    if (!ok) {
        std::fill(a.begin(), a.end(), 0.0);
        for (const auto& r : rays)
            for (int i = 0; i < d; ++i) a[i] += r[i];
        double n = std::sqrt(dotd(a, a));
        for (auto& x : a) x /= n;
    }
    return a;
}

/// Simplicial cone over integer vertex directions: normals, axis, angles.
inline ConeTemplate simplicial_cone(const std::vector<Direction>& verts) {
    const int d = static_cast<int>(verts.size());
    ConeTemplate cone;
    for (const auto& v : verts) cone.rays.push_back(unit(v));
    for (int i = 0; i < d; ++i) {
        std::vector<Direction> others;
        for (int j = 0; j < d; ++j)
            if (j != i) others.push_back(verts[j]);
        Direction n = primitive(cross(others, d));
        if (dotq(n, verts[i]) < 0)
            for (auto& x : n) x = -x;
        cone.exact_normals.push_back(n);
        cone.normals.push_back(unit(n));
    }
    std::vector<double> a = central_axis(cone.rays, cone.normals);
    double half = 0.0;
    for (const auto& r : cone.rays) half = std::max(half, angle_between(a, r));
    cone.opening_angle = 2.0 * half;
    cone.exact_axis.resize(d);
    for (int i = 0; i < d; ++i) cone.exact_axis[i] = scaled_integer(a[i]);
    cone.axis = unit(cone.exact_axis);
    return cone;
}

inline std::vector<double> tan_grid(int g) {
    std::vector<double> c(g + 1);
    for (int j = 0; j <= g; ++j) c[j] = std::tan(-std::numbers::pi / 4 + j * std::numbers::pi / (2.0 * g));
    c[0] = -1.0;
    c[g] = 1.0;
    if (g % 2 == 0) c[g / 2] = 0.0;
    return c;
}

/// All simplicial cones over the cube facets with grid size g.
inline std::vector<ConeTemplate> cube_cones(int d, int g, bool first_facet_only) {
    std::vector<double> grid = tan_grid(g);
    std::vector<Rational> gq(g + 1);
    for (int j = 0; j <= g; ++j) gq[j] = scaled_integer(grid[j]);
    std::vector<ConeTemplate> out;
    for (int a = 0; a < d; ++a) {
        for (int sg : {1, -1}) {
            std::vector<int> others;
            for (int b = 0; b < d; ++b)
                if (b != a) others.push_back(b);
            const int m = d - 1;
            std::vector<int> cell(m, 0);
            for (;;) {
                std::vector<int> perm(m);
                std::iota(perm.begin(), perm.end(), 0);
                do {
                    std::vector<Direction> verts;
                    std::vector<int> idx = cell;
                    auto vertex = [&]() {
                        Direction v(d);
                        v[a] = Rational(sg) * scaled_integer(1.0);
                        for (int t = 0; t < m; ++t) v[others[t]] = gq[idx[t]];
                        return v;
                    };
                    verts.push_back(vertex());
                    for (int step = 0; step < m; ++step) {
                        ++idx[perm[step]];
                        verts.push_back(vertex());
                    }
                    out.push_back(simplicial_cone(verts));
                } while (std::next_permutation(perm.begin(), perm.end()));
                int t = 0;
                while (t < m && ++cell[t] == g) cell[t++] = 0;
                if (t == m) break;
            }
            if (first_facet_only) return out;
        }
    }
    return out;
}

/// Perturbation matrix for the frame levels; det of the Krylov basis must not vanish.
inline std::vector<std::vector<long>> perturbation_matrix(int d, int attempt) {
    std::vector<std::vector<long>> r(d, std::vector<long>(d, 0));
    if (d == 2) {
        // Clockwise quarter turn: a point on the lower boundary ray of a cone
        // belongs to that cone (half-open sectors [lo, hi)).
        r[0][1] = 1;
        r[1][0] = -1;
        return r;
    }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) r[i][j] = ((i + 2) * (j + 3) * (attempt + 5) + i * i * 7 + j) % 11 - 5;
    return r;
}

inline Direction generic_vector(int d, int attempt) {
    static const long primes[] = {1, 3, 7, 13, 31, 61, 127, 251, 509, 1021, 2039, 4093};
    Direction w(d);
    for (int i = 0; i < d; ++i) w[i] = Rational(primes[(i + attempt) % 12] * (i % 2 ? -1 : 1) + attempt);
    return w;
}

inline void attach_frames(ConeFamily& fam) {
    const int d = fam.dim;
    for (int attempt = 0; attempt < 64; ++attempt) {
        auto r = perturbation_matrix(d, attempt);
        Direction w = generic_vector(d, attempt);
        bool ok = true;
        for (auto& cone : fam.cones) {
            cone.frame_levels.assign(d, {});
            cone.frame_tie_sign.assign(d, 0);
            for (int i = 0; i < d && ok; ++i) {
                std::vector<Direction> lv{cone.exact_normals[i]};
                for (int k = 1; k < d; ++k) lv.push_back(primitive(mat_vec(r, lv.back())));
                if (determinant(lv) == 0) ok = false;
                int s = sgn(dotq(cone.exact_normals[i], w));
                if (s == 0) ok = false;
                cone.frame_levels[i] = std::move(lv);
                cone.frame_tie_sign[i] = s;
            }
            if (!ok) break;
        }
        if (ok) return;
    }
    throw std::runtime_error("no generic perturbation found");
}

}  // namespace detail

/// Deterministic cone cover of R^d with opening angle at most theta.
inline ConeFamily build_cone_family(int d, double theta) {
    if (d < 2) throw std::invalid_argument("dimension must be at least 2");
    if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
    ConeFamily fam;
    fam.dim = d;
    fam.theta = theta;
    fam.wider_than_pi_over_3 = theta > std::numbers::pi / 3 + 1e-12;
    const double two_pi = 2.0 * std::numbers::pi;
    if (d == 2) {
        int c = static_cast<int>(std::ceil(two_pi / theta - 1e-9));
        if (c < 3) throw std::invalid_argument("theta too large for a pointed planar cover");
        std::vector<double> beta(c + 1);
        for (int l = 0; l < c; ++l) beta[l] = l * theta - theta / 2;
        beta[c] = beta[0] + two_pi;
        auto ray = [](double phi) {
            return Direction{detail::scaled_integer(std::cos(phi)), detail::scaled_integer(std::sin(phi))};
        };
        std::vector<Direction> b(c);
        for (int l = 0; l < c; ++l) b[l] = detail::primitive(ray(beta[l]));
        for (int l = 0; l < c; ++l) {
            ConeTemplate cone;
            const Direction& lo = b[l];
            const Direction& hi = b[(l + 1) % c];
            cone.exact_normals = {Direction{-lo[1], lo[0]}, Direction{hi[1], -hi[0]}};
            for (const auto& n : cone.exact_normals) cone.normals.push_back(detail::unit(n));
            cone.rays = {detail::unit(lo), detail::unit(hi)};
            double mid = (beta[l] + beta[l + 1]) / 2;
            cone.exact_axis = detail::primitive(ray(mid));
            cone.axis = detail::unit(cone.exact_axis);
            cone.opening_angle = beta[l + 1] - beta[l];
            fam.cones.push_back(std::move(cone));
        }
    } else {
        int g = 1;
        for (;; ++g) {
            double worst = 0.0;
            for (const auto& cone : detail::cube_cones(d, g, true)) worst = std::max(worst, cone.opening_angle);
            if (worst <= theta) break;
            if (g > 64) throw std::invalid_argument("theta too small for this dimension");
        }
        fam.grid = g;
        fam.cones = detail::cube_cones(d, g, false);
    }
    for (int l = 0; l < fam.c(); ++l) fam.cones[l].id = l;
    detail::attach_frames(fam);
    return fam;
}

/// Static lexicographic key of a point in frame coordinate i of cone l.
struct FrameKey {
    std::vector<Rational> levels;
    long tie = 0;

    friend int compare(const FrameKey& a, const FrameKey& b) {
        for (std::size_t i = 0; i < a.levels.size(); ++i) {
            int c = cmp(a.levels[i], b.levels[i]);
            if (c != 0) return c;
        }
        return a.tie < b.tie ? -1 : (a.tie > b.tie ? 1 : 0);
    }
    friend bool operator<(const FrameKey& a, const FrameKey& b) { return compare(a, b) < 0; }
};

inline FrameKey frame_key(const ConeFamily& fam, int l, int i, const Point& p, int id) {
    const ConeTemplate& cone = fam.cones.at(l);
    FrameKey k;
    for (const auto& dir : cone.frame_levels.at(i)) k.levels.push_back(dot(dir, p));
    k.tie = static_cast<long>(cone.frame_tie_sign[i]) * id;
    return k;
}

/// Axis key (x_l . p, id).
inline FrameKey axis_key(const ConeFamily& fam, int l, const Point& p, int id) {
    return FrameKey{{dot(fam.cones.at(l).exact_axis, p)}, id};
}

inline KineticKey frame_kinetic_key(const ConeFamily& fam, int l, int i, const Trajectory& tr) {
    const ConeTemplate& cone = fam.cones.at(l);
    KineticKey k;
    for (const auto& dir : cone.frame_levels.at(i)) k.levels.push_back(project(dir, tr));
    k.tie = static_cast<long>(cone.frame_tie_sign[i]) * tr.id;
    return k;
}

inline KineticKey axis_kinetic_key(const ConeFamily& fam, int l, const Trajectory& tr) {
    return KineticKey{{project(fam.cones.at(l).exact_axis, tr)}, tr.id};
}

/// Membership of the offset v = q - p in cone l, with pid/qid deciding v = 0.
/// A double filter settles clear cases before the exact perturbed comparison.
inline bool offset_in_cone(const ConeFamily& fam, int l, const Direction& v, const std::vector<double>& vd,
                           double vnorm, int pid, int qid) {
    const ConeTemplate& cone = fam.cones[l];
    for (int i = 0; i < fam.dim; ++i) {
        double approx = detail::dotd(cone.normals[i], vd);
        if (approx > 1e-9 * vnorm) continue;
        if (approx < -1e-9 * vnorm) return false;
        int s = 0;
        for (const auto& dir : cone.frame_levels[i]) {
            s = sgn(detail::dotq(dir, v));
            if (s != 0) break;
        }
        if (s == 0) s = cone.frame_tie_sign[i] * (qid > pid ? 1 : -1);
        if (s < 0) return false;
    }
    return true;
}

/// q in C_l(p) under the tie-break rule (ids only matter for coincident points).
inline bool in_cone(const ConeFamily& fam, int l, const Point& p, int pid, const Point& q, int qid) {
    if (pid == qid) return false;
    Direction v(fam.dim);
    std::vector<double> vd(fam.dim);
    double n = 0.0;
    for (int i = 0; i < fam.dim; ++i) {
        v[i] = q[i] - p[i];
        vd[i] = v[i].get_d();
        n += vd[i] * vd[i];
    }
    return offset_in_cone(fam, l, v, vd, std::sqrt(n), pid, qid);
}

/// p in the reflected cone of q: the same relation read from q.
inline bool in_reflected_cone(const ConeFamily& fam, int l, const Point& q, int qid, const Point& p, int pid) {
    return in_cone(fam, l, p, pid, q, qid);
}

/// The unique cone l with target in C_l(apex). Distinct ids are required; equal
/// positions are resolved by the ids.
inline int locate_cone(const ConeFamily& fam, const Point& apex, int apex_id, const Point& target, int target_id) {
    if (apex_id == target_id) throw std::invalid_argument("target is the apex");
    const int d = fam.dim;
    Direction v(d);
    std::vector<double> vd(d);
    double norm = 0.0;
    for (int i = 0; i < d; ++i) {
        v[i] = target[i] - apex[i];
        vd[i] = v[i].get_d();
        norm += vd[i] * vd[i];
    }
    norm = std::sqrt(norm);
    for (int l = 0; l < fam.c(); ++l)
        if (offset_in_cone(fam, l, v, vd, norm, apex_id, target_id)) return l;
    throw std::logic_error("cone cover is not a partition");
}

/// Convenience overload for distinct positions.
inline int locate_cone(const ConeFamily& fam, const Point& apex, const Point& target) {
    if (apex == target) throw std::invalid_argument("target equals apex");
    return locate_cone(fam, apex, 0, target, 1);
}

inline double axis_coordinate(const ConeFamily& fam, int l, const std::vector<double>& p) {
    return detail::dotd(fam.cones.at(l).axis, p);
}

inline double frame_coordinate(const ConeFamily& fam, int l, int i, const std::vector<double>& p) {
    if (i < 1 || i > fam.dim) throw std::out_of_range("frame axis index out of range");
    return detail::dotd(fam.cones.at(l).normals[i - 1], p);
}

}  // namespace ksyg
