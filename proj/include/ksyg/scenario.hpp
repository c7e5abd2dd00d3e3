#pragma once

#include <algorithm>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ksyg/motion.hpp"

namespace ksyg {

struct RkNNQuery {
    Rational t;
    int k = 1;
    Point q;

    friend bool operator==(const RkNNQuery&, const RkNNQuery&) = default;
};

/// A parsed scenario. Trajectories are stored by ascending external id and
/// carry their index as id; ids[i] is the external id of index i.
struct Scenario {
    int dim = 2;
    int degree = 1;
    int k = 1;
    std::optional<Rational> theta;    // cone angle for the k-SYG
    std::optional<Rational> epsilon;  // switches on the (1+eps)-NN structure
    Rational t0{0}, t_end{10};
    std::vector<long> ids;
    std::vector<Trajectory> points;
    std::vector<RkNNQuery> queries;

    int n() const { return static_cast<int>(points.size()); }

    /// theta when given, pi/3 otherwise.
    double cone_angle() const { return theta ? theta->get_d() : std::numbers::pi / 3; }

    friend bool operator==(const Scenario& a, const Scenario& b) {
        if (a.dim != b.dim || a.degree != b.degree || a.k != b.k || a.theta != b.theta || a.epsilon != b.epsilon ||
            a.t0 != b.t0 || a.t_end != b.t_end || a.ids != b.ids || a.queries != b.queries ||
            a.points.size() != b.points.size())
            return false;
        for (std::size_t i = 0; i < a.points.size(); ++i)
            if (a.points[i].id != b.points[i].id || a.points[i].coords != b.points[i].coords) return false;
        return true;
    }
};

struct ParseError {
    int line = 0;  // 0 for file-level problems
    std::string message;
};

class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(std::vector<ParseError> errors)
        : std::runtime_error(render(errors)), errors_(std::move(errors)) {}
    const std::vector<ParseError>& errors() const { return errors_; }

private:
    static std::string render(const std::vector<ParseError>& errors) {
        std::string out;
        for (const auto& e : errors) {
            if (!out.empty()) out += '\n';
            out += e.line > 0 ? "line " + std::to_string(e.line) + ": " + e.message : e.message;
        }
        return out;
    }
    std::vector<ParseError> errors_;
};

/// Decimal literal or "p/q".
inline std::optional<Rational> parse_number(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return parse_decimal(s);
    auto num = parse_decimal(s.substr(0, slash));
    auto den = parse_decimal(s.substr(slash + 1));
    if (!num || !den || sgn(*den) == 0 || num->get_den() != 1 || den->get_den() != 1) return std::nullopt;
    Rational r = *num / *den;
    r.canonicalize();
    return r;
}

/// Exact text for r: a terminating decimal when one exists, else "p/q".
inline std::string exact_text(const Rational& r) {
    mpz_class den = r.get_den();
    while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) den /= 2;
    while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) den /= 5;
    if (den == 1) {
        std::string s = format_rational(r);
        if (parse_decimal(s) == r) return s;
    }
    return r.get_str();
}

inline Scenario parse_scenario(const std::string& text) {
    Scenario sc;
    std::vector<ParseError> errors;
    std::map<long, std::pair<int, std::vector<Polynomial>>> points;  // id -> (line, coords)
    struct PendingQuery {
        int line;
        RkNNQuery q;
    };
    std::vector<PendingQuery> queries;
    bool seen_magic = false, seen_dim = false, seen_time = false;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    auto err = [&](const std::string& m) { errors.push_back({lineno, m}); };
    auto whole = [&](const std::string& tok, long& out) {
        auto v = parse_decimal(tok);
        if (!v || v->get_den() != 1 || !v->get_num().fits_slong_p()) return false;
        out = v->get_num().get_si();
        return true;
    };
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line;
        for (char ch : raw.substr(0, raw.find('#'))) {
            if (ch == ';') line += " ; ";
            else line += ch;
        }
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        if (!seen_magic) {
            if (tok.size() != 2 || tok[0] != "ksyg-scenario" || tok[1] != "v1") {
                err("expected 'ksyg-scenario v1'");
                break;
            }
            seen_magic = true;
            continue;
        }
        const std::string& kw = tok[0];
        if (kw == "dim" || kw == "degree" || kw == "k") {
            long v = 0;
            if (tok.size() != 2 || !whole(tok[1], v)) {
                err("malformed '" + kw + "' line");
                continue;
            }
            if (kw == "dim") {
                if (v < 2 || v > 3) err("dim must be 2 or 3");
                sc.dim = static_cast<int>(v);
                seen_dim = true;
            } else if (kw == "degree") {
                if (v < 0 || v > 8) err("degree must be in 0..8");
                sc.degree = static_cast<int>(v);
            } else {
                if (v < 1) err("k must be at least 1");
                sc.k = static_cast<int>(v);
            }
        } else if (kw == "theta" || kw == "epsilon") {
            std::optional<Rational> v;
            if (tok.size() == 2) v = parse_number(tok[1]);
            if (!v || sgn(*v) <= 0) {
                err("malformed '" + kw + "' line (need a positive number)");
                continue;
            }
            (kw == "theta" ? sc.theta : sc.epsilon) = *v;
        } else if (kw == "time") {
            std::optional<Rational> a, b;
            if (tok.size() == 3) {
                a = parse_number(tok[1]);
                b = parse_number(tok[2]);
            }
            if (!a || !b || *b < *a) {
                err("malformed 'time' line (need t0 <= t_end)");
                continue;
            }
            sc.t0 = *a;
            sc.t_end = *b;
            seen_time = true;
        } else if (kw == "point") {
            long id = 0;
            if (tok.size() < 3 || !whole(tok[1], id)) {
                err("malformed 'point' line");
                continue;
            }
            std::vector<Polynomial> coords;
            std::vector<Rational> cur;
            bool ok = true;
            for (std::size_t i = 2; i <= tok.size(); ++i) {
                if (i == tok.size() || tok[i] == ";") {
                    if (cur.empty()) ok = false;
                    coords.emplace_back(cur);
                    cur.clear();
                    continue;
                }
                auto v = parse_number(tok[i]);
                if (!v) {
                    ok = false;
                    break;
                }
                cur.push_back(*v);
            }
            if (!ok) {
                err("malformed coefficients for point " + std::to_string(id));
                continue;
            }
            if (points.count(id)) {
                err("duplicate point id " + std::to_string(id) + " (first on line " +
                    std::to_string(points[id].first) + ")");
                continue;
            }
            points[id] = {lineno, std::move(coords)};
        } else if (kw == "query") {
            long k = 0;
            std::optional<Rational> t;
            if (tok.size() >= 4 && tok[1] == "rknn") t = parse_number(tok[2]);
            if (!t || !whole(tok[3], k) || k < 1) {
                err("malformed 'query' line");
                continue;
            }
            RkNNQuery q{*t, static_cast<int>(k), {}};
            bool ok = true;
            for (std::size_t i = 4; i < tok.size(); ++i) {
                auto v = parse_number(tok[i]);
                if (!v) ok = false;
                else q.q.push_back(*v);
            }
            if (!ok) {
                err("malformed query coordinates");
                continue;
            }
            queries.push_back({lineno, std::move(q)});
        } else {
            err("unknown keyword '" + kw + "'");
        }
    }
    if (!seen_magic && errors.empty()) errors.push_back({0, "empty scenario"});
    if (seen_magic && !seen_dim) errors.push_back({0, "missing 'dim' line"});
    if (seen_magic && !seen_time) errors.push_back({0, "missing 'time' line"});
    if (sc.theta && sc.epsilon) errors.push_back({0, "give either theta or epsilon, not both"});
    for (auto& [id, entry] : points) {
        auto& [line, coords] = entry;
        if (static_cast<int>(coords.size()) != sc.dim) {
            errors.push_back({line, "point " + std::to_string(id) + " has " + std::to_string(coords.size()) +
                                        " coordinates, expected " + std::to_string(sc.dim)});
            continue;
        }
        int deg = 0;
        for (const auto& c : coords) deg = std::max(deg, c.degree());
        if (deg > sc.degree) {
            errors.push_back({line, "point " + std::to_string(id) + " has degree " + std::to_string(deg) +
                                        " above the declared " + std::to_string(sc.degree)});
            continue;
        }
        sc.ids.push_back(id);
        sc.points.push_back(Trajectory{static_cast<int>(sc.points.size()), std::move(coords)});
    }
    for (auto& pq : queries) {
        if (static_cast<int>(pq.q.q.size()) != sc.dim) {
            errors.push_back({pq.line, "query needs " + std::to_string(sc.dim) + " coordinates"});
            continue;
        }
        if (pq.q.k > sc.k) {
            errors.push_back({pq.line, "query k exceeds the scenario k"});
            continue;
        }
        if (pq.q.t < sc.t0 || pq.q.t > sc.t_end) {
            errors.push_back({pq.line, "query time outside [t0, t_end]"});
            continue;
        }
        sc.queries.push_back(std::move(pq.q));
    }
    if (!errors.empty()) throw ScenarioError(std::move(errors));
    std::stable_sort(sc.queries.begin(), sc.queries.end(),
                     [](const RkNNQuery& a, const RkNNQuery& b) { return a.t < b.t; });
    return sc;
}

inline std::string serialize_scenario(const Scenario& sc) {
    std::ostringstream out;
    out << "ksyg-scenario v1\n";
    out << "dim " << sc.dim << "\ndegree " << sc.degree << "\nk " << sc.k << "\n";
    if (sc.theta) out << "theta " << exact_text(*sc.theta) << "\n";
    if (sc.epsilon) out << "epsilon " << exact_text(*sc.epsilon) << "\n";
    out << "time " << exact_text(sc.t0) << " " << exact_text(sc.t_end) << "\n";
    for (int i = 0; i < sc.n(); ++i) {
        out << "point " << sc.ids[i];
        for (int c = 0; c < sc.dim; ++c) {
            if (c > 0) out << " ;";
            const Polynomial& p = sc.points[i].coords[c];
            if (p.is_zero()) out << " 0";
            for (int j = 0; j <= p.degree(); ++j) out << " " << exact_text(p.coeff(j));
        }
        out << "\n";
    }
    for (const auto& q : sc.queries) {
        out << "query rknn " << exact_text(q.t) << " " << q.k;
        for (const auto& v : q.q) out << " " << exact_text(v);
        out << "\n";
    }
    return out.str();
}

/// Seeded random scenario: positions, velocities and accelerations uniform in
/// [-1, 1] on a 2^-20 grid; `queries` timed RkNN queries uniform in time and
/// space.
template <class Rng>
Scenario random_scenario(Rng& rng, int n, int dim, int degree, int k, const Rational& t_end, int queries = 0) {
    auto grid = [&]() {
        long v = static_cast<long>(rng() % ((1UL << 21) + 1)) - (1L << 20);
        Rational r(v, 1L << 20);
        r.canonicalize();
        return r;
    };
    Scenario sc;
    sc.dim = dim;
    sc.degree = degree;
    sc.k = k;
    sc.t0 = 0;
    sc.t_end = t_end;
    for (int p = 0; p < n; ++p) {
        Trajectory tr;
        tr.id = p;
        for (int i = 0; i < dim; ++i) {
            std::vector<Rational> c;
            for (int j = 0; j <= degree; ++j) c.push_back(grid());
            tr.coords.emplace_back(c);
        }
        sc.ids.push_back(p);
        sc.points.push_back(std::move(tr));
    }
    for (int j = 0; j < queries; ++j) {
        RkNNQuery q;
        Rational u = grid();
        q.t = (u + 1) / 2 * t_end;
        q.k = k;
        for (int i = 0; i < dim; ++i) q.q.push_back(grid());
        sc.queries.push_back(std::move(q));
    }
    std::stable_sort(sc.queries.begin(), sc.queries.end(),
                     [](const RkNNQuery& a, const RkNNQuery& b) { return a.t < b.t; });
    return sc;
}

}  // namespace ksyg
