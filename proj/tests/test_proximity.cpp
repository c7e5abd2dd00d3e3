#include <gtest/gtest.h>

#include <numbers>

#include "kinetic_fixture.hpp"
#include "ksyg/all_knn.hpp"
#include "ksyg/approx_nn.hpp"
#include "ksyg/oracle.hpp"
#include "ksyg/rknn.hpp"
#include "rbrt_checks.hpp"

using namespace ksyg;
using ksyg::checks::positions;
using ksyg::checks::random_trajectories;

namespace {

constexpr double kPi = std::numbers::pi;

Point pt(long x, long y) { return {Rational(x), Rational(y)}; }

std::vector<int> kth_of(const std::vector<std::vector<int>>& knn) {
    std::vector<int> out;
    for (const auto& v : knn) out.push_back(v.back());
    return out;
}

Point random_point(std::mt19937_64& rng, int d) {
    std::uniform_int_distribution<long> u(-(1L << 20), 1L << 20);
    Point q;
    for (int i = 0; i < d; ++i) {
        Rational r(u(rng), 1L << 20);
        r.canonicalize();
        q.push_back(r);
    }
    return q;
}

/// |p qhat| <= (1 + eps) |p q*| over every point, squared and exact.
int approx_violations(const std::vector<Point>& pts, const ApproxNN& a, std::string* first = nullptr) {
    Rational f = 1 + Rational(a.epsilon());
    f *= f;
    auto nn = oracle_nn_distance_sq(pts);
    int bad = 0;
    for (int p = 0; p < a.n(); ++p) {
        int qh = a.approx_nn(p);
        if (qh < 0 || qh == p) {
            ++bad;
            continue;
        }
        if (sgn(nn[p]) == 0) continue;
        if (distance_sq(pts[p], pts[qh]) > f * nn[p]) {
            if (first && bad == 0) *first = "p=" + std::to_string(p) + " qhat=" + std::to_string(qh);
            ++bad;
        }
    }
    return bad;
}

Trajectory linear(int id, std::vector<std::pair<Rational, Rational>> c) {
    Trajectory tr;
    tr.id = id;
    for (auto& [a, b] : c) tr.coords.push_back(Polynomial::linear(a, b));
    return tr;
}

/// Drives an ApproxNN alone, checking the guarantee between events.
int drive_approx(EventQueue& q, ApproxNN& a, const std::vector<Trajectory>& traj, const Rational& t_end) {
    int probes = 0;
    while (!q.empty() && q.top().time <= Instant(t_end)) {
        Event ev = q.pop();
        a.handle(ev);
        if (!q.empty() && q.top().time == ev.time) continue;
        Instant next = q.empty() || q.top().time > Instant(t_end) ? Instant(t_end) : q.top().time;
        if (!(ev.time < next)) continue;
        auto pts = positions(traj, rational_between(ev.time, next));
        std::string first;
        EXPECT_EQ(approx_violations(pts, a, &first), 0) << first;
        ++probes;
        if (::testing::Test::HasFailure()) return probes;
    }
    std::string why;
    EXPECT_TRUE(a.consistent(&why)) << why;
    EXPECT_EQ(a.stale(), 0u);
    return probes;
}

}  // namespace

TEST(RkNN, CollinearExample) {
    auto fam = build_cone_family(2, kPi / 3);
    std::vector<Point> pts{pt(0, 0), pt(2, 0), pt(5, 0)};
    RkNNIndex index(fam, pts);
    auto kth = kth_of(oracle_knn(pts, 1));
    auto res = answer_rknn(index, pt(1, 0), 1, kth);
    EXPECT_EQ(res.answer, (std::vector<int>{0, 1}));
    EXPECT_EQ(oracle_rknn(pts, pt(1, 0), 1), res.answer);
}

TEST(RkNN, FarQueryIsEmptyAndCoincidentThrows) {
    auto fam = build_cone_family(2, kPi / 3);
    std::vector<Point> pts{pt(0, 0), pt(2, 0), pt(5, 0)};
    RkNNIndex index(fam, pts);
    auto kth = kth_of(oracle_knn(pts, 1));
    EXPECT_TRUE(answer_rknn(index, pt(100, 100), 1, kth).answer.empty());
    EXPECT_THROW(answer_rknn(index, pt(2, 0), 1, kth), std::invalid_argument);
}

TEST(RkNN, RandomAgainstOracle) {
    std::mt19937_64 rng(79);
    for (int d : {2, 3}) {
        auto fam = build_cone_family(d, kPi / 3);
        for (int k : {1, 3}) {
            for (int rep = 0; rep < 3; ++rep) {
                auto traj = random_trajectories(rng, 40, d, 0);
                auto pts = positions(traj, Rational(0));
                RkNNIndex index(fam, pts);
                auto kth = kth_of(oracle_knn(pts, k));
                for (int j = 0; j < 20; ++j) {
                    Point q = random_point(rng, d);
                    auto res = answer_rknn(index, q, k, kth);
                    auto want = oracle_rknn(pts, q, k);
                    EXPECT_EQ(res.answer, want);
                    EXPECT_LE(static_cast<int>(res.answer.size()), fam.c() * k);
                    EXPECT_TRUE(std::includes(res.candidates.begin(), res.candidates.end(), want.begin(), want.end()));
                }
            }
        }
    }
}

TEST(RkNN, ConeSelectionMatchesOracle) {
    // K_l(q) for an outside q equals the brute-force selection with q appended as id n.
    std::mt19937_64 rng(83);
    auto fam = build_cone_family(2, kPi / 3);
    auto pts = positions(random_trajectories(rng, 30, 2, 0), Rational(0));
    RkNNIndex index(fam, pts);
    Point q = random_point(rng, 2);
    auto all = pts;
    all.push_back(q);
    for (int l = 0; l < fam.c(); ++l) {
        auto want = oracle_cone_selections(all, 2, fam, l)[30];
        EXPECT_EQ(index.cone_selection(q, l, 2), want) << "l=" << l;
    }
}

TEST(RkNN, QueriesShareTheIndexPerTime) {
    std::mt19937_64 rng(89);
    auto fam = build_cone_family(2, kPi / 3);
    auto traj = random_trajectories(rng, 10, 2, 1);
    RkNNQueries cache(fam);
    cache.at(traj, Rational(1, 2));
    cache.at(traj, Rational(1, 2));
    EXPECT_EQ(cache.builds(), 1);
    cache.at(traj, Rational(1));
    EXPECT_EQ(cache.builds(), 2);
}

TEST(AllKNN, CollinearWinnersAndClosestPair) {
    auto fam = build_cone_family(2, kPi / 3);
    std::vector<Trajectory> traj;
    for (long x : {0L, 1L, 3L}) traj.push_back(stationary(static_cast<int>(traj.size()), pt(x, 0)));
    EventQueue q;
    KineticKSYG eng(q, fam, traj, 1);
    AllKNN knn(q, traj, eng.graph(), eng.coord_end());
    EXPECT_EQ(knn.neighbors(0), std::vector<int>{1});
    EXPECT_EQ(knn.neighbors(1), std::vector<int>{0});
    EXPECT_EQ(knn.neighbors(2), std::vector<int>{1});
    EXPECT_EQ(knn.closest_pair(Instant(0)), (std::pair<int, int>{0, 1}));
}

TEST(AllKNN, CoincidentPairIsClosest) {
    auto fam = build_cone_family(2, kPi / 3);
    std::vector<Trajectory> traj{stationary(0, pt(0, 0)), stationary(1, pt(4, 4)), stationary(2, pt(4, 4))};
    EventQueue q;
    KineticKSYG eng(q, fam, traj, 1);
    AllKNN knn(q, traj, eng.graph(), eng.coord_end());
    auto cp = knn.closest_pair(Instant(0));
    ASSERT_TRUE(cp.has_value());
    EXPECT_EQ(*cp, (std::pair<int, int>{1, 2}));
    EXPECT_EQ(distance_sq(evaluate(traj[1], Rational(0)), evaluate(traj[2], Rational(0))), 0);
}

TEST(AllKNN, RandomStaticMatchesOracle) {
    std::mt19937_64 rng(97);
    auto fam = build_cone_family(2, kPi / 3);
    auto traj = random_trajectories(rng, 64, 2, 0);
    EventQueue q;
    KineticKSYG eng(q, fam, traj, 3);
    AllKNN knn(q, traj, eng.graph(), eng.coord_end());
    auto pts = positions(traj, Rational(0));
    auto want = oracle_knn(pts, 3);
    for (int p = 0; p < 64; ++p) EXPECT_EQ(knn.neighbors(p), want[p]);
    EventQueue q1;
    KineticKSYG eng1(q1, fam, traj, 1);
    AllKNN nn(q1, traj, eng1.graph(), eng1.coord_end());
    EXPECT_EQ(nn.closest_pair(Instant(0)), oracle_closest_pair(pts));
}

TEST(ApproxNN, ThetaCalibration) {
    EXPECT_DOUBLE_EQ(approx_theta(0.1), 0.05);
    EXPECT_DOUBLE_EQ(approx_theta(10), kPi / 3);
    EXPECT_THROW(approx_theta(0), std::invalid_argument);
}

TEST(ApproxNN, TwoPoints) {
    auto fam = build_cone_family(2, approx_theta(0.5));
    std::vector<Trajectory> traj{stationary(0, pt(0, 0)), stationary(1, pt(3, 1))};
    EventQueue q;
    ApproxNN a(q, fam, traj, 0.5, 0);
    EXPECT_EQ(a.approx_nn(0), 1);
    EXPECT_EQ(a.approx_nn(1), 0);
    int edges = 0;
    for (int l = 0; l < fam.c(); ++l) edges += static_cast<int>(a.edges(l).size());
    EXPECT_EQ(edges, 2);  // one pair per direction: cone l and its opposite
}

TEST(ApproxNN, SinglePointHasNoNeighbour) {
    auto fam = build_cone_family(2, approx_theta(0.5));
    std::vector<Trajectory> traj{stationary(0, pt(0, 0))};
    EventQueue q;
    ApproxNN a(q, fam, traj, 0.5, 0);
    EXPECT_EQ(a.approx_nn(0), -1);
}

TEST(ApproxNN, CollinearWithinFactor) {
    auto fam = build_cone_family(2, approx_theta(0.5));
    std::vector<Trajectory> traj;
    for (long x : {0L, 1L, 3L, 4L, 9L, 10L, 12L}) traj.push_back(stationary(static_cast<int>(traj.size()), pt(x, 0)));
    EventQueue q;
    ApproxNN a(q, fam, traj, 0.5, 0);
    EXPECT_EQ(approx_violations(positions(traj, Rational(0)), a), 0);
}

TEST(ApproxNN, StaticRandomGuaranteeAndBounds) {
    std::mt19937_64 rng(101);
    for (double eps : {0.1, 0.5}) {
        auto fam = build_cone_family(2, approx_theta(eps));
        auto traj = random_trajectories(rng, 64, 2, 0);
        EventQueue q;
        ApproxNN a(q, fam, traj, eps, 0);
        std::string first;
        EXPECT_EQ(approx_violations(positions(traj, Rational(0)), a, &first), 0) << first;
        const int L = a.frame(0).tree().levels() + 1;
        for (int l = 0; l < fam.c(); ++l) {
            EXPECT_LE(static_cast<int>(a.edges(l).size()), 64 * L);  // n (log n + 1)^{d-1}
            for (int w = 0; w < 64; ++w) EXPECT_LE(a.degree(w, l), L * L);
        }
        std::string why;
        EXPECT_TRUE(a.consistent(&why)) << why;
    }
}

TEST(ApproxNN, CrossingRowsKeepGuarantee) {
    // Two rows of points sliding past each other in opposite directions.
    auto fam = build_cone_family(2, approx_theta(0.1));
    std::vector<Trajectory> traj;
    for (int j = 0; j < 5; ++j) {
        traj.push_back(linear(static_cast<int>(traj.size()), {{Rational(j * 2), Rational(1)}, {Rational(0), Rational(0)}}));
        traj.push_back(
            linear(static_cast<int>(traj.size()), {{Rational(j * 2 + 9, 2), Rational(-1)}, {Rational(1, 3), Rational(0)}}));
    }
    EventQueue q;
    ApproxNN a(q, fam, traj, 0.1, 0);
    EXPECT_GT(drive_approx(q, a, traj, Rational(12)), 10);
}

TEST(ApproxNN, RandomLinearKeepsGuarantee) {
    std::mt19937_64 rng(103);
    for (double eps : {0.1, 0.5}) {
        auto fam = build_cone_family(2, approx_theta(eps));
        auto traj = random_trajectories(rng, 12, 2, 1);
        EventQueue q;
        ApproxNN a(q, fam, traj, eps, 0);
        EXPECT_GT(drive_approx(q, a, traj, Rational(5)), 50);
    }
}
