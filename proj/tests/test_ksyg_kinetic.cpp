#include <gtest/gtest.h>

#include <numbers>

#include "kinetic_fixture.hpp"
#include "ksyg/all_knn.hpp"
#include "ksyg/oracle.hpp"
#include "rbrt_checks.hpp"

using namespace ksyg;
using ksyg::checks::positions;
using ksyg::checks::random_trajectories;

namespace {

constexpr double kPi = std::numbers::pi;

struct Run {
    int events = 0;
    int checks = 0;
    std::vector<GraphDelta> deltas;
};

/// Drives the engine to t_end, checking cone l of each event against the
/// oracle just after the event's instant, and everything at the end.
Run drive(EventQueue& q, KineticKSYG& eng, AllKNN* knn, const std::vector<Trajectory>& traj, const Rational& t_end,
          bool check_rbrt = false) {
    Run run;
    const auto& fam = eng.family();
    while (!q.empty() && q.top().time <= Instant(t_end)) {
        Event ev = q.pop();
        ++run.events;
        int l = -1;
        if (eng.owns(ev.coord)) {
            l = eng.cone_of(ev.coord);
            auto delta = eng.handle(ev);
            if (knn) knn->apply(delta);
            for (const auto& c : delta.changes) EXPECT_TRUE(c.p == ev.a || c.p == ev.b || ev.coord % (fam.dim + 1) == fam.dim);
            run.deltas.push_back(std::move(delta));
        } else if (knn && knn->owns(ev.coord)) {
            knn->handle(ev);
        }
        if (!q.empty() && q.top().time == ev.time) continue;
        Instant next = q.empty() || q.top().time > Instant(t_end) ? Instant(t_end) : q.top().time;
        if (!(ev.time < next)) continue;
        Rational t = rational_between(ev.time, next);
        auto pts = positions(traj, t);
        ++run.checks;
        if (l >= 0) {
            auto want = oracle_cone_selections(pts, eng.k(), fam, l);
            KSYGraph got = eng.graph();
            for (int p = 0; p < eng.n(); ++p)
                EXPECT_EQ(got.sel[p][l], want[p]) << "p=" << p << " l=" << l << " t=" << t.get_str();
            if (check_rbrt) {
                const auto& tree = eng.frame(l).tree();
                auto rep = checks::check_pair_decomposition(tree);
                EXPECT_EQ(rep.violations, 0) << rep.first;
                ConeRanks cr = cone_ranks(fam, l, pts);
                for (int i = 0; i < fam.dim; ++i) EXPECT_EQ(tree.frame_rank(i), cr.frame[i]);
                EXPECT_EQ(tree.xrank(), cr.axis);
            }
        }
        if (knn && eng.k() < eng.n()) {
            auto want = oracle_knn(pts, eng.k());
            for (int p = 0; p < eng.n(); ++p) EXPECT_EQ(knn->neighbors(p), want[p]) << "p=" << p;
        }
        if (::testing::Test::HasFailure()) return run;
    }
    if (!q.empty() && q.top().time <= Instant(t_end)) ADD_FAILURE() << "events left";
    auto pts = positions(traj, t_end);
    EXPECT_EQ(eng.graph(), oracle_ksyg(pts, eng.k(), fam));
    std::string why;
    EXPECT_TRUE(eng.consistent(&why)) << why;
    return run;
}

Trajectory linear(int id, std::vector<std::pair<long, long>> c) {
    Trajectory tr;
    tr.id = id;
    for (auto [a, b] : c) tr.coords.push_back(Polynomial::linear(Rational(a), Rational(b)));
    return tr;
}

}  // namespace

TEST(KineticKSYG, InitMatchesStaticBuild) {
    std::mt19937_64 rng(61);
    for (int d : {2, 3}) {
        auto fam = build_cone_family(d, kPi / 3);
        for (int k : {1, 3}) {
            auto traj = random_trajectories(rng, 20, d, 2);
            EventQueue q;
            KineticKSYG eng(q, fam, traj, k);
            EXPECT_EQ(eng.graph(), build_ksyg(positions(traj, Rational(0)), k, fam));
            std::string why;
            EXPECT_TRUE(eng.consistent(&why)) << why;
        }
    }
}

TEST(KineticKSYG, StationaryHasNoEvents) {
    std::mt19937_64 rng(67);
    auto fam = build_cone_family(2, kPi / 3);
    auto traj = random_trajectories(rng, 12, 2, 0);
    EventQueue q;
    KineticKSYG eng(q, fam, traj, 2);
    EXPECT_TRUE(q.empty());
    auto g = eng.graph();
    drive(q, eng, nullptr, traj, Rational(10));
    EXPECT_EQ(eng.graph(), g);
}

TEST(KineticKSYG, TwoPointsCertificates) {
    auto fam = build_cone_family(2, kPi / 3);
    std::vector<Trajectory> traj{linear(0, {{0, 1}, {0, 0}}), linear(1, {{2, -1}, {0, 0}})};
    EventQueue q;
    KineticKSYG eng(q, fam, traj, 1);
    // One certificate per two-element list: (d + 1) lists per cone.
    EXPECT_EQ(q.scheduled() + q.inert(), static_cast<std::uint64_t>(fam.c() * (fam.dim + 1)));
    drive(q, eng, nullptr, traj, Rational(10));
}

TEST(KineticKSYG, CrossingPointsOnALine) {
    // Two points crossing at t = 1 on the x axis: every ordering that
    // depends on the x coordinate flips exactly once.
    auto fam = build_cone_family(2, kPi / 3);
    std::vector<Trajectory> traj{linear(0, {{0, 1}, {0, 0}}), linear(1, {{2, -1}, {0, 0}})};
    EventQueue q;
    KineticKSYG eng(q, fam, traj, 1);
    int expected = 0;
    for (int l = 0; l < fam.c(); ++l)
        for (int i = 0; i <= fam.dim; ++i) {
            const auto& key = i < fam.dim ? frame_kinetic_key(fam, l, i, traj[0]) : axis_kinetic_key(fam, l, traj[0]);
            expected += key.levels[0].degree() == 1;  // slope is the x weight of the direction
        }
    auto run = drive(q, eng, nullptr, traj, Rational(10));
    EXPECT_EQ(run.events, expected);
    EXPECT_EQ(eng.counts().u_events + eng.counts().x_events, static_cast<std::uint64_t>(expected));
}

TEST(KineticKSYG, RandomLinearAgainstOracle) {
    std::mt19937_64 rng(71);
    for (int k : {1, 2, 5}) {
        auto fam = build_cone_family(2, kPi / 3);
        auto traj = random_trajectories(rng, 24, 2, 1);
        EventQueue q;
        KineticKSYG eng(q, fam, traj, k);
        AllKNN knn(q, traj, eng.graph(), eng.coord_end());
        KSYGraph folded = eng.graph();
        auto run = drive(q, eng, &knn, traj, Rational(10), true);
        EXPECT_GT(run.events, 100);
        for (const auto& d : run.deltas) apply_delta(folded, d);
        EXPECT_TRUE(folded.same_sets(eng.graph()));
        EXPECT_GT(eng.counts().external, 0u);
        EXPECT_GT(eng.counts().internal, 0u);
        EXPECT_EQ(eng.counts().stale, 0u);
    }
}

TEST(KineticKSYG, QuadraticMotionAgainstOracle) {
    std::mt19937_64 rng(73);
    for (int d : {2, 3}) {
        for (int k : {1, 2}) {
            auto fam = build_cone_family(d, kPi / 3);
            auto traj = random_trajectories(rng, d == 2 ? 16 : 8, d, 2);
            EventQueue q;
            KineticKSYG eng(q, fam, traj, k);
            AllKNN knn(q, traj, eng.graph(), eng.coord_end());
            drive(q, eng, &knn, traj, Rational(4), d == 2);
        }
    }
}
