#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ksyg/cone_family.hpp"

using namespace ksyg;

namespace {

constexpr double kPi = std::numbers::pi;

Point pt(std::initializer_list<long> xs) {
    Point p;
    for (long x : xs) p.emplace_back(x);
    return p;
}

Point random_point(std::mt19937_64& rng, int d, int range = 1000) {
    std::uniform_int_distribution<long> u(-range, range);
    Point p;
    for (int i = 0; i < d; ++i) p.emplace_back(u(rng));
    return p;
}

std::vector<double> random_direction(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> g;
    std::vector<double> v(d);
    double n = 0;
    for (auto& x : v) {
        x = g(rng);
        n += x * x;
    }
    for (auto& x : v) x /= std::sqrt(n);
    return v;
}

}  // namespace

TEST(ConeFamily, PlanarLayoutExamples) {
    auto f = build_cone_family(2, kPi / 2);
    ASSERT_EQ(f.c(), 4);
    for (int l = 0; l < 4; ++l) {
        double mid = l * kPi / 2;
        EXPECT_NEAR(f.cones[l].axis[0], std::cos(mid), 1e-12);
        EXPECT_NEAR(f.cones[l].axis[1], std::sin(mid), 1e-12);
        EXPECT_NEAR(f.cones[l].opening_angle, kPi / 2, 1e-12);
    }
    EXPECT_EQ(build_cone_family(2, kPi / 3).c(), 6);
    EXPECT_THROW(build_cone_family(1, 1.0), std::invalid_argument);
    EXPECT_THROW(build_cone_family(2, 0.0), std::invalid_argument);
    EXPECT_THROW(build_cone_family(2, -1.0), std::invalid_argument);
    EXPECT_TRUE(build_cone_family(2, kPi / 2).wider_than_pi_over_3);
    EXPECT_FALSE(build_cone_family(2, kPi / 3).wider_than_pi_over_3);
}

TEST(ConeFamily, ClippedLastCone) {
    auto f = build_cone_family(2, 1.0);
    ASSERT_EQ(f.c(), 7);
    EXPECT_LT(f.cones[6].opening_angle, 1.0);
    EXPECT_NEAR(f.cones[6].opening_angle, 2 * kPi - 6.0, 1e-12);
}

TEST(ConeFamily, LocateExamples) {
    auto f = build_cone_family(2, kPi / 2);
    EXPECT_EQ(locate_cone(f, pt({0, 0}), pt({1, 0})), 0);
    EXPECT_EQ(locate_cone(f, pt({0, 0}), pt({0, 3})), 1);
    EXPECT_EQ(locate_cone(f, pt({0, 0}), pt({1, 1})), 1);
    // The other three diagonals follow the same half-open rule.
    EXPECT_EQ(locate_cone(f, pt({0, 0}), pt({-1, 1})), 2);
    EXPECT_EQ(locate_cone(f, pt({0, 0}), pt({-1, -1})), 3);
    EXPECT_EQ(locate_cone(f, pt({0, 0}), pt({1, -1})), 0);
    EXPECT_THROW(locate_cone(f, pt({2, 2}), pt({2, 2})), std::invalid_argument);
}

TEST(ConeFamily, AxisAndFrameCoordinates) {
    auto f = build_cone_family(2, kPi / 2);
    EXPECT_DOUBLE_EQ(axis_coordinate(f, 0, {2, 0}), 2);
    EXPECT_DOUBLE_EQ(axis_coordinate(f, 1, {2, 5}), 5);
    EXPECT_DOUBLE_EQ(axis_coordinate(f, 0, {0, 7}), 0);
    // q=(1,0) against p=(0,0) in cone 0: every frame coordinate grows.
    for (int i = 1; i <= 2; ++i) EXPECT_GE(frame_coordinate(f, 0, i, {1, 0}), frame_coordinate(f, 0, i, {0, 0}));
    bool all = true;
    for (int i = 1; i <= 2; ++i) all = all && frame_coordinate(f, 0, i, {0, 1}) >= frame_coordinate(f, 0, i, {0, 0});
    EXPECT_FALSE(all);
    EXPECT_THROW(frame_coordinate(f, 0, 0, {0, 0}), std::out_of_range);
    EXPECT_THROW(frame_coordinate(f, 0, 3, {0, 0}), std::out_of_range);
}

TEST(ConeFamily, FrameInequalitiesMatchLocate) {
    std::mt19937_64 rng(3);
    for (int d : {2, 3}) {
        auto f = build_cone_family(d, kPi / 3);
        for (int it = 0; it < 1000; ++it) {
            Point p = random_point(rng, d), q = random_point(rng, d);
            if (p == q) continue;
            int l = locate_cone(f, p, q);
            std::vector<double> pd, qd;
            for (int i = 0; i < d; ++i) {
                pd.push_back(to_double(p[i]));
                qd.push_back(to_double(q[i]));
            }
            for (int m = 0; m < f.c(); ++m) {
                bool frames = true;
                for (int i = 1; i <= d; ++i)
                    frames = frames && frame_coordinate(f, m, i, qd) >= frame_coordinate(f, m, i, pd) - 1e-9;
                if (m == l) {
                    EXPECT_TRUE(frames);
                }
                bool strict = true;
                for (int i = 1; i <= d; ++i)
                    strict = strict && frame_coordinate(f, m, i, qd) > frame_coordinate(f, m, i, pd) + 1e-6;
                if (strict) {
                    EXPECT_EQ(m, l);
                }
            }
        }
    }
}

TEST(ConeFamily, PartitionOfDirections) {
    std::mt19937_64 rng(17);
    for (int d : {2, 3}) {
        auto f = build_cone_family(d, kPi / 3);
        Point origin(d, Rational(0));
        for (int it = 0; it < 10000; ++it) {
            // Small integer directions hit shared boundaries often.
            Point q = random_point(rng, d, it % 2 ? 3 : 1000);
            if (q == origin) continue;
            int members = 0;
            for (int l = 0; l < f.c(); ++l) members += in_cone(f, l, origin, 0, q, 1);
            ASSERT_EQ(members, 1);
        }
    }
}

TEST(ConeFamily, CoincidentPointsArePartitionedById) {
    for (int d : {2, 3}) {
        auto f = build_cone_family(d, kPi / 3);
        Point p = pt({1, 2, 3});
        p.resize(d);
        int forward = 0, backward = 0;
        for (int l = 0; l < f.c(); ++l) {
            forward += in_cone(f, l, p, 4, p, 9);
            backward += in_cone(f, l, p, 9, p, 4);
        }
        EXPECT_EQ(forward, 1);
        EXPECT_EQ(backward, 1);
    }
}

TEST(ConeFamily, Duality) {
    std::mt19937_64 rng(23);
    for (int d : {2, 3}) {
        auto f = build_cone_family(d, kPi / 3);
        for (int it = 0; it < 1000; ++it) {
            Point p = random_point(rng, d, 4), q = random_point(rng, d, 4);
            for (int l = 0; l < f.c(); ++l) {
                bool fwd = in_cone(f, l, p, 0, q, 1);
                EXPECT_EQ(fwd, in_reflected_cone(f, l, q, 1, p, 0));
                // The reflected cone of q is C_l mirrored: p - q lies in -C_l.
                Point mirrored(d);
                for (int i = 0; i < d; ++i) mirrored[i] = 2 * q[i] - p[i];
                if (p != q) {
                    EXPECT_EQ(fwd, in_cone(f, l, q, 1, mirrored, 0)) << "l=" << l;
                }
            }
        }
    }
}

TEST(ConeFamily, AxisInsideAndUnitNormals) {
    for (int d : {2, 3, 4}) {
        auto f = build_cone_family(d, kPi / 3);
        for (const auto& cone : f.cones) {
            for (int i = 0; i < d; ++i) {
                double n = 0;
                for (double x : cone.normals[i]) n += x * x;
                EXPECT_NEAR(n, 1.0, 1e-12);
                EXPECT_GT(detail::dotq(cone.exact_normals[i], cone.exact_axis), 0);
            }
            EXPECT_LE(cone.opening_angle, f.theta + 1e-12);
        }
    }
}

TEST(ConeFamily, SampledAngleBound) {
    std::mt19937_64 rng(29);
    for (int d : {2, 3}) {
        auto f = build_cone_family(d, kPi / 3);
        std::vector<std::vector<std::vector<double>>> buckets(f.c());
        const std::size_t want = 150;
        std::size_t filled = 0;
        while (filled < buckets.size()) {
            auto v = random_direction(rng, d);
            for (int l = 0; l < f.c(); ++l) {
                bool in = true;
                for (const auto& u : f.cones[l].normals) in = in && detail::dotd(u, v) >= 0;
                if (!in) continue;
                if (buckets[l].size() < want && buckets[l].size() + 1 == want) ++filled;
                if (buckets[l].size() < want) buckets[l].push_back(v);
                break;
            }
        }
        double worst = 0;
        for (const auto& b : buckets)
            for (std::size_t i = 0; i < b.size(); ++i)
                for (std::size_t j = i + 1; j < b.size(); ++j) worst = std::max(worst, detail::angle_between(b[i], b[j]));
        EXPECT_LE(worst, f.theta + 1e-9) << "d=" << d;
    }
}

TEST(ConeFamily, CountBoundAndDeterminism) {
    for (int d : {2, 3}) {
        for (double th : {kPi / 3, 0.5, 0.25}) {
            auto f = build_cone_family(d, th);
            EXPECT_LE(f.c(), cone_count_constant(d) * std::pow(1.0 / th, d - 1));
            auto g = build_cone_family(d, th);
            ASSERT_EQ(f.c(), g.c());
            for (int l = 0; l < f.c(); ++l) {
                EXPECT_EQ(f.cones[l].exact_normals, g.cones[l].exact_normals);
                EXPECT_EQ(f.cones[l].exact_axis, g.cones[l].exact_axis);
                EXPECT_EQ(f.cones[l].normals, g.cones[l].normals);
                EXPECT_EQ(f.cones[l].frame_tie_sign, g.cones[l].frame_tie_sign);
            }
        }
    }
    EXPECT_EQ(build_cone_family(3, kPi / 3).c(), 108);
}
