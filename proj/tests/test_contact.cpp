#include <map>

#include <gtest/gtest.h>

#include "support.hpp"
#include "sweptvol/contact.hpp"

using namespace sweptvol;
using namespace sweptvol::test;

namespace {

RigidMotion translate(double a, double b, Vec3 const& from, Vec3 const& to)
{
    return RigidMotion(a, b,
                       {PiecewisePoly::linear(a, b, from[0], to[0]),
                        PiecewisePoly::linear(a, b, from[1], to[1]),
                        PiecewisePoly::linear(a, b, from[2], to[2])},
                       {PiecewisePoly::constant(a, b, 0), PiecewisePoly::constant(a, b, 0),
                        PiecewisePoly::constant(a, b, 0)});
}

bool covered(std::vector<TimeInterval> const& ivs, double t)
{
    return std::any_of(ivs.begin(), ivs.end(), [&](TimeInterval const& iv) { return iv.contains(t); });
}

bool contains_all(std::vector<TimeInterval> const& outer, std::vector<TimeInterval> const& inner)
{
    for (auto const& i : inner)
    {
        bool in = std::any_of(outer.begin(), outer.end(), [&](TimeInterval const& o) {
            return o.t0 <= i.t0 && i.t1 <= o.t1;
        });
        if (!in)
            return false;
    }
    return true;
}

}  // namespace

TEST(MergeIntervals, SortsAndMergesWithinGap)
{
    auto m = merge_intervals({{0.5, 0.6}, {0.0, 0.1}, {0.1 + 1e-8, 0.2}, {0.3, 0.4}}, 2e-8);
    ASSERT_EQ(m.size(), 3u);
    EXPECT_EQ(m[0].t0, 0.0);
    EXPECT_EQ(m[0].t1, 0.2);
    EXPECT_EQ(m[2].t1, 0.6);
}

TEST(SphereBox, TwentySixCases)
{
    Box3 box(Vec3::Zero(), Vec3::Ones());
    std::map<BoxFeature, int> count;
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j)
            for (int k = -1; k <= 1; ++k)
            {
                Vec3 p(0.5 + 1.5 * i, 0.5 + 1.5 * j, 0.5 + 1.5 * k);
                auto c = classify_sphere_box(p, box);
                ++count[c.feature];
                EXPECT_EQ(c.sigma, (std::array<int, 3>{i, j, k}));
                EXPECT_NEAR(c.distance, i || j || k ? box.distance(p) : -0.5, 1e-15);
            }
    EXPECT_EQ(count[BoxFeature::Inside], 1);
    EXPECT_EQ(count[BoxFeature::Face], 6);
    EXPECT_EQ(count[BoxFeature::Edge], 12);
    EXPECT_EQ(count[BoxFeature::Vertex], 8);
}

TEST(SphereBox, FastGapNeverExceedsExact)
{
    Rng rng(51);
    Box3 box(Vec3(-1, 0, 0.5), Vec3(1, 2, 1));
    for (int i = 0; i < 2000; ++i)
    {
        Vec3 p = uniform_in(rng, Box3(Vec3::Constant(-4), Vec3::Constant(4)));
        EXPECT_LE(sphere_box_gap(p, 0.5, box, true), sphere_box_gap(p, 0.5, box, false) + 1e-15);
    }
}

TEST(SolveContactSet, LinearFunction)
{
    // g(t) = |t - 0.5| - 0.2, Lipschitz 1.
    auto ivs = solve_contact_set([](double t) { return std::abs(t - 0.5) - 0.2; },
                                 [](double, double) { return 1.0; }, 0, 1, 1e-9, 0.1);
    ASSERT_EQ(ivs.size(), 1u);
    EXPECT_NEAR(ivs[0].t0, 0.3, 1e-9);
    EXPECT_NEAR(ivs[0].t1, 0.7, 1e-9);
    auto point = solve_contact_set([](double t) { return t; }, [](double, double) { return 1.0; },
                                   0, 0, 1e-9);
    ASSERT_EQ(point.size(), 1u);
    EXPECT_THROW(solve_contact_set([](double t) { return t; }, [](double, double) { return 1.0; },
                                   0, 1, 0),
                 InvalidInput);
}

TEST(ContactSphere, StaticOverlapIsWholeDomain)
{
    auto m = RigidMotion::constant(0, 2, Vec3(0.2, 0, 0));
    auto ivs = contact_intervals_sphere(Ball3(Vec3::Zero(), 0.5), m, Box3(Vec3::Zero(), Vec3::Ones()),
                                        ContactOptions{});
    ASSERT_EQ(ivs.size(), 1u);
    EXPECT_EQ(ivs[0].t0, 0.0);
    EXPECT_EQ(ivs[0].t1, 2.0);
}

TEST(ContactSphere, AnalyticChordTimes)
{
    Rng rng(52);
    Box3 box(Vec3::Zero(), Vec3::Ones());
    for (int trial = 0; trial < 50; ++trial)
    {
        // Centre (t - 3, 1 + d, 0.5) passes the face y = 1 at distance d.
        double d = uniform(rng, 0, 0.95);
        double s = std::sqrt(1 - d * d);
        auto m = translate(0, 8, Vec3(-3, 1 + d, 0.5), Vec3(5, 1 + d, 0.5));
        for (bool fast : {false, true})
        {
            ContactOptions opt;
            opt.fast = fast;
            auto ivs = contact_intervals_sphere(Ball3(Vec3::Zero(), 1.0), m, box, opt);
            if (fast)
            {
                EXPECT_FALSE(ivs.empty());
                continue;
            }
            ASSERT_EQ(ivs.size(), 1u);
            EXPECT_NEAR(ivs[0].t0, 3 - s, 1e-6);
            EXPECT_NEAR(ivs[0].t1, 4 + s, 1e-6);
        }
    }
}

TEST(ContactSphere, CornerClearanceIsEmpty)
{
    Box3 box(Vec3::Zero(), Vec3::Ones());
    // Path along the diagonal plane misses the corner (1, 1, 1) by 1.2.
    Vec3 dir = Vec3(1, -1, 0).normalized();
    Vec3 off = Vec3(1, 1, 1) + 2.2 * Vec3(1, 1, 0).normalized();
    auto m = translate(0, 1, off - 5 * dir, off + 5 * dir);
    Ball3 ball(Vec3::Zero(), 1.0);
    double closest = 1e300;
    for (int k = 0; k <= 100000; ++k)
        closest = std::min(closest, box.distance(m.apply(k / 1e5, Vec3::Zero())));
    ASSERT_GT(closest, 1.0);
    EXPECT_TRUE(contact_intervals_sphere(ball, m, box, ContactOptions{}).empty());
}

TEST(ContactSphere, NeverMissesDenseSamples)
{
    Rng rng(53);
    for (int trial = 0; trial < 40; ++trial)
    {
        auto m = random_motion(rng, 3, 4);
        Ball3 ball(Vec3(uniform(rng, -1, 1), uniform(rng, -1, 1), 0), uniform(rng, 0.2, 0.8));
        Vec3 lo = uniform_in(rng, Box3(Vec3::Constant(-2), Vec3::Constant(2)));
        Box3 box(lo, lo + Vec3::Constant(uniform(rng, 0.2, 1.0)));
        auto ivs = contact_intervals_sphere(ball, m, box, ContactOptions{});
        for (int k = 0; k <= 20000; ++k)
        {
            double t = k / 20000.0;
            if (box.distance(m.apply(t, ball.centre)) <= ball.radius)
                EXPECT_TRUE(covered(ivs, t)) << trial << " t=" << t;
        }
    }
}

TEST(ContactSphere, FastContainsExact)
{
    Rng rng(54);
    for (int trial = 0; trial < 100; ++trial)
    {
        auto m = random_motion(rng, 3, 4);
        Ball3 ball(Vec3(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)),
                   uniform(rng, 0.1, 0.8));
        Vec3 lo = uniform_in(rng, Box3(Vec3::Constant(-2), Vec3::Constant(2)));
        Box3 box(lo, lo + Vec3(uniform(rng, 0.1, 1), uniform(rng, 0.1, 1), uniform(rng, 0.1, 1)));
        ContactOptions exact, fast;
        fast.fast = true;
        auto e = contact_intervals_sphere(ball, m, box, exact);
        auto f = contact_intervals_sphere(ball, m, box, fast);
        EXPECT_TRUE(contains_all(f, e)) << trial;
    }
}

//---------------------------------------------------------------------------//

TEST(BoxBoxGap, SeparationMatchesAlignedDistance)
{
    Box3 a(Vec3::Zero(), Vec3::Ones());
    Box3 b(Vec3(3, 0, 0), Vec3(4, 1, 1));
    EXPECT_NEAR(box_box_gap(a, Isometry{}, b), 2.0, 1e-12);
    EXPECT_LE(box_box_gap(a, Isometry{}, Box3(Vec3(0.5, 0.5, 0.5), Vec3(2, 2, 2))), 0.0);
}

TEST(BoxBoxGap, SignMatchesSampledOverlap)
{
    Rng rng(55);
    for (int trial = 0; trial < 300; ++trial)
    {
        Box3 area(Vec3::Constant(-0.5), Vec3::Constant(0.5));
        Isometry iso{random_rotation(rng), Vec3(uniform(rng, -1.5, 1.5), uniform(rng, -1.5, 1.5),
                                                uniform(rng, -1.5, 1.5))};
        Box3 cell(Vec3::Constant(-0.4), Vec3(0.4, 0.3, 0.2));
        double gap = box_box_gap(area, iso, cell);
        // Sample the cell, pull back, test against the area.
        bool hit = false;
        for (int k = 0; k < 4000 && !hit; ++k)
            hit = area.contains(iso.apply_inverse(uniform_in(rng, cell)));
        if (hit)
            EXPECT_LE(gap, 0.0);
        if (gap > 0)
            EXPECT_FALSE(hit);
    }
}

TEST(ContactBox, StaticOverlapIsWholeDomain)
{
    auto ivs = contact_intervals_box(Box3(Vec3::Zero(), Vec3::Ones()), RigidMotion::identity(0, 3),
                                     Box3(Vec3::Constant(0.5), Vec3::Constant(2)), ContactOptions{});
    ASSERT_EQ(ivs.size(), 1u);
    EXPECT_EQ(ivs[0].t0, 0.0);
    EXPECT_EQ(ivs[0].t1, 3.0);
}

TEST(ContactBox, RotatingCubeTouchesMidRotation)
{
    RigidMotion m(0, 1,
                  {PiecewisePoly::constant(0, 1, 0), PiecewisePoly::constant(0, 1, 0),
                   PiecewisePoly::constant(0, 1, 0)},
                  {PiecewisePoly::constant(0, 1, 0),
                   PiecewisePoly::linear(0, 1, 0, std::numbers::pi / 2),
                   PiecewisePoly::constant(0, 1, 0)});
    Box3 area(Vec3::Constant(-0.5), Vec3::Constant(0.5));
    Box3 cell(Vec3(0.6, -0.5, -0.5), Vec3(1.6, 0.5, 0.5));
    // Reach along x is (|cos b| + |sin b|) / 2; touching once it reaches 0.6.
    double half = std::acos(0.6 * std::sqrt(2.0)) / (std::numbers::pi / 2);
    auto ivs = contact_intervals_box(area, m, cell, ContactOptions{});
    ASSERT_EQ(ivs.size(), 1u);
    EXPECT_NEAR(ivs[0].t0, 0.5 - half, 1e-6);
    EXPECT_NEAR(ivs[0].t1, 0.5 + half, 1e-6);
    EXPECT_TRUE(ivs[0].contains(0.5));
}

TEST(ContactBox, FarBoxesUnderCapsuleMotion)
{
    auto [base, m] = capsule_example();
    Box3 area(Vec3::Constant(-1), Vec3::Constant(1));
    Box3 far(Vec3(20, 20, 20), Vec3(21, 21, 21));
    EXPECT_TRUE(contact_intervals_box(area, m, far, ContactOptions{}).empty());
}

TEST(ContactBox, NeverMissesDenseSamples)
{
    Rng rng(56);
    for (int trial = 0; trial < 20; ++trial)
    {
        auto m = random_motion(rng, 2, 3);
        Box3 area(Vec3(-0.5, -0.3, -0.2), Vec3(0.4, 0.3, 0.6));
        Vec3 lo = uniform_in(rng, Box3(Vec3::Constant(-2), Vec3::Constant(2)));
        Box3 cell(lo, lo + Vec3::Constant(0.5));
        auto ivs = contact_intervals_box(area, m, cell, ContactOptions{});
        for (int k = 0; k <= 5000; ++k)
        {
            double t = k / 5000.0;
            if (box_box_gap(area, m.at(t), cell) <= 0)
                EXPECT_TRUE(covered(ivs, t)) << trial << " t=" << t;
        }
    }
}
