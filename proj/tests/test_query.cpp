#include <gtest/gtest.h>

#include "support.hpp"
#include "sweptvol/query.hpp"

using namespace sweptvol;
using namespace sweptvol::test;

namespace {

LocalImplicitRep single_ball(Vec3 const& c = Vec3::Zero(), double r = 1.0, double inner = 0.6)
{
    LocalImplicitRep rep;
    rep.kind = RepKind::BallCover;
    double rr = inner * r;
    Quadric3 q({1, 1, 1, 0, 0, 0, -2 * c[0], -2 * c[1], -2 * c[2], c.squaredNorm() - rr * rr});
    rep.patches.push_back({Ball3(c, r), q});
    rep.bound = areas_bounding_box(rep.patches);
    return rep;
}

struct Capsule
{
    LocalImplicitRep base;
    RigidMotion motion;
    SweptVolumeRep rep;
};

Capsule const& capsule()
{
    static Capsule const c = [] {
        auto [base, m] = capsule_example();
        auto rep = build_swept_rep(base, m, {});
        return Capsule{base, m, std::move(rep)};
    }();
    return c;
}

//! Brute-force membership: scan n + 1 uniform times.
bool scan_member(LocalImplicitRep const& base, RigidMotion const& m, Vec3 const& p, int n)
{
    RepEvaluator ev(base);
    for (int k = 0; k <= n; ++k)
    {
        double t = m.lower() + (m.upper() - m.lower()) * k / n;
        if (ev.contains(m.inverse_apply(t, p)))
            return true;
    }
    return false;
}

}  // namespace

TEST(QueryConfig, Validation)
{
    QueryConfig c;
    EXPECT_NO_THROW(c.validate());
    c.spatial_resolution = 0;
    EXPECT_THROW(c.validate(), InvalidInput);
    c = {};
    c.march_fraction = -1;
    EXPECT_THROW(c.validate(), InvalidInput);
}

TEST(Membership, CapsuleExamples)
{
    auto const& c = capsule();
    auto mid = point_membership(c.rep, Vec3(0, 8, 0));
    EXPECT_TRUE(mid.inside);
    EXPECT_FALSE(mid.far);
    EXPECT_LE(mid.signed_distance, 0.0);
    ASSERT_TRUE(mid.witness);
    EXPECT_GE(mid.witness->t, 7.0 / 16 - 1e-6);
    EXPECT_LE(mid.witness->t, 9.0 / 16 + 1e-6);

    auto far = point_membership(c.rep, Vec3(100, 100, 100));
    EXPECT_FALSE(far.inside);
    EXPECT_TRUE(far.far);

    auto gap = point_membership(c.rep, Vec3(0, 8, 3));
    EXPECT_FALSE(gap.inside);
    EXPECT_GT(gap.signed_distance, 0.0);
}

TEST(Membership, MatchesTimeScan)
{
    auto const& c = capsule();
    Rng rng(41);
    int disagreements = 0, checked = 0;
    for (int k = 0; k < 300; ++k)
    {
        Vec3 p = uniform_in(rng, c.rep.bound);
        bool expect = scan_member(c.base, c.motion, p, 4000);
        bool got = point_membership(c.rep, p).inside;
        // Scan can only miss thin time windows, so only a scan hit is decisive.
        if (expect)
        {
            ++checked;
            disagreements += !got;
        }
    }
    EXPECT_EQ(disagreements, 0);
    EXPECT_GT(checked, 10);
}

TEST(Membership, IdentityMotionEqualsBase)
{
    Rng rng(42);
    auto base = random_ball_rep(rng, 6);
    auto rep = build_swept_rep(base, RigidMotion::identity(), {});
    RepEvaluator ev(base);
    for (int k = 0; k < 1000; ++k)
    {
        Vec3 p = uniform_in(rng, rep.bound.inflated(0.3));
        EXPECT_EQ(point_membership(rep, p).inside, ev.contains(p)) << p.transpose();
    }
}

TEST(Membership, ConstantMotionEqualsMovedBase)
{
    Rng rng(43);
    auto base = random_ball_rep(rng, 6);
    auto g = RigidMotion::constant(0, 1, Vec3(1, -2, 0.5), Vec3(0.3, -0.7, 1.1));
    auto rep = build_swept_rep(base, g, {});
    RepEvaluator ev(base);
    for (int k = 0; k < 1000; ++k)
    {
        Vec3 p = uniform_in(rng, rep.bound.inflated(0.3));
        EXPECT_EQ(point_membership(rep, p).inside, ev.contains(g.inverse_apply(0.5, p)));
    }
}

TEST(Membership, EarlyExitKeepsVerdict)
{
    auto const& c = capsule();
    QueryConfig full;
    full.early_exit = false;
    Rng rng(44);
    for (int k = 0; k < 300; ++k)
    {
        Vec3 p = uniform_in(rng, c.rep.bound);
        auto a = point_membership(c.rep, p);
        auto b = point_membership(c.rep, p, full);
        EXPECT_EQ(a.inside, b.inside);
        if (a.exact)
            EXPECT_EQ(a.signed_distance, b.signed_distance);
    }
}

TEST(TimeWitnesses, Examples)
{
    auto const& c = capsule();
    auto w = time_witnesses(c.rep, Vec3(0, 8, 0));
    ASSERT_EQ(w.size(), 1u);
    EXPECT_NEAR(w[0].t0, 7.0 / 16, 1e-6);
    EXPECT_NEAR(w[0].t1, 9.0 / 16, 1e-6);
    EXPECT_TRUE(time_witnesses(c.rep, Vec3(100, 100, 100)).empty());

    Rng rng(45);
    auto base = random_ball_rep(rng, 3);
    auto still = build_swept_rep(base, RigidMotion::identity(0, 3), {});
    Vec3 inside = std::get<Ball3>(base.patches[0].area).centre;
    auto all = time_witnesses(still, inside);
    ASSERT_EQ(all.size(), 1u);
    EXPECT_EQ(all[0].t0, 0.0);
    EXPECT_EQ(all[0].t1, 3.0);
}

TEST(TimeWitnesses, MatchDenseScan)
{
    auto const& c = capsule();
    RepEvaluator ev(c.base);
    Rng rng(46);
    int n = 100000;
    for (int trial = 0; trial < 5; ++trial)
    {
        Vec3 p(uniform(rng, -1, 1), uniform(rng, 2, 14), uniform(rng, -1, 1));
        auto w = time_witnesses(c.rep, p);
        for (int k = 0; k <= n; k += 7)
        {
            double t = double(k) / n;
            bool member = ev.contains(c.motion.inverse_apply(t, p));
            bool covered = std::any_of(w.begin(), w.end(), [&](TimeInterval const& iv) {
                return iv.t0 - 1e-4 <= t && t <= iv.t1 + 1e-4;
            });
            if (member)
                EXPECT_TRUE(covered) << "t " << t;
            bool deep = std::any_of(w.begin(), w.end(), [&](TimeInterval const& iv) {
                return iv.t0 + 1e-4 <= t && t <= iv.t1 - 1e-4;
            });
            if (deep)
                EXPECT_TRUE(member) << "t " << t;
        }
    }
}

//---------------------------------------------------------------------------//

TEST(Ray, CapsuleAxis)
{
    auto const& c = capsule();
    Ray ray(Vec3(0, -10, 0), Vec3::UnitY());
    auto hit = ray_intersect_first(c.rep, ray);
    ASSERT_TRUE(hit);
    EXPECT_NEAR(hit->s, 9.0, 1e-4);
    EXPECT_TRUE(hit->entering);

    EXPECT_FALSE(ray_intersect_first(c.rep, Ray(Vec3(0, -10, 0), -Vec3::UnitY())));
    EXPECT_FALSE(ray_intersect_first(c.rep, Ray(Vec3(50, 0, 0), Vec3::UnitY())));
}

TEST(Ray, FirstHitMatchesMarch)
{
    auto const& c = capsule();
    Rng rng(47);
    for (int trial = 0; trial < 20; ++trial)
    {
        Vec3 o(uniform(rng, -8, 8), uniform(rng, -4, 20), uniform(rng, -8, 8));
        Vec3 target(uniform(rng, -1, 1), uniform(rng, 1, 15), uniform(rng, -1, 1));
        Ray ray(o, (target - o).normalized());
        if (point_membership(c.rep, o).inside)
            continue;
        auto hit = ray_intersect_first(c.rep, ray);
        // March with the membership query itself.
        double step = 2e-3, found = -1;
        for (double s = 0; s < 40; s += step)
        {
            if (point_membership(c.rep, ray.at(s)).inside)
            {
                found = s;
                break;
            }
        }
        if (found < 0)
        {
            EXPECT_FALSE(hit && hit->s < 40 - 1e-3);
            continue;
        }
        ASSERT_TRUE(hit) << "trial " << trial;
        EXPECT_NEAR(hit->s, found, 2 * step);
        EXPECT_TRUE(point_membership(c.rep, ray.at(hit->s + 1e-3)).inside
                    || point_membership(c.rep, ray.at(hit->s)).inside);
    }
}

TEST(Ray, StaticBallHasEntryAndExit)
{
    auto rep = build_swept_rep(single_ball(), RigidMotion::identity(), {});
    auto hits = ray_intersect_all(rep, Ray(Vec3(-5, 0, 0), Vec3::UnitX()));
    ASSERT_EQ(hits.size(), 2u);
    EXPECT_NEAR(hits[0].s, 4.4, 1e-6);
    EXPECT_TRUE(hits[0].entering);
    EXPECT_NEAR(hits[1].s, 5.6, 1e-6);
    EXPECT_FALSE(hits[1].entering);

    auto tangent = ray_intersect_all(rep, Ray(Vec3(-5, 0.6, 0), Vec3::UnitX()));
    EXPECT_LE(tangent.size(), 2u);
    for (auto const& h : tangent)
        EXPECT_NEAR(h.s, 5.0, 1e-2);

    EXPECT_TRUE(ray_intersect_all(rep, Ray(Vec3(-5, 0.7, 0), Vec3::UnitX())).empty());
}

TEST(Ray, IdentityMotionMatchesBaseBoundary)
{
    Rng rng(48);
    auto base = random_ball_rep(rng, 4);
    auto rep = build_swept_rep(base, RigidMotion::identity(), {});
    RepEvaluator ev(base);
    for (int trial = 0; trial < 30; ++trial)
    {
        Vec3 o = uniform_in(rng, rep.bound.inflated(2));
        Ray ray(o, unit_vector(rng));
        if (ev.contains(o))
            continue;
        auto hit = ray_intersect_first(rep, ray);
        double step = 1e-3, found = -1;
        for (double s = 0; s < 10; s += step)
        {
            if (ev.contains(ray.at(s)))
            {
                found = s;
                break;
            }
        }
        if (found < 0)
            continue;
        ASSERT_TRUE(hit);
        EXPECT_NEAR(hit->s, found, 2 * step);
    }
}

//---------------------------------------------------------------------------//

TEST(Subtract, DifferenceField)
{
    EXPECT_EQ(difference_field(-1, 2), -1);
    EXPECT_GT(difference_field(-1, -0.5), 0);
    EXPECT_GT(difference_field(-1, 0), 0);
    EXPECT_EQ(difference_field(3, 2), 3);
    EXPECT_EQ(difference_field(-1, far_field), -1);
}

TEST(Subtract, SelfDifferenceIsEmpty)
{
    Rng rng(49);
    auto base = random_ball_rep(rng, 4);
    auto rep = build_swept_rep(base, RigidMotion::identity(), {});
    GridSpec spec{rep.bound.inflated(0.2), {24, 24, 24}};
    auto g = subtract(&base, rep, spec);
    EXPECT_FALSE(g.degenerate);
    for (double v : g.values)
        ASSERT_GT(v, 0.0);
}

TEST(Subtract, DisjointObjectIsUnchanged)
{
    auto const& c = capsule();
    auto object = single_ball(Vec3(40, 0, 0), 2.0);
    GridSpec spec{object.bound.inflated(0.5), {20, 20, 20}};
    auto g = subtract(&object, c.rep, spec);
    EXPECT_TRUE(g.degenerate);
    RepEvaluator ev(object);
    for (std::uint32_t z = 0; z < 20; ++z)
        for (std::uint32_t y = 0; y < 20; ++y)
            for (std::uint32_t x = 0; x < 20; ++x)
                EXPECT_EQ(g.at(x, y, z) <= 0, ev.contains(spec.point(x, y, z)));
}

TEST(Subtract, BlockMinusCapsule)
{
    auto const& c = capsule();
    LocalImplicitRep block;
    block.kind = RepKind::OctreeBased;
    Box3 box(Vec3(-3, 4, -3), Vec3(3, 12, 3));
    block.patches.push_back({box, Quadric3({0, 0, 0, 0, 0, 0, 0, 0, 0, -1})});
    block.bound = box;
    GridSpec spec{box, {16, 16, 16}};
    auto g = subtract(&block, c.rep, spec);
    EXPECT_FALSE(g.degenerate);
    int carved = 0;
    for (std::uint32_t z = 0; z < 16; ++z)
        for (std::uint32_t y = 0; y < 16; ++y)
            for (std::uint32_t x = 0; x < 16; ++x)
            {
                Vec3 p = spec.point(x, y, z);
                bool expect = !point_membership(c.rep, p).inside;
                EXPECT_EQ(g.at(x, y, z) <= 0, expect);
                EXPECT_EQ(subtract_member(&block, c.rep, p), expect);
                carved += !expect;
            }
    EXPECT_GT(carved, 0);
}

TEST(Subtract, SweptObject)
{
    auto const& c = capsule();
    GridSpec spec{c.rep.bound, {12, 12, 12}};
    auto g = subtract(&c.rep, c.rep, spec);
    for (double v : g.values)
        EXPECT_GT(v, 0.0);
}

TEST(Grid, SpecValidation)
{
    GridSpec s{Box3(Vec3(0, 0, 0), Vec3(1, 1, 1)), {1, 2, 2}};
    EXPECT_THROW(s.validate(), InvalidInput);
    s.dims = {2, 3, 5};
    EXPECT_NO_THROW(s.validate());
    EXPECT_EQ(s.size(), 30u);
    EXPECT_EQ(s.point(1, 2, 4), Vec3(1, 1, 1));
    EXPECT_EQ(s.point(0, 1, 2), Vec3(0, 0.5, 0.5));
}
