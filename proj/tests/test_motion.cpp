#include <gtest/gtest.h>

#include "support.hpp"
#include "sweptvol/motion.hpp"

using namespace sweptvol;
using namespace sweptvol::test;

namespace {

double fd_speed(RigidMotion const& m, double t, Vec3 const& p)
{
    double h = 1e-6;
    return (m.apply(t + h, p) - m.apply(t - h, p)).norm() / (2 * h);
}

}  // namespace

TEST(PiecewisePoly, EvaluatesSegmentsInLocalVariable)
{
    PiecewisePoly p({0, 1, 3}, {{1, 2}, {3, 0, 1}});
    EXPECT_DOUBLE_EQ(p(0.5), 2.0);
    EXPECT_DOUBLE_EQ(p(1.0), 3.0);
    EXPECT_DOUBLE_EQ(p(3.0), 7.0);
    auto d = p.derivative();
    EXPECT_DOUBLE_EQ(d(0.5), 2.0);
    EXPECT_DOUBLE_EQ(d(2.0), 2.0);
}

TEST(PiecewisePoly, Validation)
{
    EXPECT_THROW(PiecewisePoly({0, 1, 2}, {{0, 1}, {0}}), InvalidInput);
    EXPECT_THROW(PiecewisePoly({0, 1}, {{0, 0, 0, 0, 0, 0, 1}}), InvalidInput);
    EXPECT_THROW(PiecewisePoly({1, 0}, {{0}}), InvalidInput);
    EXPECT_THROW(PiecewisePoly({0, 1}, {{0}, {1}}), InvalidInput);
    EXPECT_NO_THROW(PiecewisePoly({2, 2}, {{5}}));
    EXPECT_EQ(PiecewisePoly::linear(0, 1, 0, 2)(1.5), 3.0);
}

TEST(PiecewisePoly, RangeAndBoundAgainstSampling)
{
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial)
    {
        std::vector<double> c;
        for (int k = 0; k < 6; ++k)
            c.push_back(uniform(rng, -2, 2));
        PiecewisePoly p({-1, 1}, {c});
        double lo = 1e300, hi = -1e300;
        for (int k = 0; k <= 20000; ++k)
        {
            double v = p(-1 + 2 * k / 20000.0);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        auto [mn, mx] = p.range(-1, 1);
        EXPECT_NEAR(mn, lo, 1e-6);
        EXPECT_NEAR(mx, hi, 1e-6);
        EXPECT_GE(p.abs_bound(-1, 1), std::max(std::abs(lo), std::abs(hi)) - 1e-12);
    }
}

TEST(PolynomialRoots, KnownRoots)
{
    // (t - 0.25)(t - 0.5)(t + 3)
    auto r = polynomial_roots({0.375, -2.125, 2.25, 1}, 0, 1);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_NEAR(r[0], 0.25, 1e-12);
    EXPECT_NEAR(r[1], 0.5, 1e-12);
}

TEST(Motion, CapsuleEndpoints)
{
    auto [base, m] = capsule_example();
    auto i0 = eval_motion(m, 0.0);
    EXPECT_TRUE(i0.rotation.isApprox(Mat3::Identity(), 1e-15));
    EXPECT_EQ(i0.translation, Vec3::Zero());

    auto i1 = eval_motion(m, 1.0);
    EXPECT_LT((i1.rotation * Vec3::UnitX() - Vec3(-1, 0, 0)).norm(), 1e-12);
    EXPECT_LT((i1.translation - Vec3(0, 16, 0)).norm(), 1e-12);

    EXPECT_LT((m.apply(0.5, Vec3::UnitX()) - Vec3(0, 8, 1)).norm(), 1e-12);
}

TEST(Motion, CapsuleInverse)
{
    auto [base, m] = capsule_example();
    EXPECT_LT((inverse_apply(m, 0.0, Vec3(3, 4, 5)) - Vec3(3, 4, 5)).norm(), 1e-15);
    EXPECT_LT(inverse_apply(m, 1.0, Vec3(0, 16, 0)).norm(), 1e-12);
    EXPECT_THROW(eval_motion(m, 1.5), DomainError);
    EXPECT_THROW(inverse_apply(m, -0.1, Vec3::Zero()), DomainError);
}

TEST(Motion, EulerConvention)
{
    double b = 0.3;
    Mat3 ry;
    ry << std::cos(b), 0, -std::sin(b), 0, 1, 0, std::sin(b), 0, std::cos(b);
    EXPECT_TRUE(euler_rotation(0, b, 0).isApprox(ry, 1e-15));
    Mat3 rx = Eigen::AngleAxisd(0.7, Vec3::UnitX()).toRotationMatrix();
    Mat3 rz = Eigen::AngleAxisd(-0.4, Vec3::UnitZ()).toRotationMatrix();
    EXPECT_TRUE(euler_rotation(0.7, 0, 0).isApprox(rx, 1e-15));
    EXPECT_TRUE(euler_rotation(0, 0, -0.4).isApprox(rz, 1e-15));
    EXPECT_TRUE(euler_rotation(0.7, b, -0.4).isApprox(rx * ry * rz, 1e-14));
}

TEST(Motion, ProperRotationsAndRigidity)
{
    Rng rng(12);
    for (int trial = 0; trial < 10; ++trial)
    {
        auto m = random_motion(rng, 5, 6);
        for (int k = 0; k < 100; ++k)
        {
            double t = uniform(rng, 0, 1);
            auto iso = m.at(t);
            EXPECT_LT((iso.rotation * iso.rotation.transpose() - Mat3::Identity()).norm(), 1e-9);
            EXPECT_NEAR(iso.rotation.determinant(), 1.0, 1e-9);
            Vec3 p(uniform(rng, -5, 5), uniform(rng, -5, 5), uniform(rng, -5, 5));
            Vec3 q(uniform(rng, -5, 5), uniform(rng, -5, 5), uniform(rng, -5, 5));
            EXPECT_LT((m.inverse_apply(t, m.apply(t, p)) - p).norm(), 1e-12 * (1 + p.norm()) * 10);
            EXPECT_NEAR((m.apply(t, p) - m.apply(t, q)).norm(), (p - q).norm(), 1e-12 * 20);
        }
    }
}

TEST(Motion, SpeedBoundExamples)
{
    auto [base, m] = capsule_example();
    EXPECT_GE(motion_speed_bound(m, 0, 1, 0), 16.0);
    EXPECT_GE(motion_speed_bound(m, 0, 1, 2), 16.0 + 2 * std::numbers::pi);
    auto c = RigidMotion::constant(0, 1, Vec3(1, 2, 3), Vec3(0.1, 0.2, 0.3));
    EXPECT_EQ(motion_speed_bound(c, 0, 1, 5), 0.0);
    EXPECT_THROW(motion_speed_bound(m, 0.5, 2, 1), DomainError);
}

TEST(Motion, SpeedBoundIsATrueBound)
{
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial)
    {
        std::array<PiecewisePoly, 3> v, ang;
        for (int k = 0; k < 3; ++k)
        {
            double a = uniform(rng, -3, 3), b = uniform(rng, -3, 3);
            double end = 0.5 * a + 0.25 * b;
            v[k] = PiecewisePoly({0, 0.5, 1}, {{0, a, b}, {end, uniform(rng, -3, 3)}});
            ang[k] = PiecewisePoly({0, 1}, {{uniform(rng, -1, 1), uniform(rng, -2, 2),
                                             uniform(rng, -2, 2)}});
        }
        RigidMotion m(0, 1, v, ang);
        double r = uniform(rng, 0, 3);
        double bound = m.speed_bound(0, 1, r);
        for (int k = 1; k <= 100; ++k)
        {
            double t = k / 101.0;
            Vec3 p = in_ball(rng, Vec3::Zero(), r);
            EXPECT_LE(fd_speed(m, t, p), bound * (1 + 1e-6));
        }
    }
}
