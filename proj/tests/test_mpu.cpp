#include <gtest/gtest.h>

#include "support.hpp"
#include "sweptvol/mpu.hpp"
#include "sweptvol/serialize.hpp"

using namespace sweptvol;
using namespace sweptvol::test;

namespace {

std::vector<OrientedPoint> cone_cloud(Rng& rng, std::vector<Vec3> const& normals,
                                      std::size_t per_face, Mat3 const& rot)
{
    std::vector<OrientedPoint> pts;
    for (auto const& f : cone_faces(rng, normals, 1.0, per_face))
        for (auto const& p : f.points)
            pts.push_back({rot * p, rot * f.normal});
    return pts;
}

OrientedPointCloud cylinder_cloud(std::size_t rings, std::size_t per_ring)
{
    std::vector<OrientedPoint> pts;
    for (std::size_t i = 0; i < rings; ++i)
    {
        double x = -1.0 + 2.0 * double(i) / double(rings - 1);
        for (std::size_t j = 0; j < per_ring; ++j)
        {
            double a = 2 * std::numbers::pi * (double(j) + 0.5 * double(i % 2)) / double(per_ring);
            Vec3 n(0, std::cos(a), std::sin(a));
            pts.push_back({Vec3(x, 0, 0) + n, n});
        }
    }
    return OrientedPointCloud(std::move(pts));
}

}  // namespace

TEST(MpuParams, Validation)
{
    MpuParams p;
    EXPECT_NO_THROW(p.validate());
    p.n_min = 6;
    EXPECT_THROW(p.validate(), InvalidInput);
    p = {};
    p.eps0 = 0;
    EXPECT_THROW(p.validate(), InvalidInput);
    p = {};
    p.alpha = 0.4;
    EXPECT_THROW(p.validate(), InvalidInput);
}

TEST(BSpline, Shape)
{
    EXPECT_DOUBLE_EQ(quadratic_bspline(0), 0.75);
    EXPECT_DOUBLE_EQ(quadratic_bspline(1.5), 0.0);
    EXPECT_DOUBLE_EQ(quadratic_bspline(-2), 0.0);
    EXPECT_DOUBLE_EQ(quadratic_bspline(1.0), 0.125);
    EXPECT_DOUBLE_EQ(mpu_weight(Vec3(1, 0, 0), Ball3(Vec3::Zero(), 1.0)), 0.0);
}

TEST(Taubin, Examples)
{
    LocalProcedure z = BivariatePatch();
    std::vector<Vec3> on{Vec3(0, 0, 0), Vec3(1, 2, 0)};
    EXPECT_DOUBLE_EQ(taubin_error(z, on), 0.0);
    std::vector<Vec3> off{Vec3(0, 0, 0.01)};
    EXPECT_DOUBLE_EQ(taubin_error(z, off), 0.01);
    LocalProcedure z2 = Quadric3({0, 0, 0, 0, 0, 0, 0, 0, 2, 0});
    EXPECT_DOUBLE_EQ(taubin_error(z2, off), 0.01);
    LocalProcedure flat = Quadric3({1, 1, 1, 0, 0, 0, 0, 0, 0, 0});
    std::vector<Vec3> origin{Vec3::Zero()};
    EXPECT_TRUE(std::isinf(taubin_error(flat, origin)));
}

TEST(TransformQuadric, MatchesComposition)
{
    Rng rng(31);
    Quadric3 g({0.3, -1, 2, 0.5, -0.2, 0.7, 1, -2, 0.1, 0.4});
    Vec3 c(0.5, -1, 2);
    auto t = transform_quadric(g, 2.5, c, 0.4);
    for (int i = 0; i < 20; ++i)
    {
        Vec3 x(uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2));
        EXPECT_NEAR(t(x), 0.4 * g(2.5 * (x - c)), 1e-10);
    }
}

//---------------------------------------------------------------------------//

TEST(FitBivariate, Paraboloid)
{
    Ball3 sphere(Vec3::Zero(), 2.0);
    auto frame = BivariatePatch::from_normal(Vec3::Zero(), Vec3::UnitZ());
    std::vector<OrientedPoint> pts;
    Rng rng(32);
    for (int i = 0; i < 50; ++i)
    {
        double u = uniform(rng, -0.7, 0.7), v = uniform(rng, -0.7, 0.7);
        Vec3 n = (frame.n - 2 * u * frame.u).normalized();
        pts.push_back({u * frame.u + v * frame.v + u * u * frame.n, n});
    }
    auto fit = fit_bivariate(pts, sphere, Vec3::UnitZ());
    auto c = fit.patch.coefficients();
    std::array<double, 6> want{1, 0, 0, 0, 0, 0};
    for (int k = 0; k < 6; ++k)
        EXPECT_NEAR(c[k], want[k], 1e-8);
}

TEST(FitBivariate, OffsetPlane)
{
    Ball3 sphere(Vec3::Zero(), 2.0);
    std::vector<OrientedPoint> pts;
    Rng rng(33);
    add_plane_points(pts, rng, Vec3(0, 0, 0.3), Vec3::UnitZ(), 0.8, 30);
    auto fit = fit_bivariate(pts, sphere, Vec3::UnitZ());
    // f = w - c00 vanishes on w = 0.3.
    EXPECT_NEAR(fit.patch.c00, 0.3, 1e-12);
    for (auto const& p : pts)
        EXPECT_NEAR(fit.patch(p.position), 0, 1e-12);
}

TEST(FitBivariate, ColinearPointsAreDegraded)
{
    Ball3 sphere(Vec3::Zero(), 2.0);
    std::vector<OrientedPoint> pts;
    for (int i = 0; i < 10; ++i)
        pts.push_back({Vec3(0.1 * i - 0.5, 0, 0), Vec3::UnitZ()});
    auto fit = fit_bivariate(pts, sphere, Vec3::UnitZ());
    EXPECT_TRUE(fit.degraded);
    for (double c : fit.patch.coefficients())
        EXPECT_TRUE(std::isfinite(c));
}

TEST(FitGeneralQuadric, PlaneIsRecovered)
{
    Rng rng(34);
    std::vector<OrientedPoint> pts;
    add_plane_points(pts, rng, Vec3(0, 0, 0.1), Vec3::UnitZ(), 0.5, 60);
    Box3 cube(Vec3::Constant(-0.25), Vec3::Constant(0.25));
    Ball3 sphere(Vec3::Zero(), 0.75 * cube.diagonal());
    auto fit = fit_general_quadric(pts, sphere, cube);
    ASSERT_TRUE(fit);
    EXPECT_EQ(fit->q_kept, 9u);
    double worst = 0;
    for (auto const& p : pts)
        worst = std::max(worst, std::abs(fit->quadric(p.position)));
    EXPECT_LT(worst * worst, 1e-10);
}

TEST(FitGeneralQuadric, SphereKeepsAllAuxiliaryPoints)
{
    auto cloud = sphere_cloud(400);
    std::vector<OrientedPoint> pts(cloud.points().begin(), cloud.points().end());
    for (auto& p : pts)
        p.normal = -p.normal;
    Box3 cube(Vec3::Constant(-0.4), Vec3::Constant(0.4));
    auto fit = fit_general_quadric(pts, Ball3(Vec3::Zero(), 1.2), cube);
    ASSERT_TRUE(fit);
    EXPECT_EQ(fit->q_kept, 9u);
}

TEST(FitGeneralQuadric, AntipodalNormalsFail)
{
    auto cloud = sphere_cloud(200);
    std::vector<OrientedPoint> pts;
    for (auto const& p : cloud.points())
    {
        pts.push_back(p);
        pts.push_back({p.position, -p.normal});
    }
    Box3 cube(Vec3::Constant(-0.5), Vec3::Constant(0.5));
    EXPECT_FALSE(fit_general_quadric(pts, Ball3(Vec3::Zero(), 1.3), cube));
}

//---------------------------------------------------------------------------//

TEST(MpuLocalFit, PlaneUsesBivariateCase)
{
    Rng rng(35);
    std::vector<OrientedPoint> pts;
    Vec3 n = unit_vector(rng);
    add_plane_points(pts, rng, Vec3(0.1, 0, 0), n, 0.5, 40);
    Box3 cube(Vec3::Constant(-0.3), Vec3::Constant(0.3));
    auto fit = mpu_local_fit(pts, Ball3(Vec3::Zero(), 0.75 * cube.diagonal()), cube, MpuParams{});
    ASSERT_TRUE(fit);
    EXPECT_EQ(fit->fit_case, MpuCase::Bivariate);
    for (auto const& p : pts)
        EXPECT_NEAR(eval_procedure(fit->procedure, p.position), 0, 1e-9);
}

TEST(MpuLocalFit, DihedralUsesSharpCaseWithTwoPieces)
{
    Rng rng(36);
    auto pts = cone_cloud(rng, dihedral_normals(std::numbers::pi / 2), 12, Mat3::Identity());
    Box3 cube(Vec3::Constant(-0.4), Vec3::Constant(0.4));
    auto fit = mpu_local_fit(pts, Ball3(Vec3::Zero(), 1.2), cube, MpuParams{});
    ASSERT_TRUE(fit);
    EXPECT_EQ(fit->fit_case, MpuCase::Sharp);
    EXPECT_EQ(fit->pieces, 2);
    auto const& m = std::get<MinOfPatches>(fit->procedure);
    // Each generating point lies on the zero set of the piece sharing its normal.
    for (auto const& p : pts)
    {
        double best = 1e300;
        for (auto const& piece : m.pieces)
            if (piece.gradient(p.position).normalized().dot(p.normal) > 0.99)
                best = std::min(best, std::abs(piece(p.position)));
        EXPECT_LT(best, 1e-6);
    }
}

TEST(MpuLocalFit, FullSphereUsesGeneralQuadric)
{
    auto cloud = sphere_cloud(300, 0.2);
    Box3 cube(Vec3::Constant(-0.2), Vec3::Constant(0.2));
    auto fit = mpu_local_fit(cloud.points(), Ball3(Vec3::Zero(), 0.75 * cube.diagonal()), cube,
                             MpuParams{});
    ASSERT_TRUE(fit);
    EXPECT_EQ(fit->fit_case, MpuCase::GeneralQuadric);
    // The corner terms bias a single coarse fit; it must still separate inside from outside.
    EXPECT_LT(taubin_error(fit->procedure, cloud.points()), 0.2 * 0.2);
    EXPECT_LT(eval_procedure(fit->procedure, Vec3::Zero()), 0.0);
    EXPECT_GT(eval_procedure(fit->procedure, Vec3::Constant(0.2)), 0.0);
}

TEST(Sharp, CascadeCounts)
{
    Rng rng(37);
    struct Case
    {
        std::vector<Vec3> normals;
        int pieces;
    };
    std::vector<Case> cases{{dihedral_normals(std::numbers::pi / 3), 2},
                            {dihedral_normals(std::numbers::pi / 2), 2},
                            {corner3_normals(), 3},
                            {corner4_normals(), 4}};
    for (auto const& c : cases)
    {
        for (int trial = 0; trial < 10; ++trial)
        {
            auto pts = cone_cloud(rng, c.normals, 8, random_rotation(rng));
            auto fit = classify_and_fit_sharp(pts, Ball3(Vec3::Zero(), 1.2), MpuParams{});
            EXPECT_EQ(fit.pieces, c.pieces);
        }
    }
}

TEST(Sharp, SmoothNormalsGiveSinglePatch)
{
    Rng rng(38);
    std::vector<OrientedPoint> pts;
    add_plane_points(pts, rng, Vec3::Zero(), Vec3::UnitZ(), 0.5, 12);
    auto fit = classify_and_fit_sharp(pts, Ball3(Vec3::Zero(), 1.0), MpuParams{});
    EXPECT_EQ(fit.pieces, 1);
    EXPECT_TRUE(std::holds_alternative<BivariatePatch>(fit.procedure));
}

//---------------------------------------------------------------------------//

TEST(MpuBuild, CubeCorners)
{
    std::vector<OrientedPoint> pts;
    for (int i = 0; i < 8; ++i)
    {
        Vec3 p(i & 1 ? 1 : -1, i & 2 ? 1 : -1, i & 4 ? 1 : -1);
        pts.push_back({p, p.normalized()});
    }
    OrientedPointCloud cloud(pts);
    auto rep = mpu_build(cloud, MpuParams{});
    EXPECT_GE(rep.size(), 1u);
    for (auto const& p : pts)
    {
        bool covered = false;
        for (auto const& lp : rep.patches)
            covered |= area_contains(lp.area, p.position);
        EXPECT_TRUE(covered);
    }
    EXPECT_THROW(OrientedPointCloud({}), InvalidInput);
}

TEST(MpuBuild, CylinderMembership)
{
    auto cloud = cylinder_cloud(41, 80);
    MpuStats stats;
    auto rep = mpu_build(cloud, MpuParams{}, &stats);
    RepEvaluator ev(rep);
    EXPECT_TRUE(ev.contains(Vec3::Zero()));
    EXPECT_FALSE(ev.contains(Vec3(0, 2, 0)));

    Rng rng(39);
    int wrong = 0, probes = 0;
    while (probes < 1000)
    {
        Vec3 p(uniform(rng, -0.8, 0.8), uniform(rng, -1.3, 1.3), uniform(rng, -1.3, 1.3));
        double r = std::hypot(p.y(), p.z());
        if (std::abs(r - 1) < 0.1)
            continue;
        ++probes;
        wrong += ev.contains(p) != (r < 1);
    }
    EXPECT_EQ(wrong, 0);
}

TEST(MpuBuild, AcceptanceTilingSignAndDeterminism)
{
    auto cloud = sphere_cloud(3000);
    MpuStats stats;
    auto rep = mpu_build(cloud, MpuParams{}, &stats);
    ASSERT_EQ(stats.cubes.size(), rep.size());

    double vol = 0;
    for (auto const& c : stats.cubes)
    {
        if (c.support_points > 0 && !c.flagged)
            EXPECT_LT(c.taubin_error, 1e-4);
        vol += c.cube.volume();
    }
    // The root is the cube around the cloud's bounding box.
    Box3 root = stats.cubes.front().cube;
    for (auto const& c : stats.cubes)
        root.expand(c.cube);
    EXPECT_NEAR(vol, root.volume(), 1e-9 * root.volume());
    for (std::size_t i = 0; i < stats.cubes.size(); ++i)
    {
        for (std::size_t j = i + 1; j < stats.cubes.size(); ++j)
        {
            Box3 const& a = stats.cubes[i].cube;
            Box3 const& b = stats.cubes[j].cube;
            Vec3 lo = a.min.cwiseMax(b.min), hi = a.max.cwiseMin(b.max);
            bool interior = ((hi - lo).array() > 1e-12).all();
            EXPECT_FALSE(interior) << i << " " << j;
        }
    }

    RepEvaluator ev(rep);
    double step = 0.01 * cloud.bounding_box().diagonal();
    std::size_t good = 0;
    for (auto const& p : cloud.points())
        good += ev.value(p.position + step * p.normal) > 0
                && ev.value(p.position - step * p.normal) < 0;
    EXPECT_GE(good, std::size_t(0.95 * double(cloud.size())));

    auto again = mpu_build(cloud, MpuParams{});
    EXPECT_EQ(dump_json(rep_to_json(rep)), dump_json(rep_to_json(again)));
}
