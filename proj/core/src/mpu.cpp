#include "sweptvol/mpu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sweptvol/kdtree.hpp"
#include "sweptvol/parallel.hpp"
#include "sweptvol/solvers.hpp"

namespace sweptvol {

void MpuParams::validate() const
{
    if (!(alpha >= 0.5))
        throw InvalidInput("MpuParams: alpha must be at least 1/2 so the sphere holds the cube");
    if (n_min < 7)
        throw InvalidInput("MpuParams: n_min must be at least 7");
    if (!(eps0 > 0))
        throw InvalidInput("MpuParams: eps0 must be positive");
    if (max_depth < 0)
        throw InvalidInput("MpuParams: max_depth must be non-negative");
}

double quadratic_bspline(double x)
{
    x = std::abs(x);
    if (x <= 0.5)
        return 0.75 - x * x;
    if (x < 1.5)
        return 0.5 * (1.5 - x) * (1.5 - x);
    return 0.0;
}

double mpu_weight(Vec3 const& p, Ball3 const& sphere)
{
    return quadratic_bspline(3.0 * (p - sphere.centre).norm() / (2.0 * sphere.radius));
}

namespace {

using Indices = std::vector<std::size_t>;

//! Weighted mean normal; unweighted when the weights vanish. Zero if degenerate.
Vec3 mean_normal(std::span<OrientedPoint const> pts, Indices const& idx, Ball3 const& sphere)
{
    Vec3 n = Vec3::Zero();
    for (auto i : idx)
        n += mpu_weight(pts[i].position, sphere) * pts[i].normal;
    if (n.norm() < 1e-12)
    {
        n.setZero();
        for (auto i : idx)
            n += pts[i].normal;
    }
    double len = n.norm();
    return len < 1e-12 ? Vec3::Zero() : Vec3(n / len);
}

Indices all_indices(std::size_t n)
{
    Indices idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return idx;
}

std::vector<OrientedPoint> gather(std::span<OrientedPoint const> pts, Indices const& idx)
{
    std::vector<OrientedPoint> out;
    out.reserve(idx.size());
    for (auto i : idx)
        out.push_back(pts[i]);
    return out;
}

PatchFit fit_piece(std::span<OrientedPoint const> pts, Indices const& idx, Ball3 const& sphere)
{
    Vec3 n = mean_normal(pts, idx, sphere);
    if (n.isZero())
        n = pts[idx.front()].normal;
    if (idx.size() < 3)
    {
        Vec3 centroid = Vec3::Zero();
        for (auto i : idx)
            centroid += pts[i].position;
        centroid /= static_cast<double>(idx.size());
        return {BivariatePatch::from_normal(centroid, n), true};
    }
    auto sub = gather(pts, idx);
    return fit_bivariate(sub, sphere, n);
}

BivariatePatch unscale_patch(BivariatePatch const& p, Vec3 const& centre, double s)
{
    BivariatePatch out = p;
    out.origin = centre + p.origin / s;
    out.set_coefficients({p.c20 * s, p.c11 * s, p.c02 * s, p.c10, p.c01, p.c00 / s});
    return out;
}

LocalProcedure unscale(LocalProcedure const& proc, Vec3 const& centre, double s)
{
    if (auto const* q = std::get_if<Quadric3>(&proc))
        return transform_quadric(*q, s, centre, 1.0 / s);
    if (auto const* p = std::get_if<BivariatePatch>(&proc))
        return unscale_patch(*p, centre, s);
    auto const& m = std::get<MinOfPatches>(proc);
    std::vector<BivariatePatch> pieces;
    for (auto const& p : m.pieces)
        pieces.push_back(unscale_patch(p, centre, s));
    return MinOfPatches(std::move(pieces));
}

}  // namespace

//---------------------------------------------------------------------------//

Quadric3 transform_quadric(Quadric3 const& g, double a, Vec3 const& c, double k)
{
    auto const& q = g.coeffs;
    Mat3 A;
    A << q[0], 0.5 * q[3], 0.5 * q[4], 0.5 * q[3], q[1], 0.5 * q[5], 0.5 * q[4], 0.5 * q[5],
        q[2];
    Vec3 b(q[6], q[7], q[8]);
    double e = q[9];

    Mat3 A2 = a * a * A;
    Vec3 b2 = -2.0 * A2 * c + a * b;
    double e2 = c.dot(A2 * c) - a * b.dot(c) + e;
    return Quadric3({k * A2(0, 0), k * A2(1, 1), k * A2(2, 2), k * 2 * A2(0, 1),
                     k * 2 * A2(0, 2), k * 2 * A2(1, 2), k * b2.x(), k * b2.y(), k * b2.z(),
                     k * e2});
}

std::optional<QuadricFit> fit_general_quadric(std::span<OrientedPoint const> points,
                                              Ball3 const& sphere, Box3 const& cube)
{
    if (points.empty())
        return std::nullopt;
    std::vector<Vec3> qs;
    for (auto const& corner : cube.corners())
        qs.push_back(corner);
    qs.push_back(cube.center());

    // Auxiliary points: keep q when its 6 nearest neighbours agree on side.
    std::vector<std::pair<Vec3, double>> kept;
    std::vector<std::pair<double, std::size_t>> dist(points.size());
    std::size_t k = std::min<std::size_t>(6, points.size());
    for (auto const& q : qs)
    {
        for (std::size_t i = 0; i < points.size(); ++i)
            dist[i] = {(points[i].position - q).squaredNorm(), i};
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k),
                          dist.end());
        bool pos = false, neg = false;
        double d = 0.0;
        for (std::size_t j = 0; j < k; ++j)
        {
            auto const& p = points[dist[j].second];
            double s = p.normal.dot(q - p.position);
            pos |= s > 0;
            neg |= s < 0;
            d += s;
        }
        if (pos && neg)
            continue;
        kept.push_back({q, d / static_cast<double>(k)});
    }
    if (kept.empty())
        return std::nullopt;

    // Fit in y = (x - c) / R for conditioning, then expand.
    Vec3 const& c = sphere.centre;
    double inv_r = 1.0 / sphere.radius;
    double wsum = 0.0;
    for (auto const& p : points)
        wsum += mpu_weight(p.position, sphere);

    NormalEquations ne(10);
    if (wsum > 0)
    {
        for (auto const& p : points)
        {
            double w = mpu_weight(p.position, sphere);
            auto basis = Quadric3::basis((p.position - c) * inv_r);
            ne.add(basis, w / wsum, 0.0);
        }
    }
    double qw = 1.0 / static_cast<double>(kept.size());
    for (auto const& [q, d] : kept)
    {
        auto basis = Quadric3::basis((q - c) * inv_r);
        ne.add(basis, qw, d);
    }
    auto sol = ne.solve();
    std::array<double, 10> coeffs{};
    for (int i = 0; i < 10; ++i)
        coeffs[i] = sol.coeffs(i);

    QuadricFit out;
    out.quadric = transform_quadric(Quadric3(coeffs), inv_r, c, 1.0);
    out.q_kept = kept.size();
    out.degraded = sol.degraded;
    return out;
}

PatchFit fit_bivariate(std::span<OrientedPoint const> points, Ball3 const& sphere,
                       Vec3 const& normal)
{
    if (points.empty())
        throw InvalidInput("fit_bivariate: no points");
    if (normal.norm() < 1e-12)
        throw InvalidInput("fit_bivariate: zero frame normal");
    BivariatePatch patch = BivariatePatch::from_normal(sphere.centre, normal.normalized());

    double inv_r = 1.0 / sphere.radius;
    double wsum = 0.0;
    for (auto const& p : points)
        wsum += mpu_weight(p.position, sphere);
    bool uniform = !(wsum > 0);

    NormalEquations ne(6);
    for (auto const& p : points)
    {
        Vec3 l = patch.local(p.position);
        double u = l.x() * inv_r, v = l.y() * inv_r;
        double w = uniform ? 1.0 : mpu_weight(p.position, sphere);
        std::array<double, 6> basis{u * u, u * v, v * v, u, v, 1.0};
        ne.add(basis, w, l.z());
    }
    auto sol = ne.solve();
    double r2 = inv_r * inv_r;
    patch.set_coefficients({sol.coeffs(0) * r2, sol.coeffs(1) * r2, sol.coeffs(2) * r2,
                            sol.coeffs(3) * inv_r, sol.coeffs(4) * inv_r, sol.coeffs(5)});
    return {patch, sol.degraded || uniform};
}

MpuLocalFit classify_and_fit_sharp(std::span<OrientedPoint const> points, Ball3 const& sphere,
                                   MpuParams const& params)
{
    if (points.empty())
        throw InvalidInput("classify_and_fit_sharp: no points");
    std::size_t n = points.size();

    auto single = [&]() {
        auto fit = fit_piece(points, all_indices(n), sphere);
        return MpuLocalFit{fit.patch, MpuCase::Sharp, 1, fit.degraded};
    };

    // Most opposed pair of normals.
    std::size_t i1 = 0, i2 = 0;
    double theta = 1.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t j = i + 1; j < n; ++j)
        {
            double d = points[i].normal.dot(points[j].normal);
            if (d < theta)
            {
                theta = d;
                i1 = i;
                i2 = j;
            }
        }
    }
    if (theta >= params.theta_sharp)
        return single();

    Vec3 n1 = points[i1].normal, n2 = points[i2].normal;
    Indices p1, p2;
    for (std::size_t i = 0; i < n; ++i)
        (points[i].normal.dot(n1) >= points[i].normal.dot(n2) ? p1 : p2).push_back(i);

    auto assemble = [&](std::vector<Indices> const& sets) {
        std::vector<BivariatePatch> pieces;
        bool degraded = false;
        for (auto const& s : sets)
        {
            if (s.empty())
            {
                degraded = true;
                continue;
            }
            auto fit = fit_piece(points, s, sphere);
            pieces.push_back(fit.patch);
            degraded |= fit.degraded;
        }
        if (pieces.size() == 1)
            return MpuLocalFit{pieces.front(), MpuCase::Sharp, 1, true};
        int count = static_cast<int>(pieces.size());
        return MpuLocalFit{MinOfPatches(std::move(pieces)), MpuCase::Sharp, count, degraded};
    };

    Vec3 e = n1.cross(n2);
    if (e.norm() < 1e-12)
        return assemble({p1, p2});
    e.normalize();

    double max_e = 0.0;
    for (auto const& p : points)
        max_e = std::max(max_e, std::abs(p.normal.dot(e)));
    if (max_e <= params.theta_corner)
        return assemble({p1, p2});

    auto in_third = [&](std::size_t i) {
        Vec3 const& ni = points[i].normal;
        double de = std::abs(e.dot(ni));
        return std::abs(n1.dot(ni)) < de && std::abs(n2.dot(ni)) < de;
    };
    Indices p3, q1, q2;
    for (auto i : p1)
        (in_third(i) ? p3 : q1).push_back(i);
    for (auto i : p2)
        (in_third(i) ? p3 : q2).push_back(i);
    std::sort(p3.begin(), p3.end());
    if (p3.empty())
        return assemble({p1, p2});

    std::size_t i3 = p3.front(), i4 = p3.front();
    double theta34 = 1.0;
    for (std::size_t a = 0; a < p3.size(); ++a)
    {
        for (std::size_t b = a + 1; b < p3.size(); ++b)
        {
            double d = points[p3[a]].normal.dot(points[p3[b]].normal);
            if (d < theta34)
            {
                theta34 = d;
                i3 = p3[a];
                i4 = p3[b];
            }
        }
    }
    if (theta34 >= params.theta_sharp)
        return assemble({q1, q2, p3});

    Vec3 n3 = points[i3].normal, n4 = points[i4].normal;
    Indices p4, p5;
    for (auto i : p3)
        (points[i].normal.dot(n3) >= points[i].normal.dot(n4) ? p4 : p5).push_back(i);
    return assemble({q1, q2, p4, p5});
}

std::optional<MpuLocalFit> mpu_local_fit(std::span<OrientedPoint const> points,
                                         Ball3 const& sphere, Box3 const& cube,
                                         MpuParams const& params)
{
    if (points.empty())
        throw InvalidInput("mpu_local_fit: no points");
    Vec3 n = mean_normal(points, all_indices(points.size()), sphere);
    double min_dot = -1.0;
    if (!n.isZero())
    {
        min_dot = 1.0;
        for (auto const& p : points)
            min_dot = std::min(min_dot, n.dot(p.normal));
    }

    auto large = static_cast<std::size_t>(2 * params.n_min);
    if (points.size() > large && min_dot <= 0.0)
    {
        auto fit = fit_general_quadric(points, sphere, cube);
        if (!fit)
            return std::nullopt;
        return MpuLocalFit{fit->quadric, MpuCase::GeneralQuadric, 1, fit->degraded};
    }
    if (points.size() > large)
    {
        auto fit = fit_bivariate(points, sphere, n);
        return MpuLocalFit{fit.patch, MpuCase::Bivariate, 1, fit.degraded};
    }
    return classify_and_fit_sharp(points, sphere, params);
}

double taubin_error(LocalProcedure const& proc, std::span<Vec3 const> points)
{
    double eps = 0.0;
    for (auto const& p : points)
    {
        double g = procedure_gradient(proc, p).norm();
        if (!(g >= 1e-12))
            return std::numeric_limits<double>::infinity();
        eps = std::max(eps, std::abs(eval_procedure(proc, p)) / g);
    }
    return eps;
}

double taubin_error(LocalProcedure const& proc, std::span<OrientedPoint const> points)
{
    std::vector<Vec3> pos;
    pos.reserve(points.size());
    for (auto const& p : points)
        pos.push_back(p.position);
    return taubin_error(proc, std::span<Vec3 const>(pos));
}

//---------------------------------------------------------------------------//

namespace {

struct Cube
{
    Box3 box;
    int depth = 0;
};

struct CubeOutcome
{
    bool accept = false;
    bool failed = false;
    std::optional<MpuLocalFit> fit;
    MpuCubeRecord record;
};

MpuLocalFit best_effort(std::span<OrientedPoint const> pts, Ball3 const& sphere)
{
    Vec3 n = mean_normal(pts, all_indices(pts.size()), sphere);
    if (n.isZero())
        n = Vec3::UnitZ();
    auto fit = fit_bivariate(pts, sphere, n);
    return {fit.patch, MpuCase::Bivariate, 1, true};
}

CubeOutcome process_cube(Cube const& cube, std::vector<OrientedPoint> const& pts,
                         KdTree const& tree, MpuParams const& params)
{
    CubeOutcome out;
    out.record.depth = cube.depth;
    Vec3 c = cube.box.center();
    double radius = params.alpha * cube.box.diagonal();

    auto support = tree.radius_search(c, radius);
    out.record.support_points = support.size();

    auto wanted = std::min<std::size_t>(static_cast<std::size_t>(params.n_min), pts.size());
    double big = radius;
    auto enlarged = support;
    while (enlarged.size() < wanted)
    {
        big *= 1.3;
        enlarged = tree.radius_search(c, big);
    }
    out.record.enlarged = big > radius;

    std::vector<OrientedPoint> sub;
    sub.reserve(enlarged.size());
    for (auto i : enlarged)
        sub.push_back(pts[i]);
    Ball3 sphere(c, big);

    auto fit = mpu_local_fit(sub, sphere, cube.box, params);
    bool at_cap = cube.depth >= params.max_depth;
    if (!fit)
    {
        out.failed = true;
        if (!at_cap)
            return out;
        fit = best_effort(sub, sphere);
        out.record.flagged = true;
    }
    out.record.fit_case = fit->fit_case;
    out.record.pieces = fit->pieces;
    out.record.degraded = fit->degraded;

    if (!support.empty())
    {
        std::vector<Vec3> inside;
        inside.reserve(support.size());
        for (auto i : support)
            inside.push_back(pts[i].position);
        out.record.taubin_error = taubin_error(fit->procedure, std::span<Vec3 const>(inside));
        if (!(out.record.taubin_error < params.eps0))
        {
            if (!at_cap)
                return out;
            out.record.flagged = true;
        }
    }
    out.accept = true;
    out.fit = std::move(fit);
    return out;
}

}  // namespace

LocalImplicitRep mpu_build(OrientedPointCloud const& cloud, MpuParams const& params,
                           MpuStats* stats)
{
    params.validate();
    if (cloud.size() == 0)
        throw InvalidInput("mpu_build: empty cloud");

    Box3 bbox = cloud.bounding_box();
    Vec3 centre = bbox.center();
    double side = bbox.extents().maxCoeff();
    if (!(side > 0))
        side = 1.0;
    double s = 1.0 / (side * std::sqrt(3.0));

    std::vector<OrientedPoint> pts;
    pts.reserve(cloud.size());
    for (auto const& p : cloud.points())
        pts.push_back({(p.position - centre) * s, p.normal});
    std::vector<Vec3> pos;
    pos.reserve(pts.size());
    for (auto const& p : pts)
        pos.push_back(p.position);
    KdTree tree(std::move(pos));

    double half = 0.5 * side * s;
    std::vector<Cube> level{{Box3(Vec3::Constant(-half), Vec3::Constant(half)), 0}};

    LocalImplicitRep rep;
    rep.kind = RepKind::OctreeBased;
    MpuStats local_stats;
    local_stats.scale = s;

    while (!level.empty())
    {
        std::vector<CubeOutcome> results(level.size());
        parallel_for(level.size(), [&](std::size_t i) {
            results[i] = process_cube(level[i], pts, tree, params);
        });

        std::vector<Cube> next;
        for (std::size_t i = 0; i < level.size(); ++i)
        {
            auto& r = results[i];
            local_stats.failures += r.failed ? 1 : 0;
            if (!r.accept)
            {
                Box3 const& b = level[i].box;
                Vec3 mid = b.center();
                for (int oct = 0; oct < 8; ++oct)
                {
                    Vec3 lo, hi;
                    for (int a = 0; a < 3; ++a)
                    {
                        bool upper = (oct >> a) & 1;
                        lo[a] = upper ? mid[a] : b.min[a];
                        hi[a] = upper ? b.max[a] : mid[a];
                    }
                    next.push_back({Box3(lo, hi), level[i].depth + 1});
                }
                continue;
            }
            Box3 world(centre + level[i].box.min / s, centre + level[i].box.max / s);
            rep.patches.push_back({world, unscale(r.fit->procedure, centre, s)});
            r.record.cube = world;
            if (r.record.support_points > 0)
                local_stats.max_taubin_error
                    = std::max(local_stats.max_taubin_error, r.record.taubin_error);
            local_stats.flagged += r.record.flagged ? 1 : 0;
            local_stats.cubes.push_back(r.record);
        }
        level = std::move(next);
    }

    Vec3 h = Vec3::Constant(0.5 * side);
    rep.bound = Box3(centre - h, centre + h);
    if (stats)
        *stats = std::move(local_stats);
    return rep;
}

}  // namespace sweptvol
