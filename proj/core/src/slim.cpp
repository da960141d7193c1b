#include "sweptvol/slim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sweptvol/parallel.hpp"
#include "sweptvol/solvers.hpp"

namespace sweptvol {

void SlimParams::validate() const
{
    if (!(g > 0 && g < 1))
        throw InvalidInput("SlimParams: g must lie in (0, 1)");
    if (!(rho0_fraction > 0))
        throw InvalidInput("SlimParams: rho0_fraction must be positive");
    if (!(t_mdl >= 0))
        throw InvalidInput("SlimParams: t_mdl must be non-negative");
}

double bump_weight(double r, double radius)
{
    double x = r / radius;
    if (!(std::abs(x) < 1.0))
        return 0.0;
    return std::exp(-1.0 / (1.0 - x * x));
}

std::vector<Ball3> cover_with_balls(std::span<Vec3 const> points, double radius,
                                    std::uint64_t seed)
{
    if (points.empty())
        throw InvalidInput("cover_with_balls: no points");
    if (!(radius > 0))
        throw InvalidInput("cover_with_balls: radius must be positive");
    KdTree tree(std::vector<Vec3>(points.begin(), points.end()));
    std::mt19937_64 rng(seed);

    std::vector<std::uint32_t> uncovered(points.size());
    for (std::uint32_t i = 0; i < uncovered.size(); ++i)
        uncovered[i] = i;
    std::vector<char> covered(points.size(), 0);
    std::vector<Ball3> balls;
    while (!uncovered.empty())
    {
        std::uniform_int_distribution<std::size_t> pick(0, uncovered.size() - 1);
        Vec3 c = points[uncovered[pick(rng)]];
        balls.emplace_back(c, radius);
        for (auto i : tree.radius_search(c, radius))
            covered[i] = 1;
        std::erase_if(uncovered, [&](std::uint32_t i) { return covered[i] != 0; });
    }
    return balls;
}

double compute_lambda(OrientedPointCloud const& cloud)
{
    if (cloud.size() < 11)
        throw InvalidInput("compute_lambda: need at least 11 points");
    KdTree tree(cloud.positions());
    std::vector<double> mins(cloud.size());
    parallel_for(cloud.size(), [&](std::size_t i) {
        auto nn = tree.knn(cloud.position(i), 10, static_cast<std::int64_t>(i));
        std::array<Vec3, 11> pts;
        pts[0] = cloud.position(i);
        for (std::size_t j = 0; j < 10; ++j)
            pts[j + 1] = tree.point(nn[j].index);
        Vec3 mean = Vec3::Zero();
        for (auto const& p : pts)
            mean += p;
        mean /= 11.0;
        Mat3 cov = Mat3::Zero();
        for (auto const& p : pts)
            cov += (p - mean) * (p - mean).transpose();
        cov /= 10.0;
        mins[i] = std::max(0.0, min_eigenvalue_sym3(cov));
    });
    double sum = 0.0;
    for (double m : mins)
        sum += m;
    return sum / static_cast<double>(mins.size());
}

namespace {

struct FitOutcome
{
    BivariatePatch patch;
    bool degraded = false;
};

//! Bump-weighted fit on the points of `cloud` inside `ball`; `idx` lists them.
FitOutcome fit_in_ball(Ball3 const& ball, OrientedPointCloud const& cloud,
                       std::vector<std::uint32_t> const& idx, Vec3 const& fallback_normal)
{
    FitOutcome out;
    Vec3 n = Vec3::Zero();
    for (auto i : idx)
        n += cloud.normal(i);
    if (n.norm() < 1e-12)
    {
        n = fallback_normal;
        out.degraded = true;
    }
    out.patch = BivariatePatch::from_normal(ball.centre, n.normalized());

    double inv_r = 1.0 / ball.radius;
    NormalEquations ne(6);
    double wsum = 0.0;
    for (auto i : idx)
        wsum += bump_weight((cloud.position(i) - ball.centre).norm(), ball.radius);
    bool uniform = !(wsum > 0);
    for (auto i : idx)
    {
        Vec3 l = out.patch.local(cloud.position(i));
        double u = l.x() * inv_r, v = l.y() * inv_r;
        double w = uniform ? 1.0 : bump_weight((cloud.position(i) - ball.centre).norm(), ball.radius);
        std::array<double, 6> basis{u * u, u * v, v * v, u, v, 1.0};
        ne.add(basis, w, l.z());
    }
    if (idx.empty())
    {
        out.degraded = true;
        return out;
    }
    auto sol = ne.solve();
    double r2 = inv_r * inv_r;
    out.patch.set_coefficients({sol.coeffs(0) * r2, sol.coeffs(1) * r2, sol.coeffs(2) * r2,
                                sol.coeffs(3) * inv_r, sol.coeffs(4) * inv_r, sol.coeffs(5)});
    out.degraded |= sol.degraded || uniform || idx.size() < 6;
    return out;
}

double epsilon_sum(BivariatePatch const& patch, OrientedPointCloud const& cloud,
                   KdTree const& tree, Vec3 const& c, double rho)
{
    double e = 0.0;
    for (auto i : tree.radius_search(c, rho))
    {
        double f = patch(cloud.position(i));
        e += f * f;
    }
    return e;
}

}  // namespace

BivariatePatch slim_fit(Ball3 const& ball, OrientedPointCloud const& cloud)
{
    std::vector<std::uint32_t> idx;
    for (std::uint32_t i = 0; i < cloud.size(); ++i)
    {
        if (ball.contains(cloud.position(i)))
            idx.push_back(i);
    }
    if (idx.size() < 6)
        throw InvalidInput("slim_fit: fewer than 6 points in the ball, fit is underdetermined");
    Vec3 n = Vec3::Zero();
    for (auto i : idx)
        n += cloud.normal(i);
    if (n.norm() < 1e-12 * static_cast<double>(idx.size()))
        throw InvalidInput("slim_fit: mean normal vanishes, no frame");
    return fit_in_ball(ball, cloud, idx, Vec3::UnitZ()).patch;
}

Rankings rankings(Ball3 const& ball, BivariatePatch const& patch, OrientedPointCloud const& cloud,
                  double rho, double lambda, double t_mdl)
{
    if (!(rho > 0))
        throw InvalidInput("rankings: rho must be positive");
    Rankings r;
    double rho2 = rho * rho;
    for (auto const& p : cloud.points())
    {
        if ((p.position - ball.centre).squaredNorm() <= rho2)
        {
            double f = patch(p.position);
            r.epsilon += f * f;
        }
    }
    r.E = r.epsilon + lambda * (t_mdl / rho) * (t_mdl / rho);
    return r;
}

bool slim_double_condition(std::array<double, 3> const& eps, std::array<double, 3> const& E)
{
    // index 0: rho_{k-1}, 1: rho_k, 2: rho_{k+1}
    return E[2] > E[1] && E[1] < E[0] && eps[2] < eps[1] && eps[1] < eps[0];
}

//---------------------------------------------------------------------------//

LocalImplicitRep slim_build(OrientedPointCloud const& cloud, SlimParams const& params,
                            SlimStats* stats)
{
    params.validate();
    if (cloud.size() == 0)
        throw InvalidInput("slim_build: empty cloud");

    double diag = cloud.bounding_box().diagonal();
    double scale = diag > 0 ? diag : 1.0;
    double rho0 = params.rho0_fraction * scale;
    double t_mdl = params.t_mdl * scale;
    double lambda = cloud.size() >= 11 ? compute_lambda(cloud) : 0.0;
    double floor_rho = 1e-6 * rho0;

    KdTree tree(cloud.positions());
    auto all_positions = cloud.positions();

    LocalImplicitRep rep;
    rep.kind = RepKind::BallCover;
    SlimStats st;
    st.rho0 = rho0;
    st.lambda = lambda;
    st.t_mdl = t_mdl;

    auto fit_balls = [&](std::vector<Ball3> const& balls) {
        std::vector<FitOutcome> fits(balls.size());
        parallel_for(balls.size(), [&](std::size_t b) {
            auto idx = tree.radius_search(balls[b].centre, balls[b].radius);
            Vec3 fallback = cloud.normal(tree.nearest(balls[b].centre));
            fits[b] = fit_in_ball(balls[b], cloud, idx, fallback);
        });
        return fits;
    };

    if (params.levels_kept)
    {
        auto balls = cover_with_balls(all_positions, rho0, params.rng_seed);
        auto fits = fit_balls(balls);
        rep.levels.emplace_back();
        for (std::size_t b = 0; b < balls.size(); ++b)
            rep.levels.back().push_back({balls[b], fits[b].patch});
    }

    std::vector<std::uint32_t> uncovered(cloud.size());
    for (std::uint32_t i = 0; i < uncovered.size(); ++i)
        uncovered[i] = i;
    std::vector<char> covered(cloud.size(), 0);

    for (int k = 1; !uncovered.empty(); ++k)
    {
        double rho_prev = rho0 * std::pow(params.g, k - 1);
        double rho = rho0 * std::pow(params.g, k);
        double rho_next = rho0 * std::pow(params.g, k + 1);
        bool forced = rho < floor_rho;
        st.levels = k;

        std::vector<Vec3> upts;
        upts.reserve(uncovered.size());
        for (auto i : uncovered)
            upts.push_back(cloud.position(i));
        auto balls = cover_with_balls(upts, rho, params.rng_seed + static_cast<std::uint64_t>(k));
        auto fits = fit_balls(balls);

        std::vector<SlimAcceptance> decisions(balls.size());
        parallel_for(balls.size(), [&](std::size_t b) {
            auto const& c = balls[b].centre;
            auto const& patch = fits[b].patch;
            auto& d = decisions[b];
            std::array<double, 3> radii{rho_prev, rho, rho_next};
            for (int j = 0; j < 3; ++j)
            {
                d.epsilon[j] = epsilon_sum(patch, cloud, tree, c, radii[j]);
                d.E[j] = d.epsilon[j] + lambda * (t_mdl / radii[j]) * (t_mdl / radii[j]);
            }
        });

        if (params.levels_kept)
            rep.levels.emplace_back();
        for (std::size_t b = 0; b < balls.size(); ++b)
        {
            auto& d = decisions[b];
            bool ok = slim_double_condition(d.epsilon, d.E);
            if (!ok && !forced)
            {
                if (params.levels_kept)
                    rep.levels.back().push_back({balls[b], fits[b].patch});
                continue;
            }
            d.patch_index = rep.patches.size();
            d.level = k;
            d.rho = rho;
            d.forced = !ok;
            d.degraded = fits[b].degraded;
            rep.patches.push_back({balls[b], fits[b].patch});
            for (auto i : tree.radius_search(balls[b].centre, rho))
                covered[i] = 1;
            st.forced += d.forced ? 1 : 0;
            st.degraded += d.degraded ? 1 : 0;
            st.accepted.push_back(d);
        }
        std::erase_if(uncovered, [&](std::uint32_t i) { return covered[i] != 0; });
    }

    rep.bound = areas_bounding_box(rep.patches);
    rep.fallback_cloud = std::make_shared<OrientedPointCloud const>(cloud);
    if (stats)
        *stats = std::move(st);
    return rep;
}

std::vector<LocalPatch> slim_level_patches(LocalImplicitRep const& rep, SlimStats const& stats,
                                           int k)
{
    std::vector<LocalPatch> out;
    for (auto const& a : stats.accepted)
    {
        if (a.level <= k)
            out.push_back(rep.patches[a.patch_index]);
    }
    if (k >= 0 && static_cast<std::size_t>(k) < rep.levels.size())
        out.insert(out.end(), rep.levels[k].begin(), rep.levels[k].end());
    return out;
}

//---------------------------------------------------------------------------//

namespace {

std::vector<Vec3> ball_centres(std::vector<LocalPatch> const& patches)
{
    std::vector<Vec3> c;
    c.reserve(patches.size());
    for (auto const& p : patches)
    {
        auto const* ball = std::get_if<Ball3>(&p.area);
        if (!ball)
            throw InvalidInput("SlimEvaluator: every area must be a ball");
        c.push_back(ball->centre);
    }
    return c;
}

}  // namespace

SlimEvaluator::SlimEvaluator(LocalImplicitRep const& rep)
    : SlimEvaluator(rep.patches, rep.fallback_cloud)
{
}

SlimEvaluator::SlimEvaluator(std::vector<LocalPatch> const& patches,
                             std::shared_ptr<OrientedPointCloud const> fallback)
    : patches_(&patches), fallback_(std::move(fallback)), centres_(ball_centres(patches))
{
    for (auto const& p : patches)
        max_radius_ = std::max(max_radius_, std::get<Ball3>(p.area).radius);
    if (fallback_)
        fallback_tree_ = KdTree(fallback_->positions());
}

BlendResult SlimEvaluator::eval(Vec3 const& q) const
{
    double num = 0.0, den = 0.0;
    if (!patches_->empty())
    {
        for (auto i : centres_.radius_search(q, max_radius_))
        {
            auto const& patch = (*patches_)[i];
            auto const& ball = std::get<Ball3>(patch.area);
            double w = bump_weight((q - ball.centre).norm(), ball.radius);
            if (w <= 0)
                continue;
            num += w * eval_procedure(patch.procedure, q);
            den += w;
        }
    }
    if (den > 0)
        return {num / den, true};

    BlendResult out;
    if (!fallback_ || fallback_->size() == 0)
    {
        out.value = std::numeric_limits<double>::infinity();
        return out;
    }
    auto const& p = (*fallback_)[fallback_tree_.nearest(q)];
    double dist = (q - p.position).norm();
    out.value = p.normal.dot(q - p.position) < 0 ? -dist : dist;
    return out;
}

std::optional<double> patch_ray_root(BivariatePatch const& patch, Ray const& ray, double s0,
                                     double s1)
{
    Vec3 o = patch.local(ray.origin);
    Vec3 d(ray.direction.dot(patch.u), ray.direction.dot(patch.v), ray.direction.dot(patch.n));
    double u0 = o.x(), v0 = o.y(), w0 = o.z();
    double du = d.x(), dv = d.y(), dw = d.z();
    double a = -(patch.c20 * du * du + patch.c11 * du * dv + patch.c02 * dv * dv);
    double b = dw
               - (2 * patch.c20 * u0 * du + patch.c11 * (u0 * dv + v0 * du)
                  + 2 * patch.c02 * v0 * dv + patch.c10 * du + patch.c01 * dv);
    double c = w0 - patch.height(u0, v0);

    std::vector<double> roots;
    double scale = std::max({std::abs(a), std::abs(b), std::abs(c), 1e-300});
    if (std::abs(a) <= 1e-14 * scale)
    {
        if (b != 0)
            roots.push_back(-c / b);
    }
    else
    {
        double disc = b * b - 4 * a * c;
        if (disc >= 0)
        {
            double sq = std::sqrt(disc);
            double q = -0.5 * (b + (b >= 0 ? sq : -sq));
            roots.push_back(q / a);
            if (q != 0)
                roots.push_back(c / q);
        }
    }
    std::optional<double> best;
    for (double r : roots)
    {
        if (r >= s0 && r <= s1 && (!best || r < *best))
            best = r;
    }
    return best;
}

std::optional<Vec3> SlimEvaluator::ray_intersect(Ray const& ray) const
{
    struct Hit
    {
        std::size_t index;
        double s0, s1;
    };
    std::vector<Hit> hits;
    for (std::size_t i = 0; i < patches_->size(); ++i)
    {
        auto span = clip_ray(ray, std::get<Ball3>((*patches_)[i].area));
        if (span)
            hits.push_back({i, (*span)[0], (*span)[1]});
    }
    if (hits.empty())
        return std::nullopt;
    auto first = *std::min_element(hits.begin(), hits.end(), [](Hit const& a, Hit const& b) {
        return a.s0 < b.s0 || (a.s0 == b.s0 && a.index < b.index);
    });

    Vec3 num = Vec3::Zero();
    double den = 0.0;
    for (auto const& h : hits)
    {
        if (h.s1 < first.s0 || h.s0 > first.s1)
            continue;
        auto const& patch = (*patches_)[h.index];
        auto const* bp = std::get_if<BivariatePatch>(&patch.procedure);
        if (!bp)
            continue;
        auto s = patch_ray_root(*bp, ray, h.s0, h.s1);
        if (!s)
            continue;
        Vec3 q = ray.at(*s);
        auto const& ball = std::get<Ball3>(patch.area);
        double w = bump_weight((q - ball.centre).norm(), ball.radius);
        num += w * q;
        den += w;
    }
    if (!(den > 0))
        return std::nullopt;
    return Vec3(num / den);
}

BlendResult blended_eval(LocalImplicitRep const& rep, Vec3 const& q)
{
    return SlimEvaluator(rep).eval(q);
}

std::optional<Vec3> slim_ray_intersect(LocalImplicitRep const& rep, Ray const& ray)
{
    return SlimEvaluator(rep).ray_intersect(ray);
}

}  // namespace sweptvol
