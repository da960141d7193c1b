#include "sweptvol/contact.hpp"

#include <algorithm>
#include <cmath>

namespace sweptvol {

std::vector<TimeInterval> merge_intervals(std::vector<TimeInterval> v, double gap)
{
    std::sort(v.begin(), v.end(), [](TimeInterval const& a, TimeInterval const& b) {
        return a.t0 < b.t0 || (a.t0 == b.t0 && a.t1 < b.t1);
    });
    std::vector<TimeInterval> out;
    for (auto const& iv : v)
    {
        if (!out.empty() && iv.t0 <= out.back().t1 + gap)
            out.back().t1 = std::max(out.back().t1, iv.t1);
        else
            out.push_back(iv);
    }
    return out;
}

//---------------------------------------------------------------------------//

SphereBoxCase classify_sphere_box(Vec3 const& o, Box3 const& box)
{
    SphereBoxCase c;
    double sq = 0.0;
    int outside = 0;
    double inner = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k)
    {
        double below = box.min[k] - o[k];  // f_{k,-1}
        double above = o[k] - box.max[k];  // f_{k,+1}
        inner = std::max({inner, below, above});
        if (below > 0)
        {
            c.sigma[k] = -1;
            sq += below * below;
            ++outside;
        }
        else if (above > 0)
        {
            c.sigma[k] = 1;
            sq += above * above;
            ++outside;
        }
    }
    switch (outside)
    {
        case 0:
            c.feature = BoxFeature::Inside;
            c.distance = inner;
            break;
        case 1:
            c.feature = BoxFeature::Face;
            c.distance = std::sqrt(sq);
            break;
        case 2:
            c.feature = BoxFeature::Edge;
            c.distance = std::sqrt(sq);
            break;
        default:
            c.feature = BoxFeature::Vertex;
            c.distance = std::sqrt(sq);
            break;
    }
    return c;
}

double sphere_box_gap(Vec3 const& centre, double radius, Box3 const& box, bool fast)
{
    if (fast)
    {
        double m = -std::numeric_limits<double>::infinity();
        for (auto const& f : signed_face_functions(box))
            m = std::max(m, f(centre));
        return m - radius;
    }
    return classify_sphere_box(centre, box).distance - radius;
}

//---------------------------------------------------------------------------//

namespace {

void solve_rec(std::function<double(double)> const& g,
               std::function<double(double, double)> const& lipschitz, double t0, double g0,
               double t1, double g1, double tol, std::vector<TimeInterval>& out)
{
    double h = t1 - t0;
    double lip = lipschitz(t0, t1);
    if (0.5 * (g0 + g1 - lip * h) > 0)
        return;
    if (g0 <= 0 && g1 <= 0)
    {
        out.push_back({t0, t1});
        return;
    }
    double mid = 0.5 * (t0 + t1);
    if (h <= tol || mid <= t0 || mid >= t1)
    {
        out.push_back({t0, t1});
        return;
    }
    double gm = g(mid);
    solve_rec(g, lipschitz, t0, g0, mid, gm, tol, out);
    solve_rec(g, lipschitz, mid, gm, t1, g1, tol, out);
}

double grid_step(RigidMotion const& motion, ContactOptions const& opt)
{
    if (opt.grid < 1)
        throw InvalidInput("contact grid must be at least 1");
    double span = motion.upper() - motion.lower();
    return span > 0 ? span / opt.grid : std::numeric_limits<double>::infinity();
}

}  // namespace

std::vector<TimeInterval> solve_contact_set(std::function<double(double)> const& g,
                                            std::function<double(double, double)> const& lipschitz,
                                            double t0, double t1, double tol, double step)
{
    if (!(tol > 0))
        throw InvalidInput("contact tolerance must be positive");
    if (t1 < t0)
        std::swap(t0, t1);
    std::vector<TimeInterval> raw;
    double g0 = g(t0);
    if (t1 == t0)
    {
        if (g0 <= 0)
            raw.push_back({t0, t1});
        return raw;
    }
    if (!(step > 0))
        throw InvalidInput("contact step must be positive");
    double pieces = std::ceil((t1 - t0) / step);
    auto n = pieces < 1 ? std::size_t(1) : pieces > 1e7 ? std::size_t(1e7) : std::size_t(pieces);
    double a = t0;
    for (std::size_t k = 0; k < n; ++k)
    {
        double b = k + 1 == n ? t1 : t0 + (t1 - t0) * double(k + 1) / double(n);
        double gb = g(b);
        solve_rec(g, lipschitz, a, g0, b, gb, tol, raw);
        a = b;
        g0 = gb;
    }
    return merge_intervals(std::move(raw), 2 * tol);
}

std::vector<TimeInterval> contact_intervals_sphere(Ball3 const& ball, RigidMotion const& motion,
                                                   Box3 const& box, ContactOptions const& opt,
                                                   double t0, double t1)
{
    double r = ball.centre.norm();
    double slack = 1e-12 * (ball.radius + r + box.diagonal() + box.center().norm());
    auto g = [&](double t) {
        return sphere_box_gap(motion.apply(t, ball.centre), ball.radius, box, opt.fast) - slack;
    };
    auto lip = [&](double a, double b) { return motion.speed_bound(a, b, r); };
    return solve_contact_set(g, lip, t0, t1, opt.tol, grid_step(motion, opt));
}

std::vector<TimeInterval> contact_intervals_sphere(Ball3 const& ball, RigidMotion const& motion,
                                                   Box3 const& box, ContactOptions const& opt)
{
    return contact_intervals_sphere(ball, motion, box, opt, motion.lower(), motion.upper());
}

//---------------------------------------------------------------------------//

double box_box_gap(Box3 const& area, Isometry const& iso, Box3 const& cell)
{
    // Oriented box iso^-1(cell): centre, axes (rows of R), half extents.
    Mat3 const& rot = iso.rotation;
    Vec3 b_centre = rot.transpose() * (cell.center() - iso.translation);
    Mat3 b_axes = rot.transpose();  // columns are the cell axes in area space
    Vec3 eb = 0.5 * cell.extents();
    Vec3 ea = 0.5 * area.extents();
    Vec3 d = b_centre - area.center();

    double best = -std::numeric_limits<double>::infinity();
    auto test = [&](Vec3 const& axis) {
        double ra = ea.dot(axis.cwiseAbs());
        double rb = 0.0;
        for (int j = 0; j < 3; ++j)
            rb += eb[j] * std::abs(axis.dot(b_axes.col(j)));
        best = std::max(best, std::abs(axis.dot(d)) - ra - rb);
    };
    for (int i = 0; i < 3; ++i)
    {
        test(Vec3::Unit(i));
        test(b_axes.col(i));
    }
    for (int i = 0; i < 3; ++i)
    {
        for (int j = 0; j < 3; ++j)
        {
            Vec3 axis = Vec3::Unit(i).cross(b_axes.col(j));
            double len = axis.norm();
            if (len < 1e-9)
                continue;
            test(axis / len);
        }
    }
    return best;
}

std::vector<TimeInterval> contact_intervals_box(Box3 const& area, RigidMotion const& motion,
                                                Box3 const& cell, ContactOptions const& opt,
                                                double t0, double t1)
{
    // Every point x of the area satisfies |x| <= r.
    double r = 0.0;
    for (auto const& c : area.corners())
        r = std::max(r, c.norm());
    double slack = 1e-12 * (r + cell.diagonal() + cell.center().norm());
    auto g = [&](double t) { return box_box_gap(area, motion.at(t), cell) - slack; };
    auto lip = [&](double a, double b) { return motion.speed_bound(a, b, r); };
    return solve_contact_set(g, lip, t0, t1, opt.tol, grid_step(motion, opt));
}

std::vector<TimeInterval> contact_intervals_box(Box3 const& area, RigidMotion const& motion,
                                                Box3 const& cell, ContactOptions const& opt)
{
    return contact_intervals_box(area, motion, cell, opt, motion.lower(), motion.upper());
}

}  // namespace sweptvol
