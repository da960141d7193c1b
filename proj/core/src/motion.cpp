#include "sweptvol/motion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sweptvol {

namespace {

double horner(std::vector<double> const& c, double s)
{
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it)
        v = v * s + *it;
    return v;
}

std::vector<double> differentiate(std::vector<double> const& c)
{
    if (c.size() <= 1)
        return {0.0};
    std::vector<double> d(c.size() - 1);
    for (std::size_t j = 1; j < c.size(); ++j)
        d[j - 1] = c[j] * static_cast<double>(j);
    return d;
}

double bisect_monotone(std::vector<double> const& c, double lo, double hi)
{
    double flo = horner(c, lo);
    for (int it = 0; it < 200 && hi - lo > 0; ++it)
    {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        double fm = horner(c, mid);
        if ((fm <= 0) == (flo <= 0) && fm != 0)
        {
            lo = mid;
            flo = fm;
        }
        else
        {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> polynomial_roots(std::vector<double> const& coeffs, double lo, double hi)
{
    std::vector<double> c = coeffs;
    while (c.size() > 1 && c.back() == 0.0)
        c.pop_back();
    std::vector<double> roots;
    if (c.size() <= 1 || lo > hi)
        return roots;
    if (c.size() == 2)
    {
        double r = -c[0] / c[1];
        if (r >= lo && r <= hi)
            roots.push_back(r);
        return roots;
    }
    // Split at critical points into monotone pieces; each holds <= 1 root.
    std::vector<double> cuts{lo};
    for (double r : polynomial_roots(differentiate(c), lo, hi))
    {
        if (r > cuts.back())
            cuts.push_back(r);
    }
    if (hi > cuts.back())
        cuts.push_back(hi);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    {
        double a = cuts[i], b = cuts[i + 1];
        double fa = horner(c, a), fb = horner(c, b);
        double r;
        if (fa == 0.0)
            r = a;
        else if (fb == 0.0)
            r = b;
        else if ((fa < 0) != (fb < 0))
            r = bisect_monotone(c, a, b);
        else
            continue;
        if (roots.empty() || r > roots.back())
            roots.push_back(r);
    }
    return roots;
}

//---------------------------------------------------------------------------//

PiecewisePoly::PiecewisePoly(std::vector<double> knots, std::vector<std::vector<double>> coeffs)
    : knots_(std::move(knots)), coeffs_(std::move(coeffs))
{
    if (coeffs_.empty() || knots_.size() != coeffs_.size() + 1)
        throw InvalidInput("PiecewisePoly: need at least one segment and one more knot than segments");
    bool degenerate = coeffs_.size() == 1 && knots_[0] == knots_[1];
    for (std::size_t k = 0; k + 1 < knots_.size(); ++k)
    {
        if (!std::isfinite(knots_[k]) || !std::isfinite(knots_[k + 1]))
            throw InvalidInput("PiecewisePoly: non-finite knot");
        if (!(knots_[k] < knots_[k + 1]) && !degenerate)
            throw InvalidInput("PiecewisePoly: knots must be strictly increasing");
    }
    for (auto& c : coeffs_)
    {
        if (c.empty())
            c.push_back(0.0);
        if (c.size() > max_degree + 1)
            throw InvalidInput("PiecewisePoly: degree exceeds 5");
        for (double x : c)
        {
            if (!std::isfinite(x))
                throw InvalidInput("PiecewisePoly: non-finite coefficient");
        }
    }
    for (std::size_t k = 0; k + 1 < coeffs_.size(); ++k)
    {
        double end = horner(coeffs_[k], knots_[k + 1] - knots_[k]);
        double start = coeffs_[k + 1][0];
        if (std::abs(end - start) > 1e-9 * std::max(1.0, std::abs(start)))
            throw InvalidInput("PiecewisePoly: discontinuous at knot " + std::to_string(k + 1));
    }
}

PiecewisePoly PiecewisePoly::constant(double a, double b, double value)
{
    return PiecewisePoly({a, b}, {{value}});
}

PiecewisePoly PiecewisePoly::linear(double a, double b, double v0, double v1)
{
    double slope = b > a ? (v1 - v0) / (b - a) : 0.0;
    return PiecewisePoly({a, b}, {{v0, slope}});
}

std::size_t PiecewisePoly::segment_of(double t) const
{
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    auto k = static_cast<std::ptrdiff_t>(it - knots_.begin()) - 1;
    k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(coeffs_.size()) - 1);
    return static_cast<std::size_t>(k);
}

double PiecewisePoly::operator()(double t) const
{
    auto k = segment_of(t);
    return horner(coeffs_[k], t - knots_[k]);
}

PiecewisePoly PiecewisePoly::derivative() const
{
    PiecewisePoly d;
    d.knots_ = knots_;
    d.coeffs_.reserve(coeffs_.size());
    for (auto const& c : coeffs_)
        d.coeffs_.push_back(differentiate(c));
    return d;
}

double PiecewisePoly::abs_bound(double t0, double t1) const
{
    double bound = 0.0;
    for (std::size_t k = 0; k < coeffs_.size(); ++k)
    {
        double lo = std::max(t0, knots_[k]);
        double hi = std::min(t1, knots_[k + 1]);
        if (lo > hi)
            continue;
        double h = std::max(std::abs(lo - knots_[k]), std::abs(hi - knots_[k]));
        double s = 0.0;
        double hp = 1.0;
        for (double c : coeffs_[k])
        {
            s += std::abs(c) * hp;
            hp *= h;
        }
        bound = std::max(bound, s);
    }
    return bound;
}

std::pair<double, double> PiecewisePoly::range(double t0, double t1) const
{
    double mn = std::numeric_limits<double>::infinity();
    double mx = -mn;
    auto take = [&](double v) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    };
    for (std::size_t k = 0; k < coeffs_.size(); ++k)
    {
        double lo = std::max(t0, knots_[k]);
        double hi = std::min(t1, knots_[k + 1]);
        if (lo > hi)
            continue;
        auto const& c = coeffs_[k];
        double base = knots_[k];
        take(horner(c, lo - base));
        take(horner(c, hi - base));
        for (double s : polynomial_roots(differentiate(c), lo - base, hi - base))
            take(horner(c, s));
    }
    return {mn, mx};
}

//---------------------------------------------------------------------------//

Mat3 euler_rotation(double alpha, double beta, double gamma)
{
    double ca = std::cos(alpha), sa = std::sin(alpha);
    double cb = std::cos(beta), sb = std::sin(beta);
    double cg = std::cos(gamma), sg = std::sin(gamma);
    Mat3 rx, ry, rz;
    rx << 1, 0, 0, 0, ca, -sa, 0, sa, ca;
    ry << cb, 0, -sb, 0, 1, 0, sb, 0, cb;
    rz << cg, -sg, 0, sg, cg, 0, 0, 0, 1;
    return rx * ry * rz;
}

RigidMotion::RigidMotion(double a, double b, std::array<PiecewisePoly, 3> translation,
                         std::array<PiecewisePoly, 3> angles)
    : a_(a), b_(b), v_(std::move(translation)), angles_(std::move(angles))
{
    if (!std::isfinite(a) || !std::isfinite(b) || a > b)
        throw InvalidInput("RigidMotion: domain must be a finite interval [a, b] with a <= b");
    auto check = [&](PiecewisePoly const& p, char const* name) {
        if (p.segments() == 0)
            throw InvalidInput(std::string("RigidMotion: missing component ") + name);
        double tol = 1e-12 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
        if (std::abs(p.lower() - a) > tol || std::abs(p.upper() - b) > tol)
            throw InvalidInput(std::string("RigidMotion: component ") + name
                               + " is not defined on exactly [a, b]");
    };
    char const* names[] = {"vx", "vy", "vz", "alpha", "beta", "gamma"};
    for (int i = 0; i < 3; ++i)
    {
        check(v_[i], names[i]);
        check(angles_[i], names[3 + i]);
        dv_[i] = v_[i].derivative();
        dangles_[i] = angles_[i].derivative();
    }
}

RigidMotion RigidMotion::constant(double a, double b, Vec3 const& translation, Vec3 const& angles)
{
    return RigidMotion(a, b,
                       {PiecewisePoly::constant(a, b, translation.x()),
                        PiecewisePoly::constant(a, b, translation.y()),
                        PiecewisePoly::constant(a, b, translation.z())},
                       {PiecewisePoly::constant(a, b, angles.x()),
                        PiecewisePoly::constant(a, b, angles.y()),
                        PiecewisePoly::constant(a, b, angles.z())});
}

void RigidMotion::check_time(double t) const
{
    if (!(t >= a_ && t <= b_))
        throw DomainError("time " + std::to_string(t) + " outside motion domain ["
                          + std::to_string(a_) + ", " + std::to_string(b_) + "]");
}

Isometry RigidMotion::at(double t) const
{
    check_time(t);
    Isometry iso;
    iso.rotation = euler_rotation(angles_[0](t), angles_[1](t), angles_[2](t));
    iso.translation = Vec3(v_[0](t), v_[1](t), v_[2](t));
    return iso;
}

double RigidMotion::speed_bound(double t0, double t1, double r) const
{
    check_time(t0);
    check_time(t1);
    if (t0 > t1)
        throw DomainError("speed_bound: empty interval");
    if (r < 0)
        throw InvalidInput("speed_bound: negative radius");
    double lin2 = 0.0;
    double ang = 0.0;
    for (int i = 0; i < 3; ++i)
    {
        double b = dv_[i].abs_bound(t0, t1);
        lin2 += b * b;
        ang += dangles_[i].abs_bound(t0, t1);
    }
    return std::sqrt(lin2) + r * ang;
}

Isometry eval_motion(RigidMotion const& motion, double t)
{
    return motion.at(t);
}

Vec3 inverse_apply(RigidMotion const& motion, double t, Vec3 const& p)
{
    return motion.inverse_apply(t, p);
}

double motion_speed_bound(RigidMotion const& motion, double t0, double t1, double r)
{
    return motion.speed_bound(t0, t1, r);
}

std::pair<LocalImplicitRep, RigidMotion> capsule_example()
{
    double const r = std::sqrt(2.0);
    LocalImplicitRep rep;
    rep.kind = RepKind::BallCover;
    rep.patches.push_back({Ball3(Vec3(-2, 0, 0), r),
                           Quadric3({0, 1, 1, 0, 0, 0, -1, 0, 0, -2})});
    rep.patches.push_back({Ball3(Vec3(0, 0, 0), r),
                           Quadric3({0, 1, 1, 0, 0, 0, 0, 0, 0, -1})});
    rep.patches.push_back({Ball3(Vec3(2, 0, 0), r),
                           Quadric3({0, 1, 1, 0, 0, 0, 1, 0, 0, -2})});
    rep.bound = areas_bounding_box(rep.patches);

    RigidMotion motion(0.0, 1.0,
                       {PiecewisePoly::constant(0, 1, 0.0), PiecewisePoly::linear(0, 1, 0.0, 16.0),
                        PiecewisePoly::constant(0, 1, 0.0)},
                       {PiecewisePoly::constant(0, 1, 0.0),
                        PiecewisePoly::linear(0, 1, 0.0, std::numbers::pi),
                        PiecewisePoly::constant(0, 1, 0.0)});
    return {std::move(rep), std::move(motion)};
}

}  // namespace sweptvol
