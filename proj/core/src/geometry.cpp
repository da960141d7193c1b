#include "sweptvol/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sweptvol {

Box3::Box3(Vec3 const& lo, Vec3 const& hi) : min(lo), max(hi)
{
    if (!lo.allFinite() || !hi.allFinite())
        throw InvalidInput("Box3: non-finite corner");
    if ((lo.array() > hi.array()).any())
        throw InvalidInput("Box3: min must not exceed max");
}

Box3 Box3::empty()
{
    Box3 b;
    b.min = Vec3::Constant(std::numeric_limits<double>::infinity());
    b.max = Vec3::Constant(-std::numeric_limits<double>::infinity());
    return b;
}

bool Box3::contains(Vec3 const& p) const
{
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
}

bool Box3::intersects(Box3 const& other) const
{
    return (min.array() <= other.max.array()).all()
           && (other.min.array() <= max.array()).all();
}

double Box3::volume() const
{
    if (is_empty())
        return 0.0;
    Vec3 e = extents();
    return e.x() * e.y() * e.z();
}

double Box3::surface_area() const
{
    if (is_empty())
        return 0.0;
    Vec3 e = extents();
    return 2.0 * (e.x() * e.y() + e.y() * e.z() + e.z() * e.x());
}

void Box3::expand(Vec3 const& p)
{
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
}

void Box3::expand(Box3 const& b)
{
    if (b.is_empty())
        return;
    min = min.cwiseMin(b.min);
    max = max.cwiseMax(b.max);
}

Box3 Box3::inflated(double margin) const
{
    Box3 b = *this;
    b.min.array() -= margin;
    b.max.array() += margin;
    return b;
}

Vec3 Box3::closest_point(Vec3 const& p) const
{
    return p.cwiseMax(min).cwiseMin(max);
}

double Box3::distance(Vec3 const& p) const
{
    return (p - closest_point(p)).norm();
}

double Box3::distance(Box3 const& other) const
{
    Vec3 gap = (other.min - max).cwiseMax(min - other.max).cwiseMax(0.0);
    return gap.norm();
}

std::array<Vec3, 8> Box3::corners() const
{
    std::array<Vec3, 8> c;
    for (int i = 0; i < 8; ++i)
    {
        c[i] = Vec3(i & 1 ? max.x() : min.x(),
                    i & 2 ? max.y() : min.y(),
                    i & 4 ? max.z() : min.z());
    }
    return c;
}

//---------------------------------------------------------------------------//

Ball3::Ball3(Vec3 const& c, double r) : centre(c), radius(r)
{
    if (!c.allFinite() || !std::isfinite(r))
        throw InvalidInput("Ball3: non-finite centre or radius");
    if (!(r > 0))
        throw InvalidInput("Ball3: radius must be positive");
}

Box3 Ball3::bounding_box() const
{
    Box3 b;
    b.min = centre.array() - radius;
    b.max = centre.array() + radius;
    return b;
}

//---------------------------------------------------------------------------//

Vec3 AffineFace::normal() const
{
    Vec3 n = Vec3::Zero();
    n[axis] = sigma;
    return n;
}

AffineFace face_function(Box3 const& box, int k, int sigma)
{
    if (k < 1 || k > 3 || (sigma != 1 && sigma != -1))
        throw InvalidInput("face_function: k in {1,2,3}, sigma in {-1,+1}");
    AffineFace f;
    f.axis = k - 1;
    f.sigma = sigma;
    // d = Q.n for a point Q on the face
    f.offset = sigma > 0 ? box.max[f.axis] : -box.min[f.axis];
    return f;
}

std::array<AffineFace, 6> signed_face_functions(Box3 const& box)
{
    std::array<AffineFace, 6> faces;
    for (int k = 1; k <= 3; ++k)
    {
        faces[2 * (k - 1)] = face_function(box, k, -1);
        faces[2 * (k - 1) + 1] = face_function(box, k, +1);
    }
    return faces;
}

//---------------------------------------------------------------------------//

Ray::Ray(Vec3 const& o, Vec3 const& d) : origin(o), direction(d)
{
    if (!o.allFinite() || !d.allFinite())
        throw InvalidInput("Ray: non-finite origin or direction");
    if (std::abs(d.norm() - 1.0) > 1e-9)
        throw InvalidInput("Ray: direction must be a unit vector");
}

std::optional<std::array<double, 2>> clip_ray(Ray const& ray, Box3 const& box)
{
    double s0 = 0.0;
    double s1 = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a)
    {
        double o = ray.origin[a];
        double d = ray.direction[a];
        if (d == 0.0)
        {
            if (o < box.min[a] || o > box.max[a])
                return std::nullopt;
            continue;
        }
        double inv = 1.0 / d;
        double ta = (box.min[a] - o) * inv;
        double tb = (box.max[a] - o) * inv;
        if (ta > tb)
            std::swap(ta, tb);
        s0 = std::max(s0, ta);
        s1 = std::min(s1, tb);
        if (s0 > s1)
            return std::nullopt;
    }
    return std::array<double, 2>{s0, s1};
}

std::optional<std::array<double, 2>> clip_ray(Ray const& ray, Ball3 const& ball)
{
    Vec3 oc = ray.origin - ball.centre;
    double b = oc.dot(ray.direction);
    double c = oc.squaredNorm() - ball.radius * ball.radius;
    double disc = b * b - c;
    if (disc < 0)
        return std::nullopt;
    double sq = std::sqrt(disc);
    double s0 = -b - sq;
    double s1 = -b + sq;
    if (s1 < 0)
        return std::nullopt;
    return std::array<double, 2>{std::max(s0, 0.0), s1};
}

double segment_point_distance(Vec3 const& a, Vec3 const& b, Vec3 const& p)
{
    Vec3 ab = b - a;
    double len2 = ab.squaredNorm();
    double s = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (a + s * ab - p).norm();
}

double segment_box_distance(Vec3 const& a, Vec3 const& b, Box3 const& box)
{
    // Squared distance along the segment is piecewise quadratic with breaks
    // where the segment crosses the slab planes; minimise each piece exactly.
    Vec3 d = b - a;
    std::array<double, 8> breaks{};
    int nb = 0;
    breaks[nb++] = 0.0;
    breaks[nb++] = 1.0;
    for (int k = 0; k < 3; ++k)
    {
        if (d[k] == 0.0)
            continue;
        for (double plane : {box.min[k], box.max[k]})
        {
            double s = (plane - a[k]) / d[k];
            if (s > 0.0 && s < 1.0 && nb < 8)
                breaks[nb++] = s;
        }
    }
    std::sort(breaks.begin(), breaks.begin() + nb);

    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < nb; ++i)
    {
        double s0 = breaks[i];
        double s1 = breaks[i + 1];
        Vec3 mid = a + 0.5 * (s0 + s1) * d;
        // Accumulate q(s) = A s^2 + B s + C over the clamped axes.
        double qa = 0.0, qb = 0.0, qc = 0.0;
        for (int k = 0; k < 3; ++k)
        {
            double target;
            if (mid[k] < box.min[k])
                target = box.min[k];
            else if (mid[k] > box.max[k])
                target = box.max[k];
            else
                continue;
            double off = a[k] - target;
            qa += d[k] * d[k];
            qb += 2.0 * off * d[k];
            qc += off * off;
        }
        auto q = [&](double s) { return (qa * s + qb) * s + qc; };
        double m = std::min(q(s0), q(s1));
        if (qa > 0.0)
        {
            double s = -qb / (2.0 * qa);
            if (s > s0 && s < s1)
                m = std::min(m, q(s));
        }
        best = std::min(best, m);
    }
    return std::sqrt(std::max(best, 0.0));
}

}  // namespace sweptvol
