#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "sweptvol/motion.hpp"
#include "sweptvol/point_cloud.hpp"
#include "sweptvol/representation.hpp"

namespace sweptvol::test {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec3 uniform_in(Rng& rng, Box3 const& b)
{
    return {uniform(rng, b.min[0], b.max[0]), uniform(rng, b.min[1], b.max[1]),
            uniform(rng, b.min[2], b.max[2])};
}

inline Vec3 unit_vector(Rng& rng)
{
    std::normal_distribution<double> n;
    Vec3 v;
    do
        v = Vec3(n(rng), n(rng), n(rng));
    while (v.norm() < 1e-6);
    return v.normalized();
}

inline Vec3 in_ball(Rng& rng, Vec3 const& c, double r)
{
    return c + r * std::cbrt(uniform(rng, 0, 1)) * unit_vector(rng);
}

inline Mat3 random_rotation(Rng& rng)
{
    std::normal_distribution<double> n;
    Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
    return q.normalized().toRotationMatrix();
}

//! Spiral points on a sphere with exact outward normals.
inline OrientedPointCloud sphere_cloud(std::size_t n, double radius = 1.0,
                                       Vec3 const& centre = Vec3::Zero())
{
    std::vector<OrientedPoint> pts;
    double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n; ++i)
    {
        double z = 1.0 - 2.0 * (double(i) + 0.5) / double(n);
        double r = std::sqrt(1.0 - z * z);
        Vec3 d(r * std::cos(golden * double(i)), r * std::sin(golden * double(i)), z);
        pts.push_back({centre + radius * d, d});
    }
    return OrientedPointCloud(std::move(pts));
}

//! Planar patch of points: plane through `origin` with normal `n`, within radius r.
inline void add_plane_points(std::vector<OrientedPoint>& pts, Rng& rng, Vec3 const& origin,
                             Vec3 const& n, double r, std::size_t count)
{
    Vec3 u = n.unitOrthogonal(), v = n.cross(u);
    for (std::size_t i = 0; i < count; ++i)
    {
        double a = uniform(rng, -r, r), b = uniform(rng, -r, r);
        pts.push_back({origin + a * u + b * v, n});
    }
}

struct Face
{
    Vec3 normal;
    std::vector<Vec3> points;
};

/*!
 * Points on the faces of a convex cone around the origin. Each face is the
 * set {x : n_k . x = 0, n_j . x <= 0 for j != k} within radius r.
 */
inline std::vector<Face> cone_faces(Rng& rng, std::vector<Vec3> const& normals, double r,
                                    std::size_t per_face)
{
    std::vector<Face> faces;
    for (std::size_t k = 0; k < normals.size(); ++k)
    {
        Face f{normals[k], {}};
        Vec3 u = normals[k].unitOrthogonal(), v = normals[k].cross(u);
        while (f.points.size() < per_face)
        {
            Vec3 p = uniform(rng, -r, r) * u + uniform(rng, -r, r) * v;
            if (p.norm() > r)
                continue;
            bool ok = true;
            for (std::size_t j = 0; j < normals.size(); ++j)
                ok &= j == k || normals[j].dot(p) <= -1e-3 * r;
            if (ok)
                f.points.push_back(p);
        }
        faces.push_back(std::move(f));
    }
    return faces;
}

inline std::vector<Vec3> dihedral_normals(double angle)
{
    return {Vec3(0, 0, 1), Vec3(std::sin(angle), 0, -std::cos(angle))};
}

inline std::vector<Vec3> corner3_normals()
{
    return {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
}

inline std::vector<Vec3> corner4_normals()
{
    return {Vec3(0.8, 0, 0.6), Vec3(-0.8, 0, 0.6), Vec3(0, 0.8, 0.6), Vec3(0, -0.8, 0.6)};
}

//! Random non-trivial motion on [0, 1]: linear translation, linear Euler angles.
inline RigidMotion random_motion(Rng& rng, double reach = 3.0, double turn = 1.5)
{
    std::array<PiecewisePoly, 3> v, ang;
    for (int k = 0; k < 3; ++k)
    {
        v[k] = PiecewisePoly::linear(0, 1, uniform(rng, -1, 1), uniform(rng, -reach, reach));
        ang[k] = PiecewisePoly::linear(0, 1, 0, uniform(rng, -turn, turn));
    }
    return RigidMotion(0, 1, v, ang);
}

//! Signed distance ball patches over a few random balls.
inline LocalImplicitRep random_ball_rep(Rng& rng, int n)
{
    LocalImplicitRep rep;
    rep.kind = RepKind::BallCover;
    for (int i = 0; i < n; ++i)
    {
        Vec3 c(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
        double r = uniform(rng, 0.3, 0.8);
        // (x - c)^2 - (0.6 r)^2 as a quadric.
        double rr = 0.6 * r;
        Quadric3 q({1, 1, 1, 0, 0, 0, -2 * c[0], -2 * c[1], -2 * c[2], c.squaredNorm() - rr * rr});
        rep.patches.push_back({Ball3(c, r), q});
    }
    rep.bound = areas_bounding_box(rep.patches);
    return rep;
}

inline LocalImplicitRep random_box_rep(Rng& rng, int n)
{
    LocalImplicitRep rep;
    rep.kind = RepKind::OctreeBased;
    for (int i = 0; i < n; ++i)
    {
        Vec3 c(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
        Vec3 h(uniform(rng, 0.2, 0.6), uniform(rng, 0.2, 0.6), uniform(rng, 0.2, 0.6));
        Quadric3 q({0, 0, 0, 0, 0, 0, 0, 0, 1, -c[2]});
        rep.patches.push_back({Box3(c - h, c + h), q});
    }
    rep.bound = areas_bounding_box(rep.patches);
    return rep;
}

}  // namespace sweptvol::test
