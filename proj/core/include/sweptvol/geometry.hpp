#pragma once

#include <array>
#include <optional>

#include "types.hpp"

namespace sweptvol {

//---------------------------------------------------------------------------//
/*!
 * Axis-aligned box, closed set.
 */
struct Box3
{
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Zero();

    Box3() = default;
    Box3(Vec3 const& lo, Vec3 const& hi);

    static Box3 empty();

    bool is_empty() const { return (min.array() > max.array()).any(); }
    bool contains(Vec3 const& p) const;
    bool intersects(Box3 const& other) const;
    Vec3 center() const { return 0.5 * (min + max); }
    Vec3 extents() const { return max - min; }
    double diagonal() const { return (max - min).norm(); }
    double volume() const;
    double surface_area() const;

    void expand(Vec3 const& p);
    void expand(Box3 const& b);
    Box3 inflated(double margin) const;

    //! Euclidean distance from p to the box; zero inside.
    double distance(Vec3 const& p) const;
    //! Euclidean distance between two boxes; zero if they touch.
    double distance(Box3 const& other) const;
    Vec3 closest_point(Vec3 const& p) const;
    std::array<Vec3, 8> corners() const;
};

//---------------------------------------------------------------------------//
//! Closed ball B(centre, radius).
struct Ball3
{
    Vec3 centre = Vec3::Zero();
    double radius = 1.0;

    Ball3() = default;
    Ball3(Vec3 const& c, double r);

    bool contains(Vec3 const& p) const
    {
        return (p - centre).squaredNorm() <= radius * radius;
    }
    //! Strict interior, where the blending weight is positive.
    bool contains_open(Vec3 const& p) const
    {
        return (p - centre).squaredNorm() < radius * radius;
    }
    Box3 bounding_box() const;
};

//---------------------------------------------------------------------------//
/*!
 * Normalised equation of one face of an axis-aligned box.
 *
 * Evaluates P.n - d with n = sigma * e_axis, so the value is the signed
 * distance to the face plane, positive on the outer side.
 */
struct AffineFace
{
    int axis = 0;     //!< 0, 1, 2 for x, y, z
    int sigma = 1;    //!< -1 or +1
    double offset = 0.0;

    double operator()(Vec3 const& p) const { return sigma * p[axis] - offset; }
    Vec3 normal() const;
};

//! Six face functions ordered (x-, x+, y-, y+, z-, z+).
std::array<AffineFace, 6> signed_face_functions(Box3 const& box);

//! Face function for axis k in {1,2,3} and sigma in {-1,+1}.
AffineFace face_function(Box3 const& box, int k, int sigma);

//---------------------------------------------------------------------------//
struct Ray
{
    Vec3 origin = Vec3::Zero();
    Vec3 direction = Vec3::UnitX();

    Ray() = default;
    //! Throws InvalidInput unless direction is unit within 1e-9.
    Ray(Vec3 const& o, Vec3 const& d);

    Vec3 at(double s) const { return origin + s * direction; }
};

//! Parameter span [s0, s1] (s >= 0) of a ray inside a closed box.
std::optional<std::array<double, 2>> clip_ray(Ray const& ray, Box3 const& box);

//! Parameter span [s0, s1] (s >= 0) of a ray inside a closed ball.
std::optional<std::array<double, 2>> clip_ray(Ray const& ray, Ball3 const& ball);

//! Distance between point p and the segment [a, b].
double segment_point_distance(Vec3 const& a, Vec3 const& b, Vec3 const& p);

//! Distance between the segment [a, b] and a box; zero when they meet.
double segment_box_distance(Vec3 const& a, Vec3 const& b, Box3 const& box);

}  // namespace sweptvol
