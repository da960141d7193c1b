#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "geometry.hpp"
#include "motion.hpp"

namespace sweptvol {

struct TimeInterval
{
    double t0 = 0.0;
    double t1 = 0.0;

    bool contains(double t) const { return t >= t0 && t <= t1; }
    double length() const { return t1 - t0; }
};

//! Sort and merge intervals whose gap is at most `gap`.
std::vector<TimeInterval> merge_intervals(std::vector<TimeInterval> v, double gap);

struct ContactOptions
{
    double tol = 1e-7;   //!< endpoint accuracy, time units
    bool fast = false;   //!< face equations only (over-covers)
    int grid = 128;      //!< solve pieces per motion domain
};

//---------------------------------------------------------------------------//
// Sphere against an axis-aligned box
//---------------------------------------------------------------------------//

enum class BoxFeature
{
    Inside,
    Face,    //!< 6 cases
    Edge,    //!< 12 cases
    Vertex,  //!< 8 cases
};

struct SphereBoxCase
{
    BoxFeature feature = BoxFeature::Inside;
    //! Per axis: -1 / +1 when the point lies beyond that face, 0 otherwise.
    std::array<int, 3> sigma{};
    //! Signed distance from the point to the box through the active equation.
    double distance = 0.0;
};

/*!
 * Active face / edge / vertex of the box nearest to an outside point, and
 * the signed distance evaluated with that feature's equation. Inside the
 * box the distance is the largest face value (non-positive).
 */
SphereBoxCase classify_sphere_box(Vec3 const& centre, Box3 const& box);

//! dist(centre, box) - radius, or with `fast` the largest face value - radius.
double sphere_box_gap(Vec3 const& centre, double radius, Box3 const& box, bool fast);

/*!
 * Times t in [t0, t1] at which the moved ball meets the box, as a sorted
 * union of closed intervals over-covering the exact set by at most tol at
 * each endpoint.
 */
std::vector<TimeInterval> contact_intervals_sphere(Ball3 const& ball, RigidMotion const& motion,
                                                   Box3 const& box, ContactOptions const& opt,
                                                   double t0, double t1);
std::vector<TimeInterval> contact_intervals_sphere(Ball3 const& ball, RigidMotion const& motion,
                                                   Box3 const& box, ContactOptions const& opt);

//---------------------------------------------------------------------------//
// Box against a box
//---------------------------------------------------------------------------//

/*!
 * Separating-axis value between the static box `area` and the oriented box
 * iso^-1(cell): positive values are lower bounds on their distance,
 * non-positive values mean they overlap (minus the penetration depth).
 */
double box_box_gap(Box3 const& area, Isometry const& iso, Box3 const& cell);

std::vector<TimeInterval> contact_intervals_box(Box3 const& area, RigidMotion const& motion,
                                                Box3 const& cell, ContactOptions const& opt,
                                                double t0, double t1);
std::vector<TimeInterval> contact_intervals_box(Box3 const& area, RigidMotion const& motion,
                                                Box3 const& cell, ContactOptions const& opt);

//---------------------------------------------------------------------------//
/*!
 * Conservative solve of {t : g(t) <= 0} on [t0, t1] given a bound L(t0, t1)
 * on |g'|.
 *
 * The window is cut into pieces no longer than `step`. A piece is discarded
 * when (g0 + g1 - L h) / 2 > 0, accepted whole when both ends are
 * non-positive, and bisected otherwise until narrower than tol. Gaps of
 * non-contact shorter than `step` and bounded by contact may be covered.
 */
std::vector<TimeInterval> solve_contact_set(std::function<double(double)> const& g,
                                            std::function<double(double, double)> const& lipschitz,
                                            double t0, double t1, double tol,
                                            double step = std::numeric_limits<double>::infinity());

}  // namespace sweptvol
