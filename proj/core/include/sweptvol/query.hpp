#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "contact.hpp"
#include "solvers.hpp"
#include "sweep.hpp"

namespace sweptvol {

struct QueryConfig
{
    SolverConfig solver;
    //! Largest motion of the moved-back point between time samples, as a fraction of Bound's diagonal.
    double spatial_resolution = 1e-4;
    bool early_exit = true;
    //! Ray march step as a fraction of the cell diagonal.
    double march_fraction = 1.0 / 64.0;

    void validate() const;
};

struct Witness
{
    std::uint32_t patch = 0;
    double t = 0.0;
};

struct MembershipResult
{
    bool inside = false;
    bool far = false;  //!< outside Bound
    //! +inf when no area reaches the point at any time.
    double signed_distance = std::numeric_limits<double>::infinity();
    //! False when the procedures are not local signed distances or an early exit coarsened the value.
    bool exact = false;
    std::optional<Witness> witness;
};

MembershipResult point_membership(SweptVolumeRep const& rep, Vec3 const& p,
                                  QueryConfig const& cfg = {});

//! Sorted maximal intervals of {t : T(t)^-1 p lies in the base}.
std::vector<TimeInterval> time_witnesses(SweptVolumeRep const& rep, Vec3 const& p,
                                         QueryConfig const& cfg = {});

struct RayHit
{
    double s = 0.0;
    Vec3 point = Vec3::Zero();
    bool entering = true;
    bool grazing = false;
};

std::optional<RayHit> ray_intersect_first(SweptVolumeRep const& rep, Ray const& ray,
                                          QueryConfig const& cfg = {});
std::vector<RayHit> ray_intersect_all(SweptVolumeRep const& rep, Ray const& ray,
                                      QueryConfig const& cfg = {});

//---------------------------------------------------------------------------//
// Grids and set difference
//---------------------------------------------------------------------------//

struct GridSpec
{
    Box3 bounds;
    std::array<std::uint32_t, 3> dims{2, 2, 2};

    //! Throws InvalidInput when a dimension is below 2 or the bounds are empty.
    void validate() const;
    std::size_t size() const { return std::size_t(dims[0]) * dims[1] * dims[2]; }
    Vec3 point(std::size_t x, std::size_t y, std::size_t z) const;
};

struct ScalarGrid
{
    GridSpec spec;
    std::vector<double> values;  //!< x-fastest
    bool degenerate = false;     //!< grid does not meet the swept bound

    double at(std::size_t x, std::size_t y, std::size_t z) const
    {
        return values[(z * spec.dims[1] + y) * spec.dims[0] + x];
    }
};

//! Largest finite magnitude written for "no area reaches this point".
inline constexpr double far_field = 1e30;

using SolidRef = std::variant<LocalImplicitRep const*, SweptVolumeRep const*>;

//! Field of a solid, non-positive inside, clamped to +/- far_field.
double solid_field(SolidRef solid, Vec3 const& p, QueryConfig const& cfg = {});

//! Field of a solid sampled on a grid.
ScalarGrid sample_field(SolidRef solid, GridSpec const& spec, QueryConfig const& cfg = {});

/*!
 * Field of object \ swept: max(f_O, g) with g = -f_S outside the swept
 * volume and a positive value inside it, so the result is non-positive
 * exactly where the object contains the point and the swept volume does not.
 */
double difference_field(double object_field, double swept_field);

ScalarGrid subtract(SolidRef object, SweptVolumeRep const& swept, GridSpec const& spec,
                    QueryConfig const& cfg = {});

//! member(object) and not member(swept).
bool subtract_member(SolidRef object, SweptVolumeRep const& swept, Vec3 const& p,
                     QueryConfig const& cfg = {});

}  // namespace sweptvol
