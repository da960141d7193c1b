#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "geometry.hpp"
#include "point_cloud.hpp"
#include "procedure.hpp"

namespace sweptvol {

//! Support region of a local procedure. Closed sets.
using Area = std::variant<Box3, Ball3>;

bool area_contains(Area const& a, Vec3 const& p);
Box3 area_bounding_box(Area const& a);
Vec3 area_centre(Area const& a);
//! Radius of the smallest ball centred at area_centre containing the area.
double area_radius(Area const& a);
//! Euclidean distance from p to the area (zero inside).
double area_distance(Area const& a, Vec3 const& p);

struct LocalPatch
{
    Area area;
    LocalProcedure procedure;
};

enum class RepKind
{
    OctreeBased,  //!< axis-aligned box areas
    BallCover,    //!< ball areas
};

//---------------------------------------------------------------------------//
/*!
 * Collection of (area, procedure) pairs; the solid is the set of points lying
 * in some area whose procedure is non-positive there.
 *
 * Procedures may be evaluated outside their area (they are global
 * polynomials) but only count inside it.
 */
struct LocalImplicitRep
{
    RepKind kind = RepKind::OctreeBased;
    std::vector<LocalPatch> patches;
    Box3 bound;
    //! Input cloud for nearest-neighbour fallback; set by the ball-cover builder.
    std::shared_ptr<OrientedPointCloud const> fallback_cloud;
    //! Coarser (area, procedure) lists kept for multi-scale use.
    std::vector<std::vector<LocalPatch>> levels;
    //! True when procedures are known to be local signed distances.
    bool signed_distance_exact = false;

    std::size_t size() const { return patches.size(); }

    //! Throws InvalidInput when the area kinds, bound or fallback contract is broken.
    void validate() const;
};

//! Bounding sphere centred at the centroid of the area centres.
Ball3 bounding_sphere(LocalImplicitRep const& rep);

//! Recompute `bound` as the union of area bounding boxes.
Box3 areas_bounding_box(std::vector<LocalPatch> const& patches);

//---------------------------------------------------------------------------//
/*!
 * Bounding-volume hierarchy over the areas of a patch list for point and
 * ray queries. Holds a pointer to the list; the list must outlive the index.
 */
class AreaIndex
{
  public:
    AreaIndex() = default;
    explicit AreaIndex(std::vector<LocalPatch> const& patches);

    //! Calls fn(i) for every area containing p (closed), ascending i.
    void for_each_containing(Vec3 const& p, std::function<void(std::size_t)> const& fn) const;
    std::vector<std::size_t> containing(Vec3 const& p) const;
    //! Indices of areas whose bounding box meets the ray, ascending.
    std::vector<std::size_t> ray_candidates(Ray const& ray) const;

  private:
    struct Node
    {
        Box3 box;
        std::int32_t left = -1, right = -1;
        std::uint32_t begin = 0, end = 0;
    };
    std::int32_t build(std::uint32_t begin, std::uint32_t end);

    std::vector<LocalPatch> const* patches_ = nullptr;
    std::vector<Box3> boxes_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
};

//---------------------------------------------------------------------------//
/*!
 * Point evaluation of the solid described by a representation.
 *
 * value(p) is the minimum of F_i(p) over areas containing p, or +inf when no
 * area contains p. Membership is value(p) <= 0.
 */
class RepEvaluator
{
  public:
    explicit RepEvaluator(LocalImplicitRep const& rep);

    LocalImplicitRep const& rep() const { return *rep_; }
    AreaIndex const& index() const { return index_; }

    double value(Vec3 const& p) const;
    bool contains(Vec3 const& p) const { return value(p) <= 0.0; }

  private:
    LocalImplicitRep const* rep_;
    AreaIndex index_;
};

}  // namespace sweptvol
