#pragma once

#include <cstdint>
#include <vector>

#include "types.hpp"

namespace sweptvol {

//---------------------------------------------------------------------------//
/*!
 * Static 3-d tree over a fixed point set.
 *
 * Built once (median splits, small leaf buckets) and queried read-only, so a
 * single instance can be shared between threads.
 */
class KdTree
{
  public:
    struct Neighbor
    {
        std::uint32_t index;
        double dist2;
    };

    KdTree() = default;
    explicit KdTree(std::vector<Vec3> points);

    std::size_t size() const { return points_.size(); }
    Vec3 const& point(std::size_t i) const { return points_[i]; }

    //! k nearest points sorted by distance then index. `skip` is excluded.
    std::vector<Neighbor> knn(Vec3 const& q, std::size_t k,
                              std::int64_t skip = -1) const;

    //! Nearest point index; ties broken by lower index.
    std::uint32_t nearest(Vec3 const& q) const;

    //! Indices of points with |p - q| <= r, ascending.
    std::vector<std::uint32_t> radius_search(Vec3 const& q, double r) const;

    //! Number of points with |p - q| <= r.
    std::size_t count_within(Vec3 const& q, double r) const;

  private:
    struct Node
    {
        std::uint32_t begin, end;      // range into order_
        std::int32_t left = -1, right = -1;
        int axis = -1;                 // -1 for leaves
        double split = 0.0;
    };

    std::int32_t build(std::uint32_t begin, std::uint32_t end);

    template<class Visit>
    void visit_ball(Vec3 const& q, double r2, Visit&& visit) const;

    std::vector<Vec3> points_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
};

}  // namespace sweptvol
