#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace sweptvol {

struct OrientedPoint
{
    Vec3 position;
    Vec3 normal;  //!< unit outer normal
};

//---------------------------------------------------------------------------//
/*!
 * Non-empty point cloud with unit outer normals.
 *
 * Construction validates: finite coordinates, normals of unit length within
 * 1e-6, at least one point. Immutable afterwards.
 */
class OrientedPointCloud
{
  public:
    explicit OrientedPointCloud(std::vector<OrientedPoint> points);

    std::size_t size() const { return points_.size(); }
    OrientedPoint const& operator[](std::size_t i) const { return points_[i]; }
    std::span<OrientedPoint const> points() const { return points_; }
    Vec3 const& position(std::size_t i) const { return points_[i].position; }
    Vec3 const& normal(std::size_t i) const { return points_[i].normal; }

    Box3 bounding_box() const;
    std::vector<Vec3> positions() const;

  private:
    std::vector<OrientedPoint> points_;
};

/*!
 * Parse the plain-text `x y z nx ny nz` format.
 *
 * Lines starting with '#' and blank lines are skipped. Normals within 1e-3
 * of unit length are renormalised; others are rejected. Errors raise
 * ParseError naming the 1-based line.
 */
OrientedPointCloud parse_xyzn(std::istream& in);
OrientedPointCloud load_xyzn(std::string const& path);
void write_xyzn(std::ostream& out, OrientedPointCloud const& cloud);

}  // namespace sweptvol
