#include "sweptvol/point_cloud.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace sweptvol {

OrientedPointCloud::OrientedPointCloud(std::vector<OrientedPoint> points)
    : points_(std::move(points))
{
    if (points_.empty())
        throw InvalidInput("OrientedPointCloud: at least one point required");
    for (std::size_t i = 0; i < points_.size(); ++i)
    {
        auto const& p = points_[i];
        if (!p.position.allFinite() || !p.normal.allFinite())
            throw InvalidInput("OrientedPointCloud: non-finite value at point "
                               + std::to_string(i));
        if (std::abs(p.normal.norm() - 1.0) > 1e-6)
            throw InvalidInput("OrientedPointCloud: normal not unit at point "
                               + std::to_string(i));
    }
}

Box3 OrientedPointCloud::bounding_box() const
{
    Box3 b = Box3::empty();
    for (auto const& p : points_)
        b.expand(p.position);
    return b;
}

std::vector<Vec3> OrientedPointCloud::positions() const
{
    std::vector<Vec3> out;
    out.reserve(points_.size());
    for (auto const& p : points_)
        out.push_back(p.position);
    return out;
}

OrientedPointCloud parse_xyzn(std::istream& in)
{
    std::vector<OrientedPoint> pts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;

        std::istringstream ss(line);
        double v[6];
        int count = 0;
        std::string tok;
        while (ss >> tok)
        {
            if (count == 6)
                throw ParseError(lineno, "expected 6 fields, found more");
            std::size_t used = 0;
            try
            {
                v[count] = std::stod(tok, &used);
            }
            catch (std::exception const&)
            {
                used = 0;
            }
            if (used != tok.size())
                throw ParseError(lineno, "not a decimal number: '" + tok + "'");
            ++count;
        }
        if (count != 6)
            throw ParseError(lineno, "expected 6 fields 'x y z nx ny nz', found "
                                         + std::to_string(count));
        OrientedPoint p{Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5])};
        if (!p.position.allFinite() || !p.normal.allFinite())
            throw ParseError(lineno, "non-finite value");
        double len = p.normal.norm();
        if (std::abs(len - 1.0) > 1e-3)
            throw ParseError(lineno, "normal length " + std::to_string(len)
                                         + " is not within 1e-3 of 1");
        p.normal /= len;
        pts.push_back(p);
    }
    if (pts.empty())
        throw ParseError(lineno, "no points in input");
    return OrientedPointCloud(std::move(pts));
}

OrientedPointCloud load_xyzn(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidInput("cannot open point cloud '" + path + "'");
    return parse_xyzn(in);
}

void write_xyzn(std::ostream& out, OrientedPointCloud const& cloud)
{
    out << std::setprecision(17);
    for (auto const& p : cloud.points())
    {
        out << p.position.x() << ' ' << p.position.y() << ' ' << p.position.z() << ' '
            << p.normal.x() << ' ' << p.normal.y() << ' ' << p.normal.z() << '\n';
    }
}

}  // namespace sweptvol
