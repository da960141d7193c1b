#include "sweptvol/procedure.hpp"

#include <cmath>
#include <limits>

namespace sweptvol {

Quadric3::Quadric3(std::array<double, 10> const& c) : coeffs(c)
{
    for (double x : c)
    {
        if (!std::isfinite(x))
            throw InvalidInput("Quadric3: non-finite coefficient");
    }
}

std::array<double, 10> Quadric3::basis(Vec3 const& p)
{
    double x = p.x(), y = p.y(), z = p.z();
    return {x * x, y * y, z * z, x * y, x * z, y * z, x, y, z, 1.0};
}

double Quadric3::operator()(Vec3 const& p) const
{
    auto b = basis(p);
    double s = 0.0;
    for (int i = 0; i < 10; ++i)
        s += coeffs[i] * b[i];
    return s;
}

Vec3 Quadric3::gradient(Vec3 const& p) const
{
    auto const& c = coeffs;
    double x = p.x(), y = p.y(), z = p.z();
    return {2 * c[0] * x + c[3] * y + c[4] * z + c[6],
            2 * c[1] * y + c[3] * x + c[5] * z + c[7],
            2 * c[2] * z + c[4] * x + c[5] * y + c[8]};
}

//---------------------------------------------------------------------------//

void complete_frame(Vec3 const& n, Vec3& u, Vec3& v)
{
    // Pick the axis least aligned with n to avoid cancellation.
    Vec3 a = std::abs(n.x()) <= std::abs(n.y()) && std::abs(n.x()) <= std::abs(n.z())
                 ? Vec3::UnitX()
                 : (std::abs(n.y()) <= std::abs(n.z()) ? Vec3::UnitY() : Vec3::UnitZ());
    u = (a - a.dot(n) * n).normalized();
    v = n.cross(u);
}

BivariatePatch::BivariatePatch(Vec3 const& o, Vec3 const& uu, Vec3 const& vv, Vec3 const& nn,
                               std::array<double, 6> const& c)
    : origin(o), u(uu), v(vv), n(nn)
{
    constexpr double tol = 1e-9;
    if (!o.allFinite())
        throw InvalidInput("BivariatePatch: non-finite origin");
    if (std::abs(u.norm() - 1) > tol || std::abs(v.norm() - 1) > tol
        || std::abs(n.norm() - 1) > tol || std::abs(u.dot(v)) > tol
        || std::abs(u.dot(n)) > tol || std::abs(v.dot(n)) > tol)
    {
        throw InvalidInput("BivariatePatch: frame is not orthonormal");
    }
    set_coefficients(c);
}

BivariatePatch BivariatePatch::from_normal(Vec3 const& o, Vec3 const& normal)
{
    BivariatePatch p;
    p.origin = o;
    p.n = normal.normalized();
    complete_frame(p.n, p.u, p.v);
    return p;
}

void BivariatePatch::set_coefficients(std::array<double, 6> const& c)
{
    for (double x : c)
    {
        if (!std::isfinite(x))
            throw InvalidInput("BivariatePatch: non-finite coefficient");
    }
    c20 = c[0];
    c11 = c[1];
    c02 = c[2];
    c10 = c[3];
    c01 = c[4];
    c00 = c[5];
}

Vec3 BivariatePatch::local(Vec3 const& p) const
{
    Vec3 d = p - origin;
    return {d.dot(u), d.dot(v), d.dot(n)};
}

double BivariatePatch::height(double lu, double lv) const
{
    return c20 * lu * lu + c11 * lu * lv + c02 * lv * lv + c10 * lu + c01 * lv + c00;
}

double BivariatePatch::operator()(Vec3 const& p) const
{
    Vec3 l = local(p);
    return l.z() - height(l.x(), l.y());
}

Vec3 BivariatePatch::gradient(Vec3 const& p) const
{
    Vec3 l = local(p);
    double du = 2 * c20 * l.x() + c11 * l.y() + c10;
    double dv = c11 * l.x() + 2 * c02 * l.y() + c01;
    return n - du * u - dv * v;
}

//---------------------------------------------------------------------------//

MinOfPatches::MinOfPatches(std::vector<BivariatePatch> p) : pieces(std::move(p))
{
    if (pieces.size() < 2 || pieces.size() > 4)
        throw InvalidInput("MinOfPatches: needs 2, 3 or 4 pieces");
}

std::size_t MinOfPatches::active_piece(Vec3 const& p) const
{
    std::size_t best = 0;
    double value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pieces.size(); ++i)
    {
        double f = pieces[i](p);
        if (f < value)
        {
            value = f;
            best = i;
        }
    }
    return best;
}

double MinOfPatches::operator()(Vec3 const& p) const
{
    return pieces[active_piece(p)](p);
}

//---------------------------------------------------------------------------//

double eval_procedure(LocalProcedure const& proc, Vec3 const& p)
{
    return std::visit([&](auto const& f) { return f(p); }, proc);
}

Vec3 procedure_gradient(LocalProcedure const& proc, Vec3 const& p)
{
    struct Visitor
    {
        Vec3 const& p;
        Vec3 operator()(Quadric3 const& q) const { return q.gradient(p); }
        Vec3 operator()(BivariatePatch const& b) const { return b.gradient(p); }
        Vec3 operator()(MinOfPatches const& m) const
        {
            return m.pieces[m.active_piece(p)].gradient(p);
        }
    };
    return std::visit(Visitor{p}, proc);
}

}  // namespace sweptvol
