#pragma once

#include <array>
#include <variant>
#include <vector>

#include "types.hpp"

namespace sweptvol {

//---------------------------------------------------------------------------//
/*!
 * General trivariate quadratic polynomial.
 *
 * Coefficient order: xx, yy, zz, xy, xz, yz, x, y, z, 1.
 */
struct Quadric3
{
    std::array<double, 10> coeffs{};

    Quadric3() = default;
    explicit Quadric3(std::array<double, 10> const& c);

    double operator()(Vec3 const& p) const;
    Vec3 gradient(Vec3 const& p) const;

    //! Monomial values in coefficient order, used as a least-squares basis.
    static std::array<double, 10> basis(Vec3 const& p);
};

//---------------------------------------------------------------------------//
/*!
 * Height-field quadric over a local orthonormal frame (u, v, n):
 *
 *   f(p) = w - (c20 u^2 + c11 uv + c02 v^2 + c10 u + c01 v + c00)
 *
 * where (u, v, w) are the coordinates of p - origin in the frame. The field
 * is positive on the side the frame normal points to.
 */
struct BivariatePatch
{
    Vec3 origin = Vec3::Zero();
    Vec3 u = Vec3::UnitX();
    Vec3 v = Vec3::UnitY();
    Vec3 n = Vec3::UnitZ();
    double c20 = 0, c11 = 0, c02 = 0, c10 = 0, c01 = 0, c00 = 0;

    BivariatePatch() = default;
    //! Validates orthonormality of the frame to 1e-9.
    BivariatePatch(Vec3 const& origin, Vec3 const& u, Vec3 const& v, Vec3 const& n,
                   std::array<double, 6> const& c);

    //! Frame centred at origin with normal n; u and v completed deterministically.
    static BivariatePatch from_normal(Vec3 const& origin, Vec3 const& normal);

    std::array<double, 6> coefficients() const { return {c20, c11, c02, c10, c01, c00}; }
    void set_coefficients(std::array<double, 6> const& c);

    Vec3 local(Vec3 const& p) const;
    double height(double lu, double lv) const;
    double operator()(Vec3 const& p) const;
    Vec3 gradient(Vec3 const& p) const;
};

//! Build an orthonormal (u, v) pair completing a unit normal n.
void complete_frame(Vec3 const& n, Vec3& u, Vec3& v);

//---------------------------------------------------------------------------//
//! Sharp-feature procedure: pointwise minimum of 2 to 4 patches.
struct MinOfPatches
{
    std::vector<BivariatePatch> pieces;

    MinOfPatches() = default;
    //! Throws InvalidInput unless 2 <= pieces.size() <= 4.
    explicit MinOfPatches(std::vector<BivariatePatch> p);

    double operator()(Vec3 const& p) const;
    //! Index of the piece attaining the minimum (first on ties).
    std::size_t active_piece(Vec3 const& p) const;
};

using LocalProcedure = std::variant<Quadric3, BivariatePatch, MinOfPatches>;

double eval_procedure(LocalProcedure const& proc, Vec3 const& p);

//! Analytic gradient; for MinOfPatches that of the active piece.
Vec3 procedure_gradient(LocalProcedure const& proc, Vec3 const& p);

}  // namespace sweptvol
