#pragma once

#include <optional>
#include <span>
#include <vector>

#include "point_cloud.hpp"
#include "representation.hpp"

namespace sweptvol {

struct MpuParams
{
    double alpha = 0.75;        //!< support radius factor, R = alpha d
    int n_min = 15;
    double eps0 = 1e-4;         //!< Taubin acceptance threshold (rescaled units)
    double theta_sharp = 0.9;   //!< cosine
    double theta_corner = 0.7;  //!< cosine
    int max_depth = 12;

    //! Throws InvalidInput when alpha < 1/2, n_min < 7 or eps0 <= 0.
    void validate() const;
};

enum class MpuCase
{
    GeneralQuadric,  //!< full quadric; normals not within a half-space
    Bivariate,       //!< height field over the mean normal
    Sharp,           //!< few points; min of 1 to 4 height fields
};

struct MpuLocalFit
{
    LocalProcedure procedure;
    MpuCase fit_case = MpuCase::Bivariate;
    int pieces = 1;
    bool degraded = false;  //!< ridge-regularised or degenerate piece
};

//! Quadratic B-spline b(x) with support [-1.5, 1.5].
double quadratic_bspline(double x);

//! Weight b(3 |p - c| / 2R) of a point relative to a support sphere.
double mpu_weight(Vec3 const& p, Ball3 const& sphere);

/*!
 * Local approximation of the points inside a support sphere.
 *
 * Returns nullopt (FAIL) only when the general-quadric path discards every
 * auxiliary point.
 */
std::optional<MpuLocalFit> mpu_local_fit(std::span<OrientedPoint const> points,
                                         Ball3 const& sphere, Box3 const& cube,
                                         MpuParams const& params);

struct QuadricFit
{
    Quadric3 quadric;
    std::size_t q_kept = 0;  //!< auxiliary points with consistent signs
    bool degraded = false;
};

/*!
 * General quadric minimising the weighted point residual plus the
 * auxiliary-point distance term, with the cube corners and centre as
 * auxiliary points. nullopt when no auxiliary point survives the sign test.
 */
std::optional<QuadricFit> fit_general_quadric(std::span<OrientedPoint const> points,
                                              Ball3 const& sphere, Box3 const& cube);

struct PatchFit
{
    BivariatePatch patch;
    bool degraded = false;
};

//! Height-field patch over the frame at the sphere centre with normal `normal`.
PatchFit fit_bivariate(std::span<OrientedPoint const> points, Ball3 const& sphere,
                       Vec3 const& normal);

//! Edge/corner cascade producing a single patch or a minimum of 2 to 4 patches.
MpuLocalFit classify_and_fit_sharp(std::span<OrientedPoint const> points, Ball3 const& sphere,
                                   MpuParams const& params);

//! max |f(p)| / |grad f(p)|; +inf if some gradient norm is below 1e-12.
double taubin_error(LocalProcedure const& proc, std::span<OrientedPoint const> points);
double taubin_error(LocalProcedure const& proc, std::span<Vec3 const> points);

//! k g(a (x - c)) expressed as a quadric in x.
Quadric3 transform_quadric(Quadric3 const& g, double a, Vec3 const& c, double k);

struct MpuCubeRecord
{
    Box3 cube;                  //!< world coordinates
    int depth = 0;
    double taubin_error = 0.0;  //!< rescaled units; 0 when the support is empty
    std::size_t support_points = 0;
    bool enlarged = false;
    bool flagged = false;       //!< accepted at max_depth without meeting eps0
    MpuCase fit_case = MpuCase::Bivariate;
    int pieces = 1;
    bool degraded = false;
};

struct MpuStats
{
    std::vector<MpuCubeRecord> cubes;  //!< one per accepted cube, in output order
    std::size_t failures = 0;          //!< FAIL results that forced subdivision
    double max_taubin_error = 0.0;     //!< over cubes with nonempty support
    std::size_t flagged = 0;
    double scale = 1.0;                //!< world-to-rescaled factor
};

/*!
 * Octree-based representation of a point cloud.
 *
 * The cloud is rescaled into a cube of diagonal 1; every cube is fitted on
 * its (possibly enlarged) support sphere and subdivided until the Taubin
 * error of its support points falls below eps0. Procedures are returned in
 * world coordinates.
 */
LocalImplicitRep mpu_build(OrientedPointCloud const& cloud, MpuParams const& params,
                           MpuStats* stats = nullptr);

}  // namespace sweptvol
