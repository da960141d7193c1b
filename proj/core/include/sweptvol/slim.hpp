#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "kdtree.hpp"
#include "point_cloud.hpp"
#include "representation.hpp"

namespace sweptvol {

struct SlimParams
{
    double rho0_fraction = 0.1;  //!< of the bounding-box diagonal
    double g = 0.6180339887498949;
    double t_mdl = 0.02;         //!< fraction of the bounding-box diagonal
    bool levels_kept = false;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

//! Compactly supported bump exp(-1 / (1 - (r/R)^2)) on (-R, R), zero elsewhere.
double bump_weight(double r, double radius);

/*!
 * Randomised greedy cover: repeatedly centre a ball on a uniformly chosen
 * uncovered point. Deterministic for a given seed.
 */
std::vector<Ball3> cover_with_balls(std::span<Vec3 const> points, double radius,
                                    std::uint64_t seed);

//! Mean smallest covariance eigenvalue over each point and its 10 neighbours.
double compute_lambda(OrientedPointCloud const& cloud);

/*!
 * Patch over a frame centred on the ball with the mean normal of the points
 * inside, minimising the bump-weighted squared residual. Throws InvalidInput
 * with fewer than 6 points in the ball or a vanishing mean normal.
 */
BivariatePatch slim_fit(Ball3 const& ball, OrientedPointCloud const& cloud);

struct Rankings
{
    double epsilon = 0.0;  //!< sum of F^2 over points within rho
    double E = 0.0;        //!< epsilon + lambda (t_mdl / rho)^2
};

Rankings rankings(Ball3 const& ball, BivariatePatch const& patch, OrientedPointCloud const& cloud,
                  double rho, double lambda, double t_mdl);

struct SlimAcceptance
{
    std::size_t patch_index = 0;
    int level = 0;
    double rho = 0.0;
    std::array<double, 3> epsilon{};  //!< at rho_{k-1}, rho_k, rho_{k+1}
    std::array<double, 3> E{};
    bool forced = false;
    bool degraded = false;
};

struct SlimStats
{
    double rho0 = 0.0;
    double lambda = 0.0;
    double t_mdl = 0.0;  //!< absolute, world units
    int levels = 0;      //!< last level index visited
    std::vector<SlimAcceptance> accepted;
    std::size_t forced = 0;
    std::size_t degraded = 0;
};

//! True when the ranking triples satisfy the strict local-minimum condition.
bool slim_double_condition(std::array<double, 3> const& epsilon, std::array<double, 3> const& E);

/*!
 * Ball-cover representation with shrinking radii rho_k = g^k rho0. Balls are
 * accepted when E has a local minimum at rho_k and epsilon is strictly
 * increasing in rho. Below 1e-6 rho0 the remaining balls are accepted and
 * flagged as forced.
 */
LocalImplicitRep slim_build(OrientedPointCloud const& cloud, SlimParams const& params,
                            SlimStats* stats = nullptr);

//! Accepted patches from levels <= k together with the stored level-k pairs.
std::vector<LocalPatch> slim_level_patches(LocalImplicitRep const& rep, SlimStats const& stats,
                                           int k);

//---------------------------------------------------------------------------//

struct BlendResult
{
    double value = 0.0;
    bool covered = false;
};

/*!
 * Blended evaluation and ray queries on a ball-cover patch list.
 *
 * Holds pointers to the patch list and the fallback cloud; both must outlive
 * the evaluator.
 */
class SlimEvaluator
{
  public:
    explicit SlimEvaluator(LocalImplicitRep const& rep);
    SlimEvaluator(std::vector<LocalPatch> const& patches,
                  std::shared_ptr<OrientedPointCloud const> fallback);

    BlendResult eval(Vec3 const& q) const;
    std::optional<Vec3> ray_intersect(Ray const& ray) const;

  private:
    std::vector<LocalPatch> const* patches_;
    std::shared_ptr<OrientedPointCloud const> fallback_;
    KdTree centres_;
    KdTree fallback_tree_;
    double max_radius_ = 0.0;
};

BlendResult blended_eval(LocalImplicitRep const& rep, Vec3 const& q);
std::optional<Vec3> slim_ray_intersect(LocalImplicitRep const& rep, Ray const& ray);

//! Nearest root s of patch(ray(s)) = 0 within [s0, s1], if any.
std::optional<double> patch_ray_root(BivariatePatch const& patch, Ray const& ray, double s0,
                                     double s1);

}  // namespace sweptvol
