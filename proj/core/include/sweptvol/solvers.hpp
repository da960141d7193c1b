#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "types.hpp"

namespace sweptvol {

//! Tolerances and sampling densities shared by the numeric kernels.
struct SolverConfig
{
    double eps_root = 1e-9;           //!< bracket width, time units
    double eps_value = 1e-9;          //!< function-value tolerance
    int max_iter = 200;
    int time_samples_per_unit = 64;
    std::uint64_t rng_seed = 0;

    //! Throws InvalidInput on non-positive values or max_iter < 8.
    void validate() const;
};

using ScalarFn = std::function<double(double)>;

//---------------------------------------------------------------------------//
// Weighted least squares
//---------------------------------------------------------------------------//

struct WlsRow
{
    std::vector<double> basis;
    double weight = 1.0;
    double target = 0.0;
};

struct WlsResult
{
    Eigen::VectorXd coeffs;
    bool degraded = false;  //!< ridge regularisation was added
};

/*!
 * Accumulates the normal equations of a weighted linear least-squares
 * problem row by row.
 */
class NormalEquations
{
  public:
    explicit NormalEquations(int unknowns);

    int unknowns() const { return static_cast<int>(rhs_.size()); }
    std::size_t rows() const { return rows_; }

    //! Throws InvalidInput on non-finite data, negative weight or size mismatch.
    void add(std::span<double const> basis, double weight, double target);
    void add(NormalEquations const& other, double scale);

    /*!
     * Solve with an LDLT factorisation. When the smallest/largest
     * eigenvalue ratio is below 1e-10, a ridge of 1e-8 trace/n is added and
     * the result is flagged as degraded. Throws InvalidInput if every weight
     * was zero.
     */
    WlsResult solve() const;

  private:
    Eigen::MatrixXd ata_;
    Eigen::VectorXd rhs_;
    double weight_sum_ = 0.0;
    std::size_t rows_ = 0;
};

WlsResult wls_fit(std::span<WlsRow const> rows);

//! Sum of w (basis . c - target)^2.
double wls_residual(std::span<WlsRow const> rows, Eigen::VectorXd const& c);

//---------------------------------------------------------------------------//
// One-dimensional root finding and minimisation
//---------------------------------------------------------------------------//

struct RootResult
{
    double t = 0.0;
    int iterations = 0;
    bool used_bisection = false;
};

/*!
 * Bisection on a sign-change bracket. Stops once the bracket is at most
 * eps_root wide (or an exact zero is hit), which takes at most
 * ceil(log2((t1 - t0) / eps_root)) halvings. Throws BracketError if
 * f(t0) f(t1) > 0.
 */
RootResult bisect_root(ScalarFn const& f, double t0, double t1, SolverConfig const& cfg);

/*!
 * Newton iteration from t_init, with a central-difference derivative when
 * df is empty. Falls back to bisect_root on [t0, t1] when an iterate leaves
 * the bracket, the derivative is below 1e-14, or the iteration cap is hit.
 */
RootResult newton_root(ScalarFn const& f, ScalarFn const& df, double t_init, double t0,
                       double t1, SolverConfig const& cfg);

struct MinResult
{
    double t = 0.0;
    double value = 0.0;
};

/*!
 * Global-ish minimum on [t0, t1]: uniform sampling with
 * max(8, time_samples_per_unit (t1 - t0)) points, then golden-section
 * refinement around the best sample down to eps_root. The result is never
 * worse than the best sample.
 */
MinResult minimize_1d(ScalarFn const& f, double t0, double t1, SolverConfig const& cfg);

//! Number of uniform samples minimize_1d takes on an interval of this length.
int sample_count(double span, SolverConfig const& cfg);

//---------------------------------------------------------------------------//
// Symmetric 3x3 eigenproblem
//---------------------------------------------------------------------------//

struct EigenPair
{
    double value;
    Vec3 vector;
};

//! Smallest eigenpair via the closed-form 3x3 solution. Throws on asymmetry > 1e-9.
EigenPair min_eigenpair_sym3(Mat3 const& s);
double min_eigenvalue_sym3(Mat3 const& s);

}  // namespace sweptvol
