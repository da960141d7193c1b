#include "sweptvol/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace sweptvol {

void SolverConfig::validate() const
{
    if (!(eps_root > 0) || !(eps_value > 0))
        throw InvalidInput("SolverConfig: tolerances must be positive");
    if (max_iter < 8)
        throw InvalidInput("SolverConfig: max_iter must be at least 8");
    if (time_samples_per_unit <= 0)
        throw InvalidInput("SolverConfig: time_samples_per_unit must be positive");
}

//---------------------------------------------------------------------------//

NormalEquations::NormalEquations(int unknowns)
    : ata_(Eigen::MatrixXd::Zero(unknowns, unknowns)), rhs_(Eigen::VectorXd::Zero(unknowns))
{
    if (unknowns <= 0)
        throw InvalidInput("NormalEquations: need at least one unknown");
}

void NormalEquations::add(std::span<double const> basis, double weight, double target)
{
    auto n = unknowns();
    if (static_cast<int>(basis.size()) != n)
        throw InvalidInput("wls_fit: row size does not match the number of unknowns");
    if (!std::isfinite(weight) || weight < 0 || !std::isfinite(target))
        throw InvalidInput("wls_fit: non-finite row or negative weight");
    for (double b : basis)
    {
        if (!std::isfinite(b))
            throw InvalidInput("wls_fit: non-finite row");
    }
    ++rows_;
    weight_sum_ += weight;
    if (weight == 0)
        return;
    Eigen::Map<Eigen::VectorXd const> x(basis.data(), n);
    ata_.selfadjointView<Eigen::Lower>().rankUpdate(x, weight);
    rhs_ += weight * target * x;
}

void NormalEquations::add(NormalEquations const& other, double scale)
{
    if (other.unknowns() != unknowns())
        throw InvalidInput("NormalEquations: size mismatch");
    ata_ += scale * other.ata_;
    rhs_ += scale * other.rhs_;
    weight_sum_ += scale * other.weight_sum_;
    rows_ += other.rows_;
}

WlsResult NormalEquations::solve() const
{
    if (!(weight_sum_ > 0))
        throw InvalidInput("wls_fit: all weights are zero");
    auto n = unknowns();
    Eigen::MatrixXd a = ata_.selfadjointView<Eigen::Lower>();

    WlsResult out;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
    double lmin = es.eigenvalues().minCoeff();
    if (!(lmax > 0) || lmin < 1e-10 * lmax)
    {
        double trace = a.trace();
        double ridge = 1e-8 * (trace > 0 ? trace : 1.0) / n;
        a.diagonal().array() += ridge;
        out.degraded = true;
    }
    out.coeffs = a.ldlt().solve(rhs_);
    return out;
}

WlsResult wls_fit(std::span<WlsRow const> rows)
{
    if (rows.empty())
        throw InvalidInput("wls_fit: no rows");
    NormalEquations ne(static_cast<int>(rows.front().basis.size()));
    for (auto const& r : rows)
        ne.add(r.basis, r.weight, r.target);
    return ne.solve();
}

double wls_residual(std::span<WlsRow const> rows, Eigen::VectorXd const& c)
{
    double s = 0.0;
    for (auto const& r : rows)
    {
        Eigen::Map<Eigen::VectorXd const> x(r.basis.data(), static_cast<Eigen::Index>(r.basis.size()));
        double e = x.dot(c) - r.target;
        s += r.weight * e * e;
    }
    return s;
}

//---------------------------------------------------------------------------//

RootResult bisect_root(ScalarFn const& f, double t0, double t1, SolverConfig const& cfg)
{
    if (t0 > t1)
        std::swap(t0, t1);
    double f0 = f(t0);
    double f1 = f(t1);
    RootResult res;
    res.used_bisection = true;
    if (f0 == 0)
    {
        res.t = t0;
        return res;
    }
    if (f1 == 0)
    {
        res.t = t1;
        return res;
    }
    if ((f0 < 0) == (f1 < 0))
        throw BracketError("bisect_root: no sign change on the bracket");

    double lo = t0, hi = t1;
    while (hi - lo > cfg.eps_root)
    {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        ++res.iterations;
        double fm = f(mid);
        if (fm == 0)
        {
            res.t = mid;
            return res;
        }
        if ((fm < 0) == (f0 < 0))
        {
            lo = mid;
            f0 = fm;
        }
        else
        {
            hi = mid;
        }
    }
    res.t = 0.5 * (lo + hi);
    return res;
}

RootResult newton_root(ScalarFn const& f, ScalarFn const& df, double t_init, double t0,
                       double t1, SolverConfig const& cfg)
{
    if (t0 > t1)
        std::swap(t0, t1);
    if (t_init < t0 || t_init > t1)
        throw InvalidInput("newton_root: initial guess outside the bracket");

    auto deriv = [&](double t) {
        if (df)
            return df(t);
        double h = std::max(1e-7, 1e-7 * std::abs(t));
        double a = std::max(t0, t - h);
        double b = std::min(t1, t + h);
        if (b <= a)
            return 0.0;
        return (f(b) - f(a)) / (b - a);
    };

    RootResult res;
    double t = t_init;
    for (int it = 0; it < cfg.max_iter; ++it)
    {
        double ft = f(t);
        if (ft == 0)
        {
            res.t = t;
            return res;
        }
        double d = deriv(t);
        if (!(std::abs(d) >= 1e-14))
            break;
        double step = ft / d;
        double next = t - step;
        ++res.iterations;
        if (!(next >= t0 && next <= t1))
            break;
        t = next;
        if (std::abs(step) <= 0.5 * cfg.eps_root)
        {
            res.t = t;
            return res;
        }
    }
    RootResult b = bisect_root(f, t0, t1, cfg);
    b.iterations += res.iterations;
    return b;
}

//---------------------------------------------------------------------------//

int sample_count(double span, SolverConfig const& cfg)
{
    double n = std::ceil(cfg.time_samples_per_unit * span);
    return static_cast<int>(std::clamp(n, 8.0, 1e7));
}

MinResult minimize_1d(ScalarFn const& f, double t0, double t1, SolverConfig const& cfg)
{
    if (t0 > t1)
        std::swap(t0, t1);
    MinResult best{t0, f(t0)};
    if (t1 == t0)
        return best;

    int n = sample_count(t1 - t0, cfg);
    double h = (t1 - t0) / (n - 1);
    int kbest = 0;
    for (int k = 1; k < n; ++k)
    {
        double t = k == n - 1 ? t1 : t0 + k * h;
        double v = f(t);
        if (v < best.value)
        {
            best = {t, v};
            kbest = k;
        }
    }

    // Golden-section on the two neighbouring gaps of the best sample.
    double lo = t0 + std::max(0, kbest - 1) * h;
    double hi = std::min(t1, t0 + std::min(n - 1, kbest + 1) * h);
    constexpr double invphi = 0.6180339887498949;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 4 * cfg.max_iter && hi - lo > cfg.eps_root; ++it)
    {
        if (f1 <= f2)
        {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = f(x1);
        }
        else
        {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = f(x2);
        }
    }
    if (f1 < best.value)
        best = {x1, f1};
    if (f2 < best.value)
        best = {x2, f2};
    return best;
}

//---------------------------------------------------------------------------//

EigenPair min_eigenpair_sym3(Mat3 const& s)
{
    if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-9)
        throw InvalidInput("min_eigenvalue_sym3: matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Mat3> es;
    es.computeDirect(s);
    return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

double min_eigenvalue_sym3(Mat3 const& s)
{
    return min_eigenpair_sym3(s).value;
}

}  // namespace sweptvol
