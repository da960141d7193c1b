#include "sweptvol/query.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

#include "sweptvol/parallel.hpp"

namespace sweptvol {

void QueryConfig::validate() const
{
    solver.validate();
    if (!(spatial_resolution > 0))
        throw InvalidInput("spatial_resolution must be positive");
    if (!(march_fraction > 0 && march_fraction <= 1))
        throw InvalidInput("march_fraction must lie in (0, 1]");
}

void GridSpec::validate() const
{
    for (auto d : dims)
    {
        if (d < 2)
            throw InvalidInput("grid needs at least 2 samples per axis");
    }
    if (!(bounds.max.array() >= bounds.min.array()).all())
        throw InvalidInput("grid bounds are empty");
}

Vec3 GridSpec::point(std::size_t x, std::size_t y, std::size_t z) const
{
    Vec3 f(double(x) / (dims[0] - 1), double(y) / (dims[1] - 1), double(z) / (dims[2] - 1));
    return bounds.min + f.cwiseProduct(bounds.max - bounds.min);
}

//---------------------------------------------------------------------------//

namespace {

constexpr std::size_t max_samples = 1000000;

/*!
 * Field of one cell entry at a fixed point, as a function of time: the
 * procedure at the moved-back point while it lies in the area.
 */
class EntryField
{
  public:
    EntryField(SweptVolumeRep const& rep, CellEntry const& e, Vec3 const& p, QueryConfig const& cfg)
        : rep_(rep), patch_(rep.base.patches[e.patch]), p_(p), cfg_(cfg), entry_(e)
    {
    }

    double operator()(double t) const
    {
        Vec3 q = rep_.motion.inverse_apply(t, p_);
        if (area_contains(patch_.area, q))
            return eval_procedure(patch_.procedure, q);
        return far_field + area_distance(patch_.area, q);
    }

    //! Times at which the moved-back point may lie in the area.
    std::vector<TimeInterval> gate() const
    {
        Area const& area = patch_.area;
        auto const& motion = rep_.motion;
        double r;
        std::function<double(double)> g;
        if (auto const* ball = std::get_if<Ball3>(&area))
        {
            r = ball->centre.norm();
            g = [this, ball](double t) {
                return (p_ - rep_.motion.apply(t, ball->centre)).norm() - ball->radius;
            };
        }
        else
        {
            r = 0.0;
            for (auto const& c : std::get<Box3>(area).corners())
                r = std::max(r, c.norm());
            g = [this, &area](double t) {
                return area_distance(area, rep_.motion.inverse_apply(t, p_));
            };
        }
        auto lip = [&motion, r](double a, double b) { return motion.speed_bound(a, b, r); };
        double span = motion.upper() - motion.lower();
        double step = span > 0 ? span / rep_.params.time_samples
                               : std::numeric_limits<double>::infinity();
        return solve_contact_set(g, lip, entry_.t0, entry_.t1, rep_.params.contact_tol, step);
    }

    std::size_t samples(TimeInterval const& w) const
    {
        double reach = area_radius(patch_.area) + area_centre(patch_.area).norm();
        double len = w.length();
        if (!(len > 0))
            return 1;
        double lip = rep_.motion.speed_bound(w.t0, w.t1, reach);
        double delta = cfg_.spatial_resolution * rep_.bound.diagonal();
        double n = std::ceil(lip * len / delta) + 1;
        return std::size_t(std::clamp(n, 8.0, double(max_samples)));
    }

    /*!
     * Smallest field value over the gated windows. Stops scanning once a
     * value below `stop` is seen.
     */
    MinResult minimum(double stop, bool* stopped) const
    {
        MinResult best{entry_.t0, std::numeric_limits<double>::infinity()};
        for (auto const& w : gate())
        {
            std::size_t n = samples(w);
            double h = n > 1 ? w.length() / double(n - 1) : 0.0;
            std::size_t kbest = 0;
            double vbest = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < n; ++k)
            {
                double t = k + 1 == n ? w.t1 : w.t0 + double(k) * h;
                double v = (*this)(t);
                if (v < vbest)
                {
                    vbest = v;
                    kbest = k;
                }
                if (v < stop)
                {
                    if (stopped)
                        *stopped = true;
                    if (v < best.value)
                        best = {t, v};
                    return best;
                }
            }
            double tb = kbest + 1 == n ? w.t1 : w.t0 + double(kbest) * h;
            if (vbest < best.value)
                best = {tb, vbest};
            if (n > 1 && vbest < far_field)
            {
                double lo = std::max(w.t0, tb - h), hi = std::min(w.t1, tb + h);
                SolverConfig local = cfg_.solver;
                local.time_samples_per_unit = int(std::min(double(INT_MAX), std::ceil(8 / (hi - lo))));
                auto polished = minimize_1d(*this, lo, hi, local);
                if (polished.value < best.value)
                    best = polished;
            }
        }
        return best;
    }

  private:
    SweptVolumeRep const& rep_;
    LocalPatch const& patch_;
    Vec3 p_;
    QueryConfig const& cfg_;
    CellEntry entry_;
};

struct CellValue
{
    double value = std::numeric_limits<double>::infinity();
    std::optional<Witness> witness;
    bool stopped = false;
};

CellValue cell_value(SweptVolumeRep const& rep, std::size_t cell, Vec3 const& p,
                     QueryConfig const& cfg, bool early)
{
    CellValue out;
    double stop = early ? -10 * cfg.solver.eps_value : -std::numeric_limits<double>::infinity();
    for (auto const& e : rep.cells[cell].entries)
    {
        EntryField f(rep, e, p, cfg);
        bool stopped = false;
        auto m = f.minimum(stop, &stopped);
        if (m.value < out.value)
        {
            out.value = m.value;
            out.witness = Witness{e.patch, m.t};
        }
        if (stopped)
        {
            out.stopped = true;
            break;
        }
    }
    return out;
}

}  // namespace

MembershipResult point_membership(SweptVolumeRep const& rep, Vec3 const& p, QueryConfig const& cfg)
{
    MembershipResult r;
    auto loc = rep.locate(p);
    if (!loc.cell)
    {
        r.far = true;
        return r;
    }
    auto cv = cell_value(rep, *loc.cell, p, cfg, cfg.early_exit);
    r.inside = cv.value <= 0;
    if (cv.value < far_field)
    {
        r.signed_distance = cv.value;
        r.witness = cv.witness;
        r.exact = rep.base.signed_distance_exact && !cv.stopped;
    }
    return r;
}

std::vector<TimeInterval> time_witnesses(SweptVolumeRep const& rep, Vec3 const& p,
                                         QueryConfig const& cfg)
{
    std::vector<TimeInterval> out;
    auto loc = rep.locate(p);
    if (!loc.cell)
        return out;
    SolverConfig bis = cfg.solver;
    bis.eps_root = std::min(bis.eps_root, rep.params.contact_tol);
    for (auto const& e : rep.cells[*loc.cell].entries)
    {
        EntryField f(rep, e, p, cfg);
        auto sign = [&f](double t) { return f(t) <= 0 ? -1.0 : 1.0; };
        for (auto const& w : f.gate())
        {
            std::size_t n = f.samples(w);
            double h = n > 1 ? w.length() / double(n - 1) : 0.0;
            auto time = [&](std::size_t k) { return k + 1 == n ? w.t1 : w.t0 + double(k) * h; };
            bool in = false;
            double start = w.t0;
            for (std::size_t k = 0; k < n; ++k)
            {
                double t = time(k);
                bool now = f(t) <= 0;
                if (now && !in)
                    start = k == 0 ? t : bisect_root(sign, time(k - 1), t, bis).t;
                if (!now && in)
                    out.push_back({start, bisect_root(sign, time(k - 1), t, bis).t});
                in = now;
            }
            if (in)
                out.push_back({start, w.t1});
        }
    }
    return merge_intervals(std::move(out), rep.params.contact_tol);
}

//---------------------------------------------------------------------------//

namespace {

struct Transition
{
    double s;
    bool entering;
    double step;
    double diag;
};

/*!
 * March the ray cell by cell, calling `emit` on each change of the inside
 * verdict; stops when emit returns false.
 */
template<class Emit>
void march(SweptVolumeRep const& rep, Ray const& ray, QueryConfig const& cfg, Emit&& emit)
{
    SolverConfig bis = cfg.solver;
    std::optional<bool> state;
    for (auto const& rc : rep.tree.along_ray(ray))
    {
        double diag = rep.cells[rc.cell].box.diagonal();
        double step = std::max(diag * cfg.march_fraction, 1e-12);
        auto inside = [&](double s) {
            return cell_value(rep, rc.cell, ray.at(s), cfg, true).value <= 0;
        };
        double len = rc.s1 - rc.s0;
        auto n = std::size_t(std::max(1.0, std::ceil(len / step)));
        double h = len / double(n);
        double prev_s = rc.s0;
        bool now = inside(rc.s0);
        if (!state)
        {
            state = now;
            if (now && !emit(Transition{rc.s0, true, step, diag}))
                return;
        }
        else if (now != *state)
        {
            state = now;
            if (!emit(Transition{rc.s0, now, step, diag}))
                return;
        }
        if (!(len > 0))
            continue;
        for (std::size_t k = 1; k <= n; ++k)
        {
            double s = k == n ? rc.s1 : rc.s0 + double(k) * h;
            bool cur = inside(s);
            if (cur != *state)
            {
                auto sign = [&](double x) { return inside(x) == cur ? -1.0 : 1.0; };
                double at = bisect_root(sign, prev_s, s, bis).t;
                state = cur;
                if (!emit(Transition{at, cur, step, diag}))
                    return;
            }
            prev_s = s;
        }
    }
}

}  // namespace

std::optional<RayHit> ray_intersect_first(SweptVolumeRep const& rep, Ray const& ray,
                                          QueryConfig const& cfg)
{
    std::optional<RayHit> hit;
    march(rep, ray, cfg, [&](Transition const& tr) {
        if (!tr.entering)
            return true;
        hit = RayHit{tr.s, ray.at(tr.s), true, false};
        return false;
    });
    return hit;
}

std::vector<RayHit> ray_intersect_all(SweptVolumeRep const& rep, Ray const& ray,
                                      QueryConfig const& cfg)
{
    std::vector<Transition> raw;
    march(rep, ray, cfg, [&](Transition const& tr) {
        raw.push_back(tr);
        return true;
    });
    std::vector<RayHit> out;
    for (std::size_t k = 0; k < raw.size(); ++k)
    {
        auto const& tr = raw[k];
        double dedup = 1e-6 * tr.diag;
        if (tr.entering && k + 1 < raw.size() && !raw[k + 1].entering
            && raw[k + 1].s - tr.s <= tr.step)
        {
            double s = 0.5 * (tr.s + raw[k + 1].s);
            out.push_back({s, ray.at(s), true, true});
            ++k;
            continue;
        }
        if (!out.empty() && tr.s - out.back().s <= dedup)
            continue;
        out.push_back({tr.s, ray.at(tr.s), tr.entering, false});
    }
    return out;
}

//---------------------------------------------------------------------------//

namespace {

double clamp_field(double v)
{
    if (std::isnan(v))
        return far_field;
    return std::clamp(v, -far_field, far_field);
}

Box3 solid_bound(SolidRef solid)
{
    if (auto const* const* rep = std::get_if<LocalImplicitRep const*>(&solid))
        return (*rep)->bound;
    return std::get<SweptVolumeRep const*>(solid)->bound;
}

class FieldSampler
{
  public:
    FieldSampler(SolidRef solid, QueryConfig const& cfg) : solid_(solid), cfg_(cfg)
    {
        if (auto const* const* rep = std::get_if<LocalImplicitRep const*>(&solid))
            eval_.emplace(**rep);
    }

    double operator()(Vec3 const& p) const
    {
        if (eval_)
            return clamp_field(eval_->value(p));
        auto m = point_membership(*std::get<SweptVolumeRep const*>(solid_), p, cfg_);
        return clamp_field(m.signed_distance);
    }

  private:
    SolidRef solid_;
    QueryConfig const& cfg_;
    std::optional<RepEvaluator> eval_;
};

template<class Fn>
ScalarGrid fill_grid(GridSpec const& spec, Fn const& fn)
{
    spec.validate();
    ScalarGrid g;
    g.spec = spec;
    g.values.resize(spec.size());
    std::size_t nx = spec.dims[0], ny = spec.dims[1];
    parallel_for(g.values.size(), [&](std::size_t i) {
        std::size_t x = i % nx, y = (i / nx) % ny, z = i / (nx * ny);
        g.values[i] = fn(spec.point(x, y, z));
    });
    return g;
}

}  // namespace

double solid_field(SolidRef solid, Vec3 const& p, QueryConfig const& cfg)
{
    return FieldSampler(solid, cfg)(p);
}

ScalarGrid sample_field(SolidRef solid, GridSpec const& spec, QueryConfig const& cfg)
{
    FieldSampler f(solid, cfg);
    return fill_grid(spec, f);
}

double difference_field(double object_field, double swept_field)
{
    double g = swept_field > 0 ? -swept_field
                               : std::max(-swept_field, std::numeric_limits<double>::min());
    return std::max(object_field, g);
}

ScalarGrid subtract(SolidRef object, SweptVolumeRep const& swept, GridSpec const& spec,
                    QueryConfig const& cfg)
{
    FieldSampler fo(object, cfg);
    FieldSampler fs(&swept, cfg);
    auto g = fill_grid(spec, [&](Vec3 const& p) { return difference_field(fo(p), fs(p)); });
    g.degenerate = !solid_bound(object).intersects(swept.bound);
    return g;
}

bool subtract_member(SolidRef object, SweptVolumeRep const& swept, Vec3 const& p,
                     QueryConfig const& cfg)
{
    bool in_object = solid_field(object, p, cfg) <= 0;
    return in_object && !point_membership(swept, p, cfg).inside;
}

}  // namespace sweptvol
