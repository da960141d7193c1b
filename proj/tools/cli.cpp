#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "sweptvol/grid_io.hpp"
#include "sweptvol/mpu.hpp"
#include "sweptvol/point_cloud.hpp"
#include "sweptvol/query.hpp"
#include "sweptvol/serialize.hpp"
#include "sweptvol/slim.hpp"
#include "sweptvol/sweep.hpp"

namespace sweptvol::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

//! Non-zero exit carrying a message.
struct Failure
{
    int code;
    std::string message;
};

class Manifest
{
  public:
    explicit Manifest(std::vector<std::string> const& args)
    {
        j_["command"] = Json::array({"sweptvol"});
        for (auto const& a : args)
            j_["command"].push_back(a);
        j_["version"] = "0.1.0";
        j_["inputs"] = Json::object();
        j_["outputs"] = Json::object();
        j_["parameters"] = Json::object();
        j_["timings"] = Json::object();
    }

    void input(std::string const& path) { j_["inputs"][path] = sha256_file(path); }
    void output(std::string const& path) { j_["outputs"][path] = sha256_file(path); }
    Json& parameters() { return j_["parameters"]; }
    void seed(std::uint64_t s) { j_["seed"] = s; }
    void timing(std::string const& key, double s) { j_["timings"][key] = s; }

    void write_for(std::string const& output)
    {
        write_text_file(output + ".manifest.json", dump_json(j_));
    }

  private:
    Json j_;
};

Json vec_json(Vec3 const& v)
{
    return Json::array({v[0], v[1], v[2]});
}

Json finite_or_null(double v)
{
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

//---------------------------------------------------------------------------//
// implicitize
//---------------------------------------------------------------------------//

struct ImplicitizeArgs
{
    std::string method, input, output;
    MpuParams mpu;
    SlimParams slim;
};

int cmd_implicitize(ImplicitizeArgs const& a, std::vector<std::string> const& args, std::ostream& out)
{
    auto t0 = Clock::now();
    Manifest manifest(args);
    manifest.input(a.input);
    auto cloud = load_xyzn(a.input);

    Json summary{{"command", "implicitize"}, {"method", a.method}, {"points", cloud.size()}};
    LocalImplicitRep rep;
    bool flagged = false;
    if (a.method == "mpu")
    {
        MpuStats stats;
        rep = mpu_build(cloud, a.mpu, &stats);
        summary["cubes"] = stats.cubes.size();
        summary["max_taubin_error"] = stats.max_taubin_error;
        summary["flagged"] = stats.flagged;
        summary["failures"] = stats.failures;
        flagged = stats.flagged > 0;
        manifest.parameters() = {{"alpha", a.mpu.alpha},
                                 {"n_min", a.mpu.n_min},
                                 {"eps0", a.mpu.eps0},
                                 {"theta_sharp", a.mpu.theta_sharp},
                                 {"theta_corner", a.mpu.theta_corner},
                                 {"max_depth", a.mpu.max_depth}};
    }
    else
    {
        SlimStats stats;
        rep = slim_build(cloud, a.slim, &stats);
        std::size_t covered = 0;
        for (auto const& p : cloud.points())
        {
            bool in = std::any_of(rep.patches.begin(), rep.patches.end(), [&](LocalPatch const& lp) {
                return std::get<Ball3>(lp.area).contains_open(p.position);
            });
            covered += in ? 1 : 0;
        }
        summary["rho0"] = stats.rho0;
        summary["lambda"] = stats.lambda;
        summary["levels"] = stats.levels;
        summary["forced"] = stats.forced;
        summary["degraded"] = stats.degraded;
        summary["coverage"] = double(covered) / double(cloud.size());
        flagged = stats.forced > 0;
        manifest.parameters() = {{"rho0_fraction", a.slim.rho0_fraction},
                                 {"g", a.slim.g},
                                 {"t_mdl", a.slim.t_mdl},
                                 {"levels_kept", a.slim.levels_kept}};
        manifest.seed(a.slim.rng_seed);
    }
    summary["patches"] = rep.size();
    write_text_file(a.output, dump_json(rep_to_json(rep)));
    manifest.output(a.output);
    manifest.timing("total_s", seconds_since(t0));
    manifest.write_for(a.output);
    out << summary.dump() << '\n';
    return flagged ? numeric_failure : ok;
}

//---------------------------------------------------------------------------//
// sweep
//---------------------------------------------------------------------------//

struct SweepArgs
{
    std::string base, motion, output, weight_grid;
    SweepParams params;
    bool base_ref = false;
    bool verify = false;
};

//! Every exact interval lies in the union of fast intervals of the same patch and cell.
bool fast_contains_exact(SweptVolumeRep const& fast, SweptVolumeRep const& exact)
{
    if (fast.cells.size() != exact.cells.size())
        return false;
    for (std::size_t c = 0; c < exact.cells.size(); ++c)
    {
        for (auto const& e : exact.cells[c].entries)
        {
            bool covered = std::any_of(fast.cells[c].entries.begin(), fast.cells[c].entries.end(),
                                       [&](CellEntry const& f) {
                                           return f.patch == e.patch && f.t0 <= e.t0 && e.t1 <= f.t1;
                                       });
            if (!covered)
                return false;
        }
    }
    return true;
}

int cmd_sweep(SweepArgs a, std::vector<std::string> const& args, std::ostream& out,
              std::ostream& err)
{
    auto t0 = Clock::now();
    Manifest manifest(args);
    manifest.input(a.base);
    manifest.input(a.motion);
    auto base = rep_from_json(load_json_file(a.base));
    auto motion = motion_from_json(load_json_file(a.motion));
    if (!a.weight_grid.empty())
    {
        manifest.input(a.weight_grid);
        a.params.weight = to_weight_grid(load_grid(a.weight_grid));
    }

    Json notes = Json::array();
    if (motion.lower() == motion.upper())
    {
        std::string note = "motion domain is degenerate; the structure is a static placement";
        err << "note: " << note << '\n';
        notes.push_back(note);
    }

    SweepStats stats;
    auto rep = build_swept_rep(base, motion, a.params, &stats);
    manifest.timing("build_s", seconds_since(t0));

    std::size_t entries = 0;
    for (auto const& c : rep.cells)
        entries += c.entries.size();
    Json summary{{"command", "sweep"},
                 {"cells", rep.cells.size()},
                 {"mean_entries", double(entries) / double(rep.cells.size())},
                 {"cost", stats.cost},
                 {"depth", rep.tree.depth()},
                 {"pairs_solved", stats.pairs_solved},
                 {"pairs_pruned", stats.pairs_pruned},
                 {"notes", notes}};

    int code = ok;
    if (a.verify)
    {
        SweepParams other = a.params;
        other.fast_mode = !other.fast_mode;
        auto rep2 = build_swept_rep(base, motion, other);
        bool good = a.params.fast_mode ? fast_contains_exact(rep, rep2)
                                       : fast_contains_exact(rep2, rep);
        summary["verify"] = good;
        if (!good)
        {
            err << "error: fast-mode intervals do not contain the exact intervals\n";
            code = numeric_failure;
        }
    }

    std::optional<std::string> ref;
    if (a.base_ref)
        ref = std::filesystem::absolute(a.base).lexically_normal().string();
    write_text_file(a.output, dump_json(swept_to_json(rep, ref)));
    manifest.parameters() = sweep_params_to_json(a.params);
    if (a.params.weight)
        manifest.parameters()["weight"] = a.weight_grid;
    manifest.output(a.output);
    manifest.timing("total_s", seconds_since(t0));
    manifest.write_for(a.output);
    out << summary.dump() << '\n';
    return code;
}

//---------------------------------------------------------------------------//
// query
//---------------------------------------------------------------------------//

struct QueryArgs
{
    std::string swept, file, output, object;
    std::vector<double> coords;
    std::vector<std::uint32_t> dims;
    std::vector<double> bounds;
    bool all = false;
    bool ascii = false;
    QueryConfig cfg;
};

std::vector<Vec3> read_points(QueryArgs const& a)
{
    std::vector<Vec3> pts;
    if (!a.file.empty())
    {
        std::istringstream in(read_text_file(a.file));
        std::string line;
        std::size_t n = 0;
        while (std::getline(in, line))
        {
            ++n;
            auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#')
                continue;
            std::istringstream ss(line);
            Vec3 p;
            std::string rest;
            if (!(ss >> p[0] >> p[1] >> p[2]) || (ss >> rest) || !p.allFinite())
                throw ParseError(n, "expected three coordinates");
            pts.push_back(p);
        }
        return pts;
    }
    if (a.coords.size() != 3)
        throw InvalidInput("expected three coordinates");
    Vec3 p(a.coords[0], a.coords[1], a.coords[2]);
    if (!p.allFinite())
        throw InvalidInput("coordinates must be finite");
    pts.push_back(p);
    return pts;
}

GridSpec grid_spec(QueryArgs const& a, Box3 const& fallback)
{
    GridSpec s;
    if (a.dims.size() != 3)
        throw InvalidInput("--dims takes three values");
    s.dims = {a.dims[0], a.dims[1], a.dims[2]};
    s.bounds = fallback;
    if (!a.bounds.empty())
    {
        if (a.bounds.size() != 6)
            throw InvalidInput("--bounds takes six values");
        s.bounds = {Vec3(a.bounds[0], a.bounds[1], a.bounds[2]),
                    Vec3(a.bounds[3], a.bounds[4], a.bounds[5])};
    }
    s.validate();
    return s;
}

SweptVolumeRep load_swept(std::string const& path)
{
    auto dir = std::filesystem::path(path).parent_path();
    return swept_from_json(load_json_file(path), dir);
}

int cmd_query(std::string const& sub, QueryArgs const& a, std::vector<std::string> const& args,
              std::ostream& out, std::ostream& err)
{
    auto t0 = Clock::now();
    a.cfg.validate();
    auto rep = load_swept(a.swept);

    if (sub == "point" || sub == "times")
    {
        for (auto const& p : read_points(a))
        {
            Json j{{"query", sub}, {"point", vec_json(p)}};
            if (sub == "point")
            {
                auto m = point_membership(rep, p, a.cfg);
                j["inside"] = m.inside;
                j["far"] = m.far;
                j["distance"] = finite_or_null(m.signed_distance);
                j["exact"] = m.exact;
                if (m.witness)
                    j["witness"] = {{"patch", m.witness->patch}, {"t", m.witness->t}};
                else
                    j["witness"] = nullptr;
            }
            else
            {
                Json iv = Json::array();
                for (auto const& w : time_witnesses(rep, p, a.cfg))
                    iv.push_back({w.t0, w.t1});
                j["intervals"] = iv;
            }
            out << j.dump() << '\n';
        }
        return ok;
    }

    if (sub == "ray")
    {
        if (a.coords.size() != 6)
            throw InvalidInput("ray takes six numbers: origin and direction");
        Vec3 o(a.coords[0], a.coords[1], a.coords[2]);
        Vec3 d(a.coords[3], a.coords[4], a.coords[5]);
        if (!o.allFinite() || !d.allFinite() || d.norm() == 0)
            throw InvalidInput("ray needs a finite origin and a non-zero direction");
        Ray ray(o, d.normalized());
        std::vector<RayHit> hits;
        if (a.all)
            hits = ray_intersect_all(rep, ray, a.cfg);
        else if (auto h = ray_intersect_first(rep, ray, a.cfg))
            hits.push_back(*h);
        Json jh = Json::array();
        for (auto const& h : hits)
        {
            jh.push_back({{"s", h.s},
                          {"point", vec_json(h.point)},
                          {"entering", h.entering},
                          {"grazing", h.grazing}});
        }
        out << Json{{"query", "ray"}, {"all", a.all}, {"hits", jh}}.dump() << '\n';
        return ok;
    }

    // Grid commands.
    if (a.output.empty())
        throw InvalidInput("--output is required");
    Manifest manifest(args);
    manifest.input(a.swept);
    ScalarGrid grid;
    if (sub == "subtract")
    {
        if (a.object.empty())
            throw InvalidInput("--object is required");
        manifest.input(a.object);
        auto j = load_json_file(a.object);
        std::optional<LocalImplicitRep> obj_rep;
        std::optional<SweptVolumeRep> obj_swept;
        SolidRef solid;
        if (j.value("format", "") == "sweptvol-swept")
        {
            obj_swept = swept_from_json(j, std::filesystem::path(a.object).parent_path());
            solid = &*obj_swept;
        }
        else
        {
            obj_rep = rep_from_json(j);
            solid = &*obj_rep;
        }
        Box3 ob = obj_swept ? obj_swept->bound : obj_rep->bound;
        grid = subtract(solid, rep, grid_spec(a, ob), a.cfg);
        if (grid.degenerate)
            err << "warning: object lies fully outside the swept bound; grid is degenerate\n";
    }
    else
        grid = sample_field(&rep, grid_spec(a, rep.bound), a.cfg);

    std::size_t inside = std::count_if(grid.values.begin(), grid.values.end(),
                                       [](double v) { return v <= 0; });
    save_grid(a.output, grid, a.ascii);
    manifest.parameters() = {{"dims", grid.spec.dims},
                             {"bounds", {vec_json(grid.spec.bounds.min), vec_json(grid.spec.bounds.max)}},
                             {"ascii", a.ascii},
                             {"spatial_resolution", a.cfg.spatial_resolution}};
    manifest.output(a.output);
    manifest.timing("total_s", seconds_since(t0));
    manifest.write_for(a.output);
    out << Json{{"query", sub},
                {"output", a.output},
                {"dims", grid.spec.dims},
                {"inside", inside},
                {"degenerate", grid.degenerate}}
               .dump()
        << '\n';
    return ok;
}

}  // namespace

//---------------------------------------------------------------------------//

std::string sha256_file(std::string const& path)
{
    std::string data = read_text_file(path);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    std::ostringstream ss;
    for (unsigned int i = 0; i < len; ++i)
        ss << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return ss.str();
}

int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Swept volumes of implicit solids under rigid motion", "sweptvol"};
    app.require_subcommand(1);

    ImplicitizeArgs ia;
    auto* imp = app.add_subcommand("implicitize", "Fit a local implicit representation to a point cloud");
    imp->add_option("--method", ia.method, "mpu or slim")
        ->required()
        ->check(CLI::IsMember({"mpu", "slim"}));
    imp->add_option("--input", ia.input, "x y z nx ny nz point file")->required();
    imp->add_option("--output", ia.output, "representation JSON")->required();
    imp->add_option("--eps0", ia.mpu.eps0, "MPU Taubin threshold")->capture_default_str();
    imp->add_option("--nmin", ia.mpu.n_min, "MPU minimum support size")->capture_default_str();
    imp->add_option("--alpha", ia.mpu.alpha, "MPU support radius factor")->capture_default_str();
    imp->add_option("--max-depth", ia.mpu.max_depth, "MPU octree depth cap")->capture_default_str();
    imp->add_option("--theta-sharp", ia.mpu.theta_sharp)->capture_default_str();
    imp->add_option("--theta-corner", ia.mpu.theta_corner)->capture_default_str();
    imp->add_option("--rho0", ia.slim.rho0_fraction, "Slim initial radius, fraction of the diagonal")
        ->capture_default_str();
    imp->add_option("--t-mdl", ia.slim.t_mdl, "Slim MDL scale, fraction of the diagonal")
        ->capture_default_str();
    imp->add_option("--g", ia.slim.g, "Slim radius ratio")->capture_default_str();
    imp->add_option("--seed", ia.slim.rng_seed, "Slim cover seed")->capture_default_str();
    imp->add_flag("--keep-levels", ia.slim.levels_kept, "Store coarser Slim levels");

    SweepArgs sa;
    auto* sw = app.add_subcommand("sweep", "Build the swept-volume structure");
    sw->add_option("--base", sa.base, "base representation JSON")->required();
    sw->add_option("--motion", sa.motion, "motion JSON")->required();
    sw->add_option("--output", sa.output, "swept structure JSON")->required();
    sw->add_flag("--fast", sa.params.fast_mode, "face equations only");
    sw->add_option("--time-samples", sa.params.time_samples)->capture_default_str();
    sw->add_option("--contact-tol", sa.params.contact_tol)->capture_default_str();
    sw->add_option("--max-cells", sa.params.max_cells)->capture_default_str();
    sw->add_option("--weight-grid", sa.weight_grid, "SVGRID1 weight file");
    sw->add_flag("--seed-path", sa.params.seed_splits_along_path, "seed splits along the path");
    sw->add_flag("--prune", sa.params.prune_by_distance, "skip pairs excluded by a distance bound");
    sw->add_flag("--base-ref", sa.base_ref, "store the base path instead of embedding it");
    sw->add_flag("--verify", sa.verify, "check fast-mode intervals contain exact ones");

    QueryArgs qa;
    std::string query_sub;
    auto* q = app.add_subcommand("query", "Query a swept structure");
    q->require_subcommand(1);
    q->add_option("--swept", qa.swept, "swept structure JSON")->required();
    q->add_option("--spatial-resolution", qa.cfg.spatial_resolution)->capture_default_str();
    auto* qp = q->add_subcommand("point", "Membership of points");
    qp->add_option("coords", qa.coords, "x y z")->expected(0, 3);
    qp->add_option("--file", qa.file, "file with one 'x y z' per line");
    auto* qt = q->add_subcommand("times", "Times at which points are covered");
    qt->add_option("coords", qa.coords, "x y z")->expected(0, 3);
    qt->add_option("--file", qa.file, "file with one 'x y z' per line");
    auto* qr = q->add_subcommand("ray", "Ray intersections");
    qr->add_option("coords", qa.coords, "ox oy oz dx dy dz")->expected(6);
    qr->add_flag("--all", qa.all, "report every crossing");
    auto* qs = q->add_subcommand("subtract", "Sample object minus swept volume on a grid");
    qs->add_option("--object", qa.object, "representation or swept JSON")->required();
    auto* qe = q->add_subcommand("export-grid", "Sample the swept field on a grid");
    for (auto* g : {qs, qe})
    {
        g->add_option("--dims", qa.dims, "nx ny nz")->expected(3)->required();
        g->add_option("--bounds", qa.bounds, "x0 y0 z0 x1 y1 z1")->expected(6);
        g->add_option("--output", qa.output, "grid file")->required();
        g->add_flag("--ascii", qa.ascii, "write the ASCII variant");
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try
    {
        app.parse(rev);
    }
    catch (CLI::ParseError const& e)
    {
        if (e.get_exit_code() == 0)
        {
            out << app.help();
            return ok;
        }
        err << "error: " << e.what() << '\n';
        return input_error;
    }

    try
    {
        if (*imp)
            return cmd_implicitize(ia, args, out);
        if (*sw)
            return cmd_sweep(sa, args, out, err);
        for (auto* s : {qp, qt, qr, qs, qe})
        {
            if (*s)
                return cmd_query(s->get_name(), qa, args, out, err);
        }
        err << "error: no command given\n";
        return input_error;
    }
    catch (ParseError const& e)
    {
        err << "error: " << e.what() << '\n';
        return input_error;
    }
    catch (InvalidInput const& e)
    {
        err << "error: " << e.what() << '\n';
        return input_error;
    }
    catch (DomainError const& e)
    {
        err << "error: " << e.what() << '\n';
        return input_error;
    }
    catch (Json::exception const& e)
    {
        err << "error: malformed document: " << e.what() << '\n';
        return input_error;
    }
    catch (std::exception const& e)
    {
        err << "error: " << e.what() << '\n';
        return numeric_failure;
    }
}

}  // namespace sweptvol::cli
