#include "sweptvol/serialize.hpp"

#include <fstream>
#include <sstream>

namespace sweptvol {

namespace {

Json vec(Vec3 const& v)
{
    return Json::array({v[0], v[1], v[2]});
}

Vec3 to_vec(Json const& j, char const* what)
{
    if (!j.is_array() || j.size() != 3)
        throw InvalidInput(std::string(what) + ": expected a 3-vector");
    Vec3 v;
    for (int k = 0; k < 3; ++k)
    {
        if (!j[k].is_number())
            throw InvalidInput(std::string(what) + ": non-numeric component");
        v[k] = j[k].get<double>();
    }
    return v;
}

Json const& field(Json const& j, char const* key)
{
    if (!j.is_object() || !j.contains(key))
        throw InvalidInput(std::string("missing field '") + key + "'");
    return j.at(key);
}

double number(Json const& j, char const* key)
{
    auto const& v = field(j, key);
    if (!v.is_number())
        throw InvalidInput(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

template<std::size_t N>
std::array<double, N> fixed_array(Json const& j, char const* what)
{
    if (!j.is_array() || j.size() != N)
        throw InvalidInput(std::string(what) + ": expected " + std::to_string(N) + " numbers");
    std::array<double, N> a{};
    for (std::size_t i = 0; i < N; ++i)
        a[i] = j[i].get<double>();
    return a;
}

Json box_json(Box3 const& b)
{
    return {{"min", vec(b.min)}, {"max", vec(b.max)}};
}

Box3 box_from(Json const& j)
{
    return {to_vec(field(j, "min"), "box min"), to_vec(field(j, "max"), "box max")};
}

Json patch_json(BivariatePatch const& p)
{
    auto c = p.coefficients();
    return {{"type", "bivariate"}, {"origin", vec(p.origin)}, {"u", vec(p.u)},
            {"v", vec(p.v)},       {"n", vec(p.n)},           {"coeffs", c}};
}

BivariatePatch patch_from(Json const& j)
{
    return BivariatePatch(to_vec(field(j, "origin"), "origin"), to_vec(field(j, "u"), "u"),
                          to_vec(field(j, "v"), "v"), to_vec(field(j, "n"), "n"),
                          fixed_array<6>(field(j, "coeffs"), "bivariate coeffs"));
}

Json procedure_json(LocalProcedure const& proc)
{
    if (auto const* q = std::get_if<Quadric3>(&proc))
        return {{"type", "quadric"}, {"coeffs", q->coeffs}};
    if (auto const* p = std::get_if<BivariatePatch>(&proc))
        return patch_json(*p);
    Json pieces = Json::array();
    for (auto const& p : std::get<MinOfPatches>(proc).pieces)
        pieces.push_back(patch_json(p));
    return {{"type", "min"}, {"pieces", pieces}};
}

LocalProcedure procedure_from(Json const& j)
{
    auto type = field(j, "type").get<std::string>();
    if (type == "quadric")
        return Quadric3(fixed_array<10>(field(j, "coeffs"), "quadric coeffs"));
    if (type == "bivariate")
        return patch_from(j);
    if (type == "min")
    {
        std::vector<BivariatePatch> pieces;
        for (auto const& p : field(j, "pieces"))
            pieces.push_back(patch_from(p));
        return MinOfPatches(std::move(pieces));
    }
    throw InvalidInput("unknown procedure type '" + type + "'");
}

Json area_json(Area const& a)
{
    if (auto const* b = std::get_if<Box3>(&a))
        return {{"type", "box"}, {"min", vec(b->min)}, {"max", vec(b->max)}};
    auto const& ball = std::get<Ball3>(a);
    return {{"type", "ball"}, {"centre", vec(ball.centre)}, {"radius", ball.radius}};
}

Area area_from(Json const& j)
{
    auto type = field(j, "type").get<std::string>();
    if (type == "box")
    {
        Box3 b = box_from(j);
        if (b.is_empty())
            throw InvalidInput("box area is empty");
        return b;
    }
    if (type == "ball")
    {
        double r = number(j, "radius");
        if (!(r > 0))
            throw InvalidInput("ball area radius must be positive");
        return Ball3(to_vec(field(j, "centre"), "centre"), r);
    }
    throw InvalidInput("unknown area type '" + type + "'");
}

Json patches_json(std::vector<LocalPatch> const& patches)
{
    Json out = Json::array();
    for (auto const& p : patches)
        out.push_back({{"area", area_json(p.area)}, {"procedure", procedure_json(p.procedure)}});
    return out;
}

std::vector<LocalPatch> patches_from(Json const& j)
{
    if (!j.is_array())
        throw InvalidInput("patches must be a list");
    std::vector<LocalPatch> out;
    for (auto const& p : j)
        out.push_back({area_from(field(p, "area")), procedure_from(field(p, "procedure"))});
    return out;
}

Json poly_json(PiecewisePoly const& p)
{
    Json out = Json::array();
    auto const& k = p.knots();
    for (std::size_t s = 0; s < p.segments(); ++s)
        out.push_back({{"span", {k[s], k[s + 1]}}, {"coeffs", p.coeffs()[s]}});
    return out;
}

PiecewisePoly poly_from(Json const& j, double a, double b, char const* name)
{
    if (j.is_null())
        return PiecewisePoly::constant(a, b, 0.0);
    if (j.is_number())
        return PiecewisePoly::constant(a, b, j.get<double>());
    if (!j.is_array() || j.empty())
        throw InvalidInput(std::string("motion component '") + name + "' must be a number or pieces");
    std::vector<double> knots;
    std::vector<std::vector<double>> coeffs;
    for (auto const& piece : j)
    {
        auto span = fixed_array<2>(field(piece, "span"), "span");
        if (knots.empty())
            knots.push_back(span[0]);
        else if (span[0] != knots.back())
            throw InvalidInput(std::string("motion component '") + name + "' has a gap between pieces");
        knots.push_back(span[1]);
        auto const& c = field(piece, "coeffs");
        if (!c.is_array() || c.empty())
            throw InvalidInput(std::string("motion component '") + name + "' has empty coefficients");
        coeffs.push_back(c.get<std::vector<double>>());
    }
    if (knots.front() != a || knots.back() != b)
        throw InvalidInput(std::string("motion component '") + name + "' must span the domain exactly");
    return PiecewisePoly(std::move(knots), std::move(coeffs));
}

constexpr char const* motion_keys[6] = {"vx", "vy", "vz", "alpha", "beta", "gamma"};

}  // namespace

//---------------------------------------------------------------------------//

Json rep_to_json(LocalImplicitRep const& rep)
{
    Json j;
    j["format"] = "sweptvol-rep";
    j["version"] = 1;
    j["kind"] = rep.kind == RepKind::OctreeBased ? "octree" : "ball_cover";
    j["bound"] = box_json(rep.bound);
    j["signed_distance_exact"] = rep.signed_distance_exact;
    j["patches"] = patches_json(rep.patches);
    Json levels = Json::array();
    for (auto const& l : rep.levels)
        levels.push_back(patches_json(l));
    j["levels"] = levels;
    if (rep.fallback_cloud)
    {
        Json pts = Json::array();
        for (auto const& p : rep.fallback_cloud->points())
        {
            pts.push_back({p.position[0], p.position[1], p.position[2], p.normal[0], p.normal[1],
                           p.normal[2]});
        }
        j["fallback_cloud"] = pts;
    }
    return j;
}

LocalImplicitRep rep_from_json(Json const& j)
{
    if (!j.is_object() || j.value("format", "") != "sweptvol-rep")
        throw InvalidInput("not a sweptvol representation document");
    LocalImplicitRep rep;
    auto kind = field(j, "kind").get<std::string>();
    if (kind == "octree")
        rep.kind = RepKind::OctreeBased;
    else if (kind == "ball_cover")
        rep.kind = RepKind::BallCover;
    else
        throw InvalidInput("unknown representation kind '" + kind + "'");
    rep.bound = box_from(field(j, "bound"));
    rep.signed_distance_exact = j.value("signed_distance_exact", false);
    rep.patches = patches_from(field(j, "patches"));
    if (j.contains("levels"))
    {
        for (auto const& l : j.at("levels"))
            rep.levels.push_back(patches_from(l));
    }
    if (j.contains("fallback_cloud"))
    {
        std::vector<OrientedPoint> pts;
        for (auto const& row : j.at("fallback_cloud"))
        {
            auto v = fixed_array<6>(row, "fallback point");
            pts.push_back({Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5])});
        }
        rep.fallback_cloud = std::make_shared<OrientedPointCloud const>(std::move(pts));
    }
    rep.validate();
    return rep;
}

Json motion_to_json(RigidMotion const& motion)
{
    Json j;
    j["domain"] = {motion.lower(), motion.upper()};
    for (int k = 0; k < 3; ++k)
    {
        j[motion_keys[k]] = poly_json(motion.translation()[k]);
        j[motion_keys[k + 3]] = poly_json(motion.angles()[k]);
    }
    return j;
}

RigidMotion motion_from_json(Json const& j)
{
    auto dom = fixed_array<2>(field(j, "domain"), "domain");
    double a = dom[0], b = dom[1];
    if (!(a <= b) || !std::isfinite(a) || !std::isfinite(b))
        throw InvalidInput("motion domain must satisfy a <= b");
    std::array<PiecewisePoly, 6> c;
    for (int k = 0; k < 6; ++k)
        c[k] = poly_from(j.contains(motion_keys[k]) ? j.at(motion_keys[k]) : Json(), a, b,
                         motion_keys[k]);
    return RigidMotion(a, b, {c[0], c[1], c[2]}, {c[3], c[4], c[5]});
}

Json weight_to_json(WeightGrid const& w)
{
    return {{"bounds", box_json(w.bounds)}, {"dims", w.dims}, {"values", w.values}};
}

WeightGrid weight_from_json(Json const& j)
{
    WeightGrid w;
    w.bounds = box_from(field(j, "bounds"));
    w.dims = field(j, "dims").get<std::array<std::uint32_t, 3>>();
    w.values = field(j, "values").get<std::vector<double>>();
    w.validate();
    return w;
}

Json sweep_params_to_json(SweepParams const& p)
{
    Json j;
    j["time_samples"] = p.time_samples;
    j["contact_tol"] = p.contact_tol;
    j["fast_mode"] = p.fast_mode;
    j["max_cells"] = p.max_cells;
    j["seed_splits_along_path"] = p.seed_splits_along_path;
    j["prune_by_distance"] = p.prune_by_distance;
    j["empty_split_fraction"] = p.empty_split_fraction;
    if (p.weight)
        j["weight"] = weight_to_json(*p.weight);
    return j;
}

SweepParams sweep_params_from_json(Json const& j)
{
    SweepParams p;
    p.time_samples = j.value("time_samples", p.time_samples);
    p.contact_tol = j.value("contact_tol", p.contact_tol);
    p.fast_mode = j.value("fast_mode", p.fast_mode);
    p.max_cells = j.value("max_cells", p.max_cells);
    p.seed_splits_along_path = j.value("seed_splits_along_path", p.seed_splits_along_path);
    p.prune_by_distance = j.value("prune_by_distance", p.prune_by_distance);
    p.empty_split_fraction = j.value("empty_split_fraction", p.empty_split_fraction);
    if (j.contains("weight"))
        p.weight = weight_from_json(j.at("weight"));
    p.validate();
    return p;
}

Json swept_to_json(SweptVolumeRep const& rep, std::optional<std::string> const& base_path)
{
    Json j;
    j["format"] = "sweptvol-swept";
    j["version"] = 1;
    if (base_path)
        j["base_path"] = *base_path;
    else
        j["base"] = rep_to_json(rep.base);
    j["motion"] = motion_to_json(rep.motion);
    j["params"] = sweep_params_to_json(rep.params);
    j["bound"] = box_json(rep.bound);
    Json nodes = Json::array();
    for (auto const& n : rep.tree.nodes())
    {
        if (n.axis < 0)
            nodes.push_back({{"leaf", n.cell}});
        else
            nodes.push_back(
                {{"axis", n.axis}, {"position", n.position}, {"left", n.left}, {"right", n.right}});
    }
    j["tree"] = nodes;
    Json cells = Json::array();
    for (auto const& c : rep.cells)
    {
        Json entries = Json::array();
        for (auto const& e : c.entries)
            entries.push_back({e.patch, e.t0, e.t1});
        cells.push_back(entries);
    }
    j["cells"] = cells;
    return j;
}

SweptVolumeRep swept_from_json(Json const& j, std::filesystem::path const& dir)
{
    if (!j.is_object() || j.value("format", "") != "sweptvol-swept")
        throw InvalidInput("not a sweptvol swept-volume document");
    LocalImplicitRep base;
    if (j.contains("base"))
        base = rep_from_json(j.at("base"));
    else
    {
        std::filesystem::path p = field(j, "base_path").get<std::string>();
        if (p.is_relative())
            p = dir / p;
        base = rep_from_json(load_json_file(p));
    }
    RigidMotion motion = motion_from_json(field(j, "motion"));
    SweepParams params = sweep_params_from_json(field(j, "params"));

    std::vector<SplitNode> nodes;
    for (auto const& n : field(j, "tree"))
    {
        SplitNode s;
        if (n.contains("leaf"))
            s.cell = n.at("leaf").get<std::int32_t>();
        else
        {
            s.axis = field(n, "axis").get<int>();
            s.position = number(n, "position");
            s.left = field(n, "left").get<std::int32_t>();
            s.right = field(n, "right").get<std::int32_t>();
        }
        nodes.push_back(s);
    }
    if (nodes.empty())
        throw InvalidInput("swept document has an empty tree");
    nodes[0].box = box_from(field(j, "bound"));
    CellTree tree = CellTree::from_nodes(std::move(nodes));

    std::vector<Box3> boxes(tree.leaf_count());
    for (auto const& n : tree.nodes())
    {
        if (n.axis < 0)
            boxes[std::size_t(n.cell)] = n.box;
    }
    auto const& jc = field(j, "cells");
    if (!jc.is_array() || jc.size() != boxes.size())
        throw InvalidInput("swept document cell count does not match its tree");
    std::vector<SweptCell> cells(boxes.size());
    for (std::size_t c = 0; c < boxes.size(); ++c)
    {
        cells[c].box = boxes[c];
        for (auto const& e : jc[c])
        {
            if (!e.is_array() || e.size() != 3)
                throw InvalidInput("cell entry must be [patch, t0, t1]");
            cells[c].entries.push_back(
                {e[0].get<std::uint32_t>(), e[1].get<double>(), e[2].get<double>()});
        }
    }
    return assemble_swept_rep(std::move(base), std::move(motion), std::move(params),
                              std::move(tree), std::move(cells));
}

//---------------------------------------------------------------------------//

std::string dump_json(Json const& j)
{
    return j.dump(1) + "\n";
}

Json parse_json(std::string const& text)
{
    try
    {
        return Json::parse(text);
    }
    catch (Json::parse_error const& e)
    {
        std::size_t line = 1;
        for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size() + 1) && i < text.size();
             ++i)
        {
            if (text[i] == '\n')
                ++line;
        }
        throw ParseError(line, "invalid JSON");
    }
}

Json load_json_file(std::filesystem::path const& path)
{
    return parse_json(read_text_file(path));
}

std::string read_text_file(std::filesystem::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InvalidInput("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(std::filesystem::path const& path, std::string const& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InvalidInput("cannot write '" + path.string() + "'");
    out << text;
}

}  // namespace sweptvol
