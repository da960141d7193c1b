#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "support.hpp"
#include "sweptvol/grid_io.hpp"
#include "sweptvol/serialize.hpp"

using namespace sweptvol;
using namespace sweptvol::test;

namespace {

std::filesystem::path temp_dir()
{
    auto d = std::filesystem::temp_directory_path() / "sweptvol_serialize_test";
    std::filesystem::create_directories(d);
    return d;
}

ScalarGrid small_grid()
{
    ScalarGrid g;
    g.spec = {Box3(Vec3(-1, 0, 2), Vec3(1, 3, 2.5)), {3, 2, 4}};
    for (std::size_t k = 0; k < g.spec.size(); ++k)
        g.values.push_back(std::sin(0.37 * double(k)) * std::pow(10.0, double(k % 7) - 3));
    g.values[5] = far_field;
    return g;
}

}  // namespace

TEST(Json, RepRoundTrip)
{
    Rng rng(51);
    for (auto const& base : {random_ball_rep(rng, 5), random_box_rep(rng, 5)})
    {
        auto text = dump_json(rep_to_json(base));
        auto back = rep_from_json(parse_json(text));
        EXPECT_EQ(dump_json(rep_to_json(back)), text);
        RepEvaluator a(base), b(back);
        for (int k = 0; k < 200; ++k)
        {
            Vec3 p = uniform_in(rng, base.bound);
            EXPECT_EQ(a.value(p), b.value(p));
        }
    }
}

TEST(Json, MotionRoundTrip)
{
    auto [base, m] = capsule_example();
    auto back = motion_from_json(motion_to_json(m));
    Rng rng(52);
    for (int k = 0; k < 100; ++k)
    {
        double t = uniform(rng, 0, 1);
        Vec3 p = uniform_in(rng, base.bound);
        EXPECT_EQ(back.apply(t, p), m.apply(t, p));
    }
    EXPECT_EQ(back.lower(), 0.0);
    EXPECT_EQ(back.upper(), 1.0);
}

TEST(Json, MotionDocumentShorthand)
{
    auto m = motion_from_json(parse_json(R"({"domain": [0, 2], "vx": 1.5,
        "vy": [{"span": [0, 2], "coeffs": [0, 3]}]})"));
    EXPECT_EQ(m.apply(1.0, Vec3::Zero()), Vec3(1.5, 3, 0));
    EXPECT_THROW(motion_from_json(parse_json(R"({"vx": 1})")), InvalidInput);
    EXPECT_THROW(motion_from_json(parse_json(R"({"domain": [0, 1], "vx": [{"span": [0, 0.5], "coeffs": [1]}]})")),
                 InvalidInput);
}

TEST(Json, SweptRoundTrip)
{
    auto [base, m] = capsule_example();
    SweepParams p;
    p.time_samples = 32;
    auto rep = build_swept_rep(base, m, p);

    auto back = swept_from_json(parse_json(dump_json(swept_to_json(rep))));
    ASSERT_EQ(back.cells.size(), rep.cells.size());
    for (std::size_t j = 0; j < rep.cells.size(); ++j)
    {
        ASSERT_EQ(back.cells[j].entries.size(), rep.cells[j].entries.size());
        for (std::size_t e = 0; e < rep.cells[j].entries.size(); ++e)
        {
            EXPECT_EQ(back.cells[j].entries[e].t0, rep.cells[j].entries[e].t0);
            EXPECT_EQ(back.cells[j].entries[e].t1, rep.cells[j].entries[e].t1);
        }
        EXPECT_EQ(back.cells[j].box.min, rep.cells[j].box.min);
    }
    EXPECT_EQ(back.params.time_samples, 32);

    // Base stored next to the swept file.
    auto dir = temp_dir();
    write_text_file(dir / "base.json", dump_json(rep_to_json(base)));
    auto j = swept_to_json(rep, std::string("base.json"));
    EXPECT_FALSE(j.contains("base"));
    auto linked = swept_from_json(j, dir);
    EXPECT_EQ(linked.base.size(), base.size());
    EXPECT_THROW(swept_from_json(j, dir / "missing"), std::exception);
}

TEST(Json, SweptRejectsBadEntries)
{
    auto [base, m] = capsule_example();
    SweepParams p;
    p.time_samples = 16;
    auto j = swept_to_json(build_swept_rep(base, m, p));
    auto& cells = j["cells"];
    for (auto& c : cells)
    {
        if (!c.empty())
        {
            c[0][0] = 99;
            break;
        }
    }
    EXPECT_THROW(swept_from_json(j), InvalidInput);
}

TEST(Json, ParseErrorsCarryLines)
{
    try
    {
        parse_json("{\n \"a\": 1,\n \"b\": ]\n}");
        FAIL() << "no throw";
    }
    catch (ParseError const& e)
    {
        EXPECT_EQ(e.line(), 3);
    }
    EXPECT_THROW(parse_json(""), ParseError);
}

TEST(Json, DumpIsSortedAndStable)
{
    auto text = dump_json(parse_json(R"({"b": 1, "a": [0.1, 1e-300]})"));
    EXPECT_LT(text.find("\"a\""), text.find("\"b\""));
    EXPECT_EQ(text.back(), '\n');
    EXPECT_EQ(dump_json(parse_json(text)), text);
    EXPECT_EQ(parse_json(text)["a"][0].get<double>(), 0.1);
}

TEST(Json, WeightAndParams)
{
    WeightGrid w;
    w.bounds = Box3(Vec3(0, 0, 0), Vec3(1, 1, 1));
    w.values = {1, 2, 3, 4, 5, 6, 7, 8};
    auto wb = weight_from_json(weight_to_json(w));
    EXPECT_EQ(wb.values, w.values);
    SweepParams p;
    p.weight = w;
    p.fast_mode = true;
    p.max_cells = 77;
    auto pb = sweep_params_from_json(sweep_params_to_json(p));
    EXPECT_TRUE(pb.fast_mode);
    EXPECT_EQ(pb.max_cells, 77u);
    ASSERT_TRUE(pb.weight);
    EXPECT_EQ(pb.weight->values, w.values);
}

//---------------------------------------------------------------------------//

TEST(GridIo, BinaryRoundTrip)
{
    auto g = small_grid();
    std::stringstream s;
    write_grid_binary(s, g);
    auto text = s.str();
    EXPECT_EQ(text.substr(0, 7), "SVGRID1");
    EXPECT_EQ(text.size(), 7 + 12 + 48 + 8 * g.values.size());
    auto back = read_grid_binary(s);
    EXPECT_EQ(back.values, g.values);
    EXPECT_EQ(back.spec.dims, g.spec.dims);
    EXPECT_EQ(back.spec.bounds.max, g.spec.bounds.max);
}

TEST(GridIo, AsciiRoundTrip)
{
    auto g = small_grid();
    std::stringstream s;
    write_grid_ascii(s, g);
    auto back = read_grid_ascii(s);
    EXPECT_EQ(back.values, g.values);
    EXPECT_EQ(back.spec.bounds.min, g.spec.bounds.min);
}

TEST(GridIo, RejectsBadStreams)
{
    std::stringstream bad("NOTGRID....");
    EXPECT_THROW(read_grid_binary(bad), ParseError);
    auto g = small_grid();
    std::stringstream s;
    write_grid_binary(s, g);
    auto text = s.str();
    std::stringstream cut(text.substr(0, text.size() - 3));
    EXPECT_THROW(read_grid_binary(cut), ParseError);

    std::stringstream ascii("SVGRID1 ascii\ndims 2 2 2\nbounds 0 0 0 1 1 1\n1\n2\nx\n");
    try
    {
        read_grid_ascii(ascii);
        FAIL() << "no throw";
    }
    catch (ParseError const& e)
    {
        EXPECT_EQ(e.line(), 6);
    }
}

TEST(GridIo, FileDetection)
{
    auto g = small_grid();
    auto dir = temp_dir();
    save_grid(dir / "g.bin", g);
    save_grid(dir / "g.txt", g, true);
    EXPECT_EQ(load_grid(dir / "g.bin").values, g.values);
    EXPECT_EQ(load_grid(dir / "g.txt").values, g.values);
    EXPECT_THROW(to_weight_grid(g), InvalidInput);
    for (auto& v : g.values)
        v = std::abs(v);
    EXPECT_EQ(to_weight_grid(g).dims, g.spec.dims);
}
