#include "sweptvol/grid_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace sweptvol {

namespace {

constexpr char magic[] = "SVGRID1";
constexpr std::size_t magic_len = 7;

void put_u32(std::ostream& out, std::uint32_t v)
{
    char b[4];
    for (int i = 0; i < 4; ++i)
        b[i] = char((v >> (8 * i)) & 0xff);
    out.write(b, 4);
}

void put_f64(std::ostream& out, double d)
{
    auto v = std::bit_cast<std::uint64_t>(d);
    char b[8];
    for (int i = 0; i < 8; ++i)
        b[i] = char((v >> (8 * i)) & 0xff);
    out.write(b, 8);
}

std::uint32_t get_u32(std::istream& in)
{
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw ParseError(1, "truncated grid header");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= std::uint32_t(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& in)
{
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8))
        throw ParseError(1, "truncated grid data");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= std::uint64_t(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

void check_sizes(ScalarGrid const& g)
{
    g.spec.validate();
    if (g.values.size() != g.spec.size())
        throw InvalidInput("grid sample count does not match its dimensions");
}

}  // namespace

void write_grid_binary(std::ostream& out, ScalarGrid const& grid)
{
    check_sizes(grid);
    out.write(magic, magic_len);
    for (auto d : grid.spec.dims)
        put_u32(out, d);
    for (int k = 0; k < 3; ++k)
        put_f64(out, grid.spec.bounds.min[k]);
    for (int k = 0; k < 3; ++k)
        put_f64(out, grid.spec.bounds.max[k]);
    for (double v : grid.values)
        put_f64(out, v);
}

ScalarGrid read_grid_binary(std::istream& in)
{
    char head[magic_len];
    if (!in.read(head, magic_len) || std::memcmp(head, magic, magic_len) != 0)
        throw ParseError(1, "missing SVGRID1 header");
    ScalarGrid g;
    for (auto& d : g.spec.dims)
        d = get_u32(in);
    for (int k = 0; k < 3; ++k)
        g.spec.bounds.min[k] = get_f64(in);
    for (int k = 0; k < 3; ++k)
        g.spec.bounds.max[k] = get_f64(in);
    try
    {
        g.spec.validate();
    }
    catch (InvalidInput const& e)
    {
        throw ParseError(1, e.what());
    }
    g.values.resize(g.spec.size());
    for (auto& v : g.values)
        v = get_f64(in);
    return g;
}

void write_grid_ascii(std::ostream& out, ScalarGrid const& grid)
{
    check_sizes(grid);
    auto const& s = grid.spec;
    out << magic << " ascii\n";
    out << "dims " << s.dims[0] << ' ' << s.dims[1] << ' ' << s.dims[2] << '\n';
    out << std::setprecision(17) << "bounds";
    for (int k = 0; k < 3; ++k)
        out << ' ' << s.bounds.min[k];
    for (int k = 0; k < 3; ++k)
        out << ' ' << s.bounds.max[k];
    out << '\n';
    for (double v : grid.values)
        out << v << '\n';
}

ScalarGrid read_grid_ascii(std::istream& in)
{
    std::string line;
    std::size_t lineno = 0;
    auto next = [&]() -> std::istringstream {
        if (!std::getline(in, line))
            throw ParseError(lineno + 1, "unexpected end of grid");
        ++lineno;
        return std::istringstream(line);
    };
    {
        auto ss = next();
        std::string m, kind;
        ss >> m >> kind;
        if (m != magic || kind != "ascii")
            throw ParseError(lineno, "missing 'SVGRID1 ascii' header");
    }
    ScalarGrid g;
    {
        auto ss = next();
        std::string tag;
        ss >> tag >> g.spec.dims[0] >> g.spec.dims[1] >> g.spec.dims[2];
        if (!ss || tag != "dims")
            throw ParseError(lineno, "expected 'dims nx ny nz'");
    }
    {
        auto ss = next();
        std::string tag;
        ss >> tag;
        for (int k = 0; k < 3; ++k)
            ss >> g.spec.bounds.min[k];
        for (int k = 0; k < 3; ++k)
            ss >> g.spec.bounds.max[k];
        if (!ss || tag != "bounds")
            throw ParseError(lineno, "expected 'bounds' with six numbers");
    }
    try
    {
        g.spec.validate();
    }
    catch (InvalidInput const& e)
    {
        throw ParseError(lineno, e.what());
    }
    g.values.resize(g.spec.size());
    for (auto& v : g.values)
    {
        auto ss = next();
        if (!(ss >> v))
            throw ParseError(lineno, "expected a sample value");
    }
    return g;
}

void save_grid(std::filesystem::path const& path, ScalarGrid const& grid, bool ascii)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InvalidInput("cannot write '" + path.string() + "'");
    if (ascii)
        write_grid_ascii(out, grid);
    else
        write_grid_binary(out, grid);
}

ScalarGrid load_grid(std::filesystem::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InvalidInput("cannot open '" + path.string() + "'");
    std::string ascii_head = std::string(magic) + " ascii";
    std::string head(ascii_head.size(), '\0');
    in.read(head.data(), std::streamsize(head.size()));
    bool ascii = head == ascii_head;
    in.clear();
    in.seekg(0);
    return ascii ? read_grid_ascii(in) : read_grid_binary(in);
}

WeightGrid to_weight_grid(ScalarGrid const& grid)
{
    WeightGrid w;
    w.bounds = grid.spec.bounds;
    w.dims = grid.spec.dims;
    w.values = grid.values;
    w.validate();
    return w;
}

}  // namespace sweptvol
