#pragma once

#include <filesystem>
#include <iosfwd>

#include "query.hpp"
#include "sweep.hpp"

namespace sweptvol {

/*!
 * Binary grid stream, little endian: the 7 bytes "SVGRID1", three uint32
 * dimensions, six float64 bounds (min xyz, max xyz), then float64 samples
 * with x varying fastest.
 */
void write_grid_binary(std::ostream& out, ScalarGrid const& grid);
//! Throws ParseError (line 1) on a bad header or truncated data.
ScalarGrid read_grid_binary(std::istream& in);

/*!
 * ASCII variant: "SVGRID1 ascii", then "dims nx ny nz", "bounds x0 y0 z0
 * x1 y1 z1" and one sample per line.
 */
void write_grid_ascii(std::ostream& out, ScalarGrid const& grid);
ScalarGrid read_grid_ascii(std::istream& in);

void save_grid(std::filesystem::path const& path, ScalarGrid const& grid, bool ascii = false);
//! Detects the ASCII variant from the header.
ScalarGrid load_grid(std::filesystem::path const& path);

WeightGrid to_weight_grid(ScalarGrid const& grid);

}  // namespace sweptvol
