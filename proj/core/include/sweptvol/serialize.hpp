#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "motion.hpp"
#include "representation.hpp"
#include "sweep.hpp"

namespace sweptvol {

using Json = nlohmann::json;

Json rep_to_json(LocalImplicitRep const& rep);
//! Throws InvalidInput on structural errors.
LocalImplicitRep rep_from_json(Json const& j);

/*!
 * Motion document:
 *   {"domain": [a, b], "vx": ..., "vy": ..., "vz": ..., "alpha": ..., "beta": ..., "gamma": ...}
 * Each component is a number (constant), omitted (zero), or a list of
 * {"span": [t0, t1], "coeffs": [c0, c1, ...]} pieces with coefficients in (t - t0).
 */
Json motion_to_json(RigidMotion const& motion);
RigidMotion motion_from_json(Json const& j);

Json weight_to_json(WeightGrid const& w);
WeightGrid weight_from_json(Json const& j);

Json sweep_params_to_json(SweepParams const& p);
SweepParams sweep_params_from_json(Json const& j);

/*!
 * Swept structure with the split tree, per-cell entries and either the
 * embedded base representation or `base_path` pointing at it.
 */
Json swept_to_json(SweptVolumeRep const& rep, std::optional<std::string> const& base_path = {});
//! Relative base paths are resolved against `dir`.
SweptVolumeRep swept_from_json(Json const& j, std::filesystem::path const& dir = {});

//! Sorted keys, one-space indent, trailing newline.
std::string dump_json(Json const& j);
//! Throws ParseError with the 1-based line of a syntax error.
Json parse_json(std::string const& text);
Json load_json_file(std::filesystem::path const& path);

std::string read_text_file(std::filesystem::path const& path);
void write_text_file(std::filesystem::path const& path, std::string const& text);

}  // namespace sweptvol
