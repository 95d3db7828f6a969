#pragma once

// JSON forms of instances and solve reports. Doubles are written in the
// shortest form that round-trips, so a materialized instance reloads
// bit-exactly.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "phaseconv/admm.hpp"
#include "phaseconv/measure.hpp"

namespace phaseconv::io {

using nlohmann::json;

/// With `materialize`, rows, bases and signals are written out; otherwise
/// only the recipe (dims, mode, seed, generator_id).
json instance_to_json(const ProblemInstance& inst, bool materialize = true);
/// Materialized arrays are used when present, else the instance is
/// regenerated (and generator_id must match this build's generator).
ProblemInstance instance_from_json(const json& doc);

void save_instance(const std::filesystem::path& path, const ProblemInstance& inst, bool materialize = true);
ProblemInstance load_instance(const std::filesystem::path& path);

/// Parses text, reporting syntax errors as ParseError("line L, column C", ...).
json parse_json_text(const std::string& text, const std::string& source);
json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& doc);

json config_to_json(const admm::AdmmConfig& cfg);
/// Overlays the keys present in `doc` onto `base`.
admm::AdmmConfig config_from_json(const json& doc, admm::AdmmConfig base = {});

json report_to_json(const admm::SolveReport& rep, bool include_factors = false);

json vec_to_json(const Vec& v);
Vec vec_from_json(const json& doc, const std::string& field);
json mat_to_json(const Mat& M);
Mat mat_from_json(const json& doc, const std::string& field);

}  // namespace phaseconv::io
