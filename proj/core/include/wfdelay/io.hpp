#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "wfdelay/conserved.hpp"
#include "wfdelay/construction.hpp"
#include "wfdelay/perturb.hpp"
#include "wfdelay/schild.hpp"

namespace wfdelay {

using Json = nlohmann::json;

// Serializers found by nlohmann through ADL. Readers throw SchemaError with the path of the bad field.
void to_json(Json& j, const ChargeParams& c);
void from_json(const Json& j, ChargeParams& c);
void to_json(Json& j, const Segment& s);
void to_json(Json& j, const WorldLine& w);
void from_json(const Json& j, WorldLine& w);
void to_json(Json& j, const Interval& i);
void from_json(const Json& j, Interval& i);
void to_json(Json& j, const InitialData& d);
void from_json(const Json& j, InitialData& d);
void to_json(Json& j, const StepReport& s);
void to_json(Json& j, const SolutionPair& s);
void from_json(const Json& j, SolutionPair& s);
void to_json(Json& j, const SchildParams& p);
void from_json(const Json& j, SchildParams& p);
void to_json(Json& j, const GuardParams& g);
void from_json(const Json& j, GuardParams& g);
void to_json(Json& j, const QuadratureConfig& q);
void from_json(const Json& j, QuadratureConfig& q);
void to_json(Json& j, const ValidationReport& r);
void to_json(Json& j, const EnergyBreakdown& e);
void to_json(Json& j, const DriftReport& r);

Segment segment_from_json(const Json& j);

// Converts with field-level SchemaError messages; `what` names the document part.
template <class T>
T parse_as(const Json& j, std::string_view what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::SchemaError, std::string(what) + ": " + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path);
// Writes exactly `text`; IoError when the file cannot be written.
void write_text_file(const std::filesystem::path& path, std::string_view text);
// Two-space indented JSON with a trailing newline.
std::string dump_json(const Json& j);

// Uniform samples t = lo + k dt over the common coverage of both lines:
// t, q1xyz, q2xyz, p1xyz, p2xyz at 17 significant digits.
std::string trajectory_csv(const SolutionPair& sol, double dt);
void emit_trajectory_csv(const SolutionPair& sol, double dt, const std::filesystem::path& path);

std::string drift_csv(const DriftReport& r);
std::string residual_csv(const std::vector<ResidualSample>& samples);

}  // namespace wfdelay
