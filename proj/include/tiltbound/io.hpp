#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"
#include "tiltbound/chernoff.hpp"
#include "tiltbound/measures.hpp"
#include "tiltbound/mle.hpp"

namespace tiltbound::io {

// Model files:
//   {"support": [...], "prob": [...]}                          discrete pmf
//   {"family": "gaussian", "params": {"mean": m, "stddev": s}}  closed form
//   {"family": "exponential", "params": {"rate": r}}
//   CSV with header, columns x,density                          grid density
// The name "builtin:example" loads the embedded eight-atom example pmf.
Model load_model(const std::filesystem::path& path);
Model model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const Model& model);
ContinuousModel grid_from_csv(std::istream& in);

/// "identity" | "log" | "table:<path>" (CSV with header, columns x,v).
ValueFunction parse_value_spec(const std::string& spec);
ValueFunction value_table_from_csv(std::istream& in);

/// {"counts": [...]}
Sample load_sample(const std::filesystem::path& path);
Sample sample_from_json(const nlohmann::json& j);

/// Reports serialize every double with the shortest round-trip
/// representation; non-finite values become the strings "inf", "-inf", "nan".
nlohmann::json report_to_json(const BoundReport& report);
nlohmann::json projection_to_json(const ProjectionRecord& projection);
BoundReport report_from_json(const nlohmann::json& j);

nlohmann::json number(double x);
double read_number(const nlohmann::json& j);

/// Fixed-point formatting with the given number of decimals; non-finite
/// values print as inf, -inf, nan.
std::string fixed(double x, int precision);

/// The eight-atom pmf on 1..8 used as the worked example.
DiscreteModel example_pmf();

}  // namespace tiltbound::io
