#pragma once

// Scenario files: a flat "key = value" text format with [sections], parsed,
// validated against the catalog and executed by one module pipeline each.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lorentz {

/// Raw parsed file: section -> ordered (key, value) pairs. Expectations in
/// [expect] keep their operator in the value ("<= 1e-8", "== true").
struct ScenarioText {
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
  std::string source;  // verbatim text, hashed into CSV headers
  std::string origin;  // file path or builtin name

  static ScenarioText parse(const std::string& text, const std::string& origin);
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
};

enum class RunKind { Geodesic, Curvature, Conjugate, Expansion, Singularity, Twin, AdsLongCurve, ScaleFactor };
const char* to_string(RunKind k);

struct Expectation {
  std::string key;
  std::string op;  // ==, <=, >=, <, >
  std::string value;
  std::optional<double> tolerance;  // "== v +- tol"
};

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides file and environment
  double tol_scale = 1.0;
  int jobs = 1;
};

struct ScenarioOutcome {
  int exit_code = 0;  // 0 ok, 2 expectation failed, 3 configuration error, 4 numerical failure
  std::string name;
  std::vector<std::pair<std::string, std::string>> summary;
  std::vector<std::string> failures;
  std::string error;
  std::string csv;  // complete file contents, empty when nothing was produced
  std::string csv_name;

  /// "key = value" block with a trailing status line.
  std::string report() const;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int bound_failed = 2;
inline constexpr int config_error = 3;
inline constexpr int numerical_failure = 4;
}  // namespace exit_code

/// Parses, validates and runs one scenario. Never throws for scenario
/// problems; they are reported through the exit code.
ScenarioOutcome run_scenario_text(const std::string& text, const std::string& origin, const RunOptions& opt);

std::uint64_t fnv1a(const std::string& bytes);

const char* version();

struct Recipe {
  std::string name;
  std::string about;
  std::string text;
};

/// Built-in scenarios, one per worked example, embedded from recipes/*.scn.
const std::vector<Recipe>& builtin_recipes();
const Recipe* find_recipe(const std::string& name);

namespace detail {
/// (file stem, text) pairs generated at build time.
const std::vector<std::pair<std::string, std::string>>& embedded_recipes();
}  // namespace detail

}  // namespace lorentz
