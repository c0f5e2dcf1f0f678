#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stabilize/io.hpp"

namespace stabilize::runner {

using io::Json;

/// Unreadable, malformed or unresolvable configuration. Maps to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;

/// One emitted curve: file name plus CSV contents with a fixed header.
struct Curve {
  std::string file;
  std::string csv;
};

struct Outcome {
  std::string name;
  /// Deterministic given (config, seed); never holds timing.
  Json report;
  std::vector<Curve> curves;
  bool passed = false;
  double seconds = 0.0;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
};

/// Reads and parses a JSON file; ConfigError("parse error: ...") on failure.
Json load_config(const std::filesystem::path& path);

/// The scenario list of a config: the config itself, or its "scenarios" array.
std::vector<Json> scenarios_of(const Json& config);

/// Runs one scenario. Module errors during the computation land in
/// report["error"] and fail the scenario; configuration problems throw ConfigError.
Outcome run_scenario(const Json& scenario, const RunOptions& options = {});

/// Runs every scenario concurrently; outcomes keep the input order.
std::vector<Outcome> run_batch(const std::vector<Json>& scenarios, const RunOptions& options = {});

/// One variant per value of config["sweep"]["values"], with that value written
/// into params[config["sweep"]["parameter"]].
std::vector<Json> expand_sweep(const Json& config);

/// "<parameter>,distance" with one row per variant, from results.distance.
Curve sweep_curve(const Json& config, const std::vector<Outcome>& outcomes);

/// <dir>/<name>/report.json, <dir>/<name>/timing.json and one CSV per curve.
void write_outcome(const Outcome& outcome, const std::filesystem::path& dir);
/// <dir>/summary.json, written after every scenario has finished.
void write_summary(const std::vector<Outcome>& outcomes, const std::filesystem::path& dir);

/// Canonical serialization used for byte comparisons.
std::string serialize(const Json& report);

struct GoldenResult {
  std::string name;
  bool passed = false;
  std::vector<std::string> mismatches;
};

/// Default absolute tolerance for numbers in golden comparisons.
inline constexpr double kGoldenTolerance = 1e-9;

/// Compares `actual` against expected["report"]; numbers use the tolerance of the
/// longest matching dotted prefix in expected["tolerances"], else
/// expected["default_tolerance"]. Everything else compares exactly.
std::vector<std::string> compare_to_golden(const Json& actual, const Json& expected);

/// Every <dir>/<case>/ holding config.json and expected.json, in name order.
/// Each case runs twice; the two reports must be byte-identical.
std::vector<GoldenResult> verify_golden(const std::filesystem::path& dir);

/// Rewrites every expected.json from a fresh run, keeping declared tolerances.
void update_golden(const std::filesystem::path& dir);

}  // namespace stabilize::runner
