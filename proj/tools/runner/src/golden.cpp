#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "detail.hpp"

namespace stabilize::runner {
namespace {

struct Tolerances {
  double fallback = kGoldenTolerance;
  std::vector<std::pair<std::string, double>> prefixes;

  double at(const std::string& path) const {
    double tol = fallback;
    std::size_t best = 0;
    for (const auto& [prefix, value] : prefixes) {
      const bool match = path == prefix || (path.size() > prefix.size() && path.compare(0, prefix.size(), prefix) == 0 &&
                                            path[prefix.size()] == '.');
      if (match && prefix.size() >= best) {
        best = prefix.size();
        tol = value;
      }
    }
    return tol;
  }
};

Tolerances tolerances_of(const Json& expected) {
  Tolerances t;
  if (expected.contains("default_tolerance")) t.fallback = expected.at("default_tolerance").get<double>();
  if (expected.contains("tolerances"))
    for (const auto& [prefix, value] : expected.at("tolerances").items()) t.prefixes.emplace_back(prefix, value);
  return t;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void compare(const Json& actual, const Json& expected, const std::string& path, const Tolerances& tol,
             std::vector<std::string>& out) {
  if (expected.is_number() && actual.is_number()) {
    const double a = actual.get<double>();
    const double e = expected.get<double>();
    const double limit = tol.at(path);
    if (!(std::abs(a - e) <= limit)) {
      std::ostringstream os;
      os.precision(17);
      os << path << ": expected " << e << ", got " << a << " (tolerance " << limit << ")";
      out.push_back(os.str());
    }
    return;
  }
  if (expected.is_object() && actual.is_object()) {
    for (const auto& [key, value] : expected.items()) {
      if (!actual.contains(key)) {
        out.push_back(join(path, key) + ": missing");
        continue;
      }
      compare(actual.at(key), value, join(path, key), tol, out);
    }
    for (const auto& [key, value] : actual.items())
      if (!expected.contains(key)) out.push_back(join(path, key) + ": unexpected");
    return;
  }
  if (expected.is_array() && actual.is_array()) {
    if (expected.size() != actual.size()) {
      out.push_back(path + ": expected " + std::to_string(expected.size()) + " entries, got " +
                    std::to_string(actual.size()));
      return;
    }
    for (std::size_t k = 0; k < expected.size(); ++k)
      compare(actual[k], expected[k], join(path, std::to_string(k)), tol, out);
    return;
  }
  if (actual != expected) out.push_back(path + ": expected " + expected.dump() + ", got " + actual.dump());
}

std::vector<std::filesystem::path> cases(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("golden directory " + dir.string() + " not found");
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "config.json")) out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  if (out.empty()) throw ConfigError("golden directory " + dir.string() + " holds no cases");
  return out;
}

}  // namespace

std::vector<std::string> compare_to_golden(const Json& actual, const Json& expected) {
  if (!expected.contains("report")) return {"expected.json: missing report"};
  std::vector<std::string> out;
  compare(actual, expected.at("report"), "", tolerances_of(expected), out);
  return out;
}

std::vector<GoldenResult> verify_golden(const std::filesystem::path& dir) {
  std::vector<GoldenResult> out;
  for (const auto& c : cases(dir)) {
    GoldenResult r;
    r.name = c.filename().string();
    const auto config = load_config(c / "config.json");
    if (!std::filesystem::exists(c / "expected.json")) {
      r.mismatches.push_back("expected.json: missing");
      out.push_back(std::move(r));
      continue;
    }
    const auto expected = load_config(c / "expected.json");
    const auto first = run_scenario(config);
    const auto second = run_scenario(config);
    if (serialize(first.report) != serialize(second.report)) r.mismatches.push_back("reports differ between runs");
    const auto diff = compare_to_golden(first.report, expected);
    r.mismatches.insert(r.mismatches.end(), diff.begin(), diff.end());
    r.passed = r.mismatches.empty();
    out.push_back(std::move(r));
  }
  return out;
}

void update_golden(const std::filesystem::path& dir) {
  for (const auto& c : cases(dir)) {
    Json expected = {{"default_tolerance", kGoldenTolerance}, {"tolerances", Json::object()}};
    if (std::filesystem::exists(c / "expected.json")) {
      const auto old = load_config(c / "expected.json");
      for (const char* key : {"default_tolerance", "tolerances"})
        if (old.contains(key)) expected[key] = old.at(key);
    }
    expected["report"] = run_scenario(load_config(c / "config.json")).report;
    std::ofstream f(c / "expected.json", std::ios::binary);
    f << expected.dump(2) << "\n";
    if (!f) throw std::runtime_error("cannot write " + (c / "expected.json").string());
  }
}

}  // namespace stabilize::runner
