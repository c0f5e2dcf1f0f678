#include <chrono>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "detail.hpp"

namespace stabilize::runner {
namespace {

using detail::Params;

using Kind = Json (*)(const Params&, std::uint64_t, detail::Artifacts&);

Kind kind_function(const std::string& kind) {
  if (kind == "correct") return detail::run_correct;
  if (kind == "haar") return detail::run_haar;
  if (kind == "conjugate") return detail::run_conjugate;
  if (kind == "factor") return detail::run_factor;
  if (kind == "lift") return detail::run_lift;
  if (kind == "geometry") return detail::run_geometry;
  if (kind == "transport") return detail::run_transport;
  if (kind == "supmetric") return detail::run_supmetric;
  return nullptr;
}

std::string error_type(const Error& e) {
  if (dynamic_cast<const ConvergenceError*>(&e)) return "convergence";
  if (dynamic_cast<const PreconditionError*>(&e)) return "precondition";
  if (dynamic_cast<const SingularError*>(&e)) return "singular";
  if (dynamic_cast<const NotFoundError*>(&e)) return "not_found";
  if (dynamic_cast<const CertificateError*>(&e)) return "certificate";
  if (dynamic_cast<const io::FormatError*>(&e)) return "format";
  return "error";
}

const std::set<std::string> kOps{"le", "lt", "ge", "gt", "eq"};

struct Assertion {
  std::string path;
  std::string op;
  Json value;
  double tolerance = 0.0;
};

std::vector<Assertion> parse_assertions(const Json& scenario, const std::string& scope) {
  std::vector<Assertion> out;
  if (!scenario.contains("assertions")) return out;
  const Json& list = scenario.at("assertions");
  if (!list.is_array()) throw ConfigError(scope + ".assertions: expected an array");
  for (std::size_t k = 0; k < list.size(); ++k) {
    const Params a(list[k], scope + ".assertions[" + std::to_string(k) + "]");
    Assertion x{a.text("path"), a.text("op"), a.at("value"), a.number("tolerance", 0.0, 0.0, 1e300)};
    if (!kOps.contains(x.op)) throw ConfigError(a.scope() + ".op: unknown operator '" + x.op + "'");
    const bool numeric = x.value.is_number() || x.value.is_string();
    if (x.op != "eq" && !numeric) throw ConfigError(a.scope() + ".value: ordered comparison needs a number");
    out.push_back(std::move(x));
  }
  return out;
}

const Json* lookup(const Json& root, const std::string& path) {
  const Json* node = &root;
  std::stringstream parts(path);
  std::string part;
  while (std::getline(parts, part, '.')) {
    if (node->is_object()) {
      if (!node->contains(part)) return nullptr;
      node = &node->at(part);
    } else if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(part);
      } catch (const std::exception&) {
        return nullptr;
      }
      if (idx >= node->size()) return nullptr;
      node = &(*node)[idx];
    } else {
      return nullptr;
    }
  }
  return node;
}

std::optional<double> as_number(const Json& j) {
  if (!j.is_number() && !j.is_string()) return std::nullopt;
  try {
    return io::to_number(j);
  } catch (const Error&) {
    return std::nullopt;
  }
}

bool holds(const Assertion& a, const Json* actual) {
  if (!actual) return false;
  const auto want = as_number(a.value);
  const auto got = as_number(*actual);
  if (a.op == "eq" && !(want && got)) return *actual == a.value;
  if (!want || !got) return false;
  if (a.op == "le") return *got <= *want;
  if (a.op == "lt") return *got < *want;
  if (a.op == "ge") return *got >= *want;
  if (a.op == "gt") return *got > *want;
  return std::abs(*got - *want) <= a.tolerance;
}

std::uint64_t seed_of(const Params& s, const RunOptions& options) {
  if (options.seed) return *options.seed;
  if (!s.has("seed")) return 0;
  const Json& j = s.at("seed");
  if (!j.is_number_unsigned()) throw ConfigError(s.scope() + ".seed: expected a non-negative integer");
  return j.get<std::uint64_t>();
}

void check_name(const std::string& name) {
  const bool ok = !name.empty() && name.find_first_not_of("abcdefghijklmnopqrstuvwxyz"
                                                          "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-.") == std::string::npos;
  if (!ok || name == "." || name == "..") throw ConfigError("scenario name '" + name + "' is not a plain file name");
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  f << contents;
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

Json load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config " + path.string());
  try {
    return Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw ConfigError("parse error in " + path.string() + ": " + e.what());
  }
}

std::vector<Json> scenarios_of(const Json& config) {
  if (!config.is_object()) throw ConfigError("config: expected an object");
  if (!config.contains("scenarios")) return {config};
  const Json& list = config.at("scenarios");
  if (!list.is_array() || list.empty()) throw ConfigError("config.scenarios: expected a non-empty array");
  return {list.begin(), list.end()};
}

Outcome run_scenario(const Json& scenario, const RunOptions& options) {
  const Params s(scenario, "scenario");
  Outcome out;
  out.name = s.text("name");
  check_name(out.name);
  const std::string scope = out.name;
  const std::string kind = s.text("kind");
  const Kind run = kind_function(kind);
  if (!run) throw ConfigError(scope + ".kind: unknown scenario kind '" + kind + "'");
  const std::uint64_t seed = seed_of(s, options);
  const auto assertions = parse_assertions(scenario, scope);
  const Json params = s.has("params") ? s.at("params") : Json::object();
  const Params p(params, scope + ".params");

  Json inputs = scenario;
  inputs["seed"] = seed;
  detail::Artifacts artifacts;
  Json results = Json::object();
  Json error = nullptr;

  spdlog::debug("{}: running {} scenario with seed {}", scope, kind, seed);
  const auto start = std::chrono::steady_clock::now();
  try {
    results = run(p, seed, artifacts);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    if (const auto* c = dynamic_cast<const ConvergenceError*>(&e)) artifacts.add_trace("failed", c->trace());
    error = {{"type", error_type(e)}, {"message", scope + " (" + kind + "): " + e.what()}};
    spdlog::warn("{}: {} error: {}", scope, error_type(e), e.what());
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Json traces = Json::object();
  for (auto& [name, trace] : artifacts.traces) traces[name] = std::move(trace);
  out.report = {{"name", out.name}, {"kind", kind},       {"seed", seed},   {"inputs", inputs},
                {"results", results}, {"traces", traces}, {"error", error}};

  bool passed = error.is_null();
  Json checked = Json::array();
  for (const auto& a : assertions) {
    const Json* actual = lookup(out.report, a.path);
    const bool ok = holds(a, actual);
    passed = passed && ok;
    Json entry = {{"path", a.path}, {"op", a.op}, {"value", a.value}, {"actual", actual ? *actual : Json()},
                  {"passed", ok}};
    if (a.op == "eq" && a.tolerance > 0.0) entry["tolerance"] = a.tolerance;
    checked.push_back(std::move(entry));
    if (!ok) spdlog::info("{}: assertion {} {} failed", scope, a.path, a.op);
  }
  out.report["assertions"] = std::move(checked);
  out.report["passed"] = passed;
  out.passed = passed;
  out.curves = std::move(artifacts.curves);
  return out;
}

std::vector<Outcome> run_batch(const std::vector<Json>& scenarios, const RunOptions& options) {
  std::set<std::string> names;
  for (const auto& s : scenarios) {
    const auto name = Params(s, "scenario").text("name");
    if (!names.insert(name).second) throw ConfigError("duplicate scenario name '" + name + "'");
  }
  std::vector<std::future<Outcome>> pending;
  for (const auto& s : scenarios)
    pending.push_back(std::async(std::launch::async, [&s, &options] { return run_scenario(s, options); }));
  std::vector<Outcome> out;
  std::exception_ptr first;
  for (auto& f : pending) {
    try {
      out.push_back(f.get());
    } catch (...) {
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
  return out;
}

std::vector<Json> expand_sweep(const Json& config) {
  const Params c(config, "config");
  const Params sweep = c.child("sweep");
  const std::string parameter = sweep.text("parameter");
  const Json& values = sweep.at("values");
  if (!values.is_array() || values.empty()) throw ConfigError("config.sweep.values: expected a non-empty array");
  const std::string base = c.text("name");
  std::vector<Json> out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    Json v = config;
    v.erase("sweep");
    v["name"] = base + "_" + std::to_string(k);
    if (!v.contains("params")) v["params"] = Json::object();
    v["params"][parameter] = values[k];
    out.push_back(std::move(v));
  }
  return out;
}

Curve sweep_curve(const Json& config, const std::vector<Outcome>& outcomes) {
  const std::string parameter = config.at("sweep").at("parameter").get<std::string>();
  std::string csv = parameter + ",distance\n";
  for (const auto& o : outcomes) {
    const auto x = as_number(o.report.at("inputs").at("params").at(parameter));
    const Json* d = lookup(o.report, "results.distance");
    const auto y = d ? as_number(*d) : std::nullopt;
    csv += (x ? detail::csv_number(*x) : "") + "," + (y ? detail::csv_number(*y) : "") + "\n";
  }
  return {"sweep.csv", csv};
}

std::string serialize(const Json& report) { return report.dump(2) + "\n"; }

void write_outcome(const Outcome& outcome, const std::filesystem::path& dir) {
  const auto target = dir / outcome.name;
  std::filesystem::create_directories(target);
  write_file(target / "report.json", serialize(outcome.report));
  write_file(target / "timing.json", Json{{"seconds", outcome.seconds}}.dump(2) + "\n");
  for (const auto& c : outcome.curves) write_file(target / c.file, c.csv);
}

void write_summary(const std::vector<Outcome>& outcomes, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  Json list = Json::array();
  bool passed = true;
  double total = 0.0;
  for (const auto& o : outcomes) {
    list.push_back({{"name", o.name},
                    {"passed", o.passed},
                    {"seconds", o.seconds},
                    {"report", (std::filesystem::path(o.name) / "report.json").generic_string()}});
    passed = passed && o.passed;
    total += o.seconds;
  }
  write_file(dir / "summary.json", Json{{"scenarios", list}, {"passed", passed}, {"seconds", total}}.dump(2) + "\n");
}

}  // namespace stabilize::runner
