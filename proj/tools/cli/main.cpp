#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "stabilize/runner/runner.hpp"

namespace {

namespace fs = std::filesystem;
namespace runner = stabilize::runner;

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("stabilize");
  spdlog::set_default_logger(logger);
  const char* level = std::getenv("STABILIZE_LOG");
  spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
}

void print_outcome(const runner::Outcome& o) {
  std::cout << (o.passed ? "PASS " : "FAIL ") << o.name << "\n";
  if (o.passed) return;
  if (!o.report.at("error").is_null()) std::cout << "  error: " << o.report.at("error").at("message").get<std::string>() << "\n";
  for (const auto& a : o.report.at("assertions"))
    if (!a.at("passed").get<bool>())
      std::cout << "  assertion " << a.at("path").get<std::string>() << " " << a.at("op").get<std::string>() << " "
                << a.at("value").dump() << " (actual " << a.at("actual").dump() << ")\n";
}

int finish(const std::vector<runner::Outcome>& outcomes, const fs::path& out) {
  for (const auto& o : outcomes) runner::write_outcome(o, out);
  runner::write_summary(outcomes, out);
  bool passed = true;
  for (const auto& o : outcomes) {
    print_outcome(o);
    passed = passed && o.passed;
  }
  return passed ? runner::kExitPass : runner::kExitFail;
}

int run(const fs::path& config, const runner::RunOptions& options, const fs::path& out) {
  return finish(runner::run_batch(runner::scenarios_of(runner::load_config(config)), options), out);
}

int sweep(const fs::path& config_path, const runner::RunOptions& options, const fs::path& out) {
  const auto config = runner::load_config(config_path);
  const auto outcomes = runner::run_batch(runner::expand_sweep(config), options);
  const int code = finish(outcomes, out);
  const auto curve = runner::sweep_curve(config, outcomes);
  std::ofstream(out / curve.file, std::ios::binary) << curve.csv;
  return code;
}

int verify(const fs::path& dir, bool update) {
  if (update) runner::update_golden(dir);
  bool passed = true;
  for (const auto& r : runner::verify_golden(dir)) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << "\n";
    for (const auto& m : r.mismatches) std::cout << "  " << m << "\n";
    passed = passed && r.passed;
  }
  return passed ? runner::kExitPass : runner::kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Run stabilization scenarios and verify golden reports"};
  app.require_subcommand(1);

  fs::path config, out = "stabilize_out", golden;
  std::uint64_t seed = 0;
  bool update = false;

  auto* run_cmd = app.add_subcommand("run", "Run a scenario or a batch of scenarios");
  run_cmd->add_option("config", config, "Scenario config (JSON)")->required();
  auto* run_seed = run_cmd->add_option("--seed", seed, "Override the scenario seed");
  run_cmd->add_option("--out", out, "Output directory");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run one scenario per value of its sweep parameter");
  sweep_cmd->add_option("config", config, "Sweep config (JSON)")->required();
  auto* sweep_seed = sweep_cmd->add_option("--seed", seed, "Override the scenario seed");
  sweep_cmd->add_option("--out", out, "Output directory");

  auto* verify_cmd = app.add_subcommand("verify", "Check every golden case for byte determinism and tolerance");
  verify_cmd->add_option("golden-dir", golden, "Directory of <case>/{config,expected}.json")->required();
  verify_cmd->add_flag("--update", update, "Rewrite expected.json from fresh runs first");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return runner::kExitConfig;
  }

  runner::RunOptions options;
  if (*run_seed || *sweep_seed) options.seed = seed;
  try {
    if (*run_cmd) return run(config, options, out);
    if (*sweep_cmd) return sweep(config, options, out);
    return verify(golden, update);
  } catch (const runner::ConfigError& e) {
    std::cerr << "stabilize: " << e.what() << "\n";
    return runner::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "stabilize: " << e.what() << "\n";
    return runner::kExitFail;
  }
}
