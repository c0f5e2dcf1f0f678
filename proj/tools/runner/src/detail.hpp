#pragma once

#include <map>
#include <random>
#include <string>
#include <utility>

#include "stabilize/runner/runner.hpp"
#include "stabilize/stabilize.hpp"

namespace stabilize::runner::detail {

/// Typed, range-checked access to one JSON object; every failure is a ConfigError
/// naming the scope and the key.
class Params {
 public:
  Params(const Json& json, std::string scope);

  bool has(const std::string& key) const { return json_->contains(key); }
  const Json& at(const std::string& key) const;
  Params child(const std::string& key) const { return {at(key), scope_ + "." + key}; }

  double number(const std::string& key, double lo, double hi) const;
  double number(const std::string& key, double fallback, double lo, double hi) const;
  int integer(const std::string& key, int lo, int hi) const;
  int integer(const std::string& key, int fallback, int lo, int hi) const;
  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;

  const std::string& scope() const { return scope_; }

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

  const Json* json_;
  std::string scope_;
};

/// Runs fixture construction; library and JSON errors become ConfigError.
template <class F>
auto resolve(const std::string& what, F&& build) -> decltype(build()) {
  try {
    return build();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(what + ": " + e.what());
  } catch (const Json::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

/// Traces and curves collected while a scenario runs.
struct Artifacts {
  std::map<std::string, Json> traces;
  std::vector<Curve> curves;

  void add_trace(const std::string& name, const CorrectionTrace& trace);
};

using Rng = std::mt19937_64;

SemisimplePtr algebra_fixture(const Params& p, const std::string& key);
/// {"kind": regular|standard|permutation|rotation|character|sign|trivial|explicit, ...}.
Representation representation_fixture(const Params& p, const std::string& key);
Tower tower_fixture(const Params& p, const std::string& key);

AlgebraElement random_element(const SemisimplePtr& algebra, Rng& rng);
/// exp(K) for a random skew-Hermitian K with ||K|| = size.
AlgebraElement random_unitary_near_one(const SemisimplePtr& algebra, double size, Rng& rng);
/// Random linear map whose largest basis image has operator norm `size`.
LinearMap random_map(const AlgebraPtr& source, const SemisimplePtr& target, double size, Rng& rng);

Json convergence_json(const std::vector<double>& defects);
std::string csv_number(double x);

Json run_correct(const Params& p, std::uint64_t seed, Artifacts& out);
Json run_haar(const Params& p, std::uint64_t seed, Artifacts& out);
Json run_conjugate(const Params& p, std::uint64_t seed, Artifacts& out);
Json run_factor(const Params& p, std::uint64_t seed, Artifacts& out);
Json run_lift(const Params& p, std::uint64_t seed, Artifacts& out);
Json run_geometry(const Params& p, std::uint64_t seed, Artifacts& out);
Json run_transport(const Params& p, std::uint64_t seed, Artifacts& out);
Json run_supmetric(const Params& p, std::uint64_t seed, Artifacts& out);

}  // namespace stabilize::runner::detail
