#include <algorithm>
#include <cmath>
#include <numbers>

#include "detail.hpp"

namespace stabilize::runner::detail {
namespace {

using io::number;

constexpr double kInf = std::numeric_limits<double>::infinity();

HaarOptions haar_options(const Params& p) {
  HaarOptions o;
  o.tol = p.number("tol", kAlgebraicTolerance, 1e-16, 1.0);
  o.max_iter = p.integer("max_iter", 50, 1, 10'000);
  return o;
}

Json convergence_of(const CorrectionTrace& trace) { return convergence_json(trace.defects); }

void require_same_algebra(const Params& p, const SemisimplePtr& expected, const SemisimplePtr& actual,
                          const std::string& what) {
  if (!expected->same_as(*actual))
    throw ConfigError(p.scope() + ": " + what + " lives in " + actual->name() + ", expected " + expected->name());
}

CertifiedOptions certified_options(const Params& p) {
  CertifiedOptions o;
  o.tol = p.number("tol", kOptimizedTolerance, 1e-12, 1.0);
  return o;
}

EmbeddedBall ball_fixture(const Params& p, const std::string& key) {
  const Params b = p.child(key);
  return resolve(b.scope(), [&] {
    auto norm = io::norm_from_json(b.at("norm"));
    RealMatrix basis = b.has("basis") ? io::real_matrix_from_json(b.at("basis"))
                                      : RealMatrix::Identity(norm.dimension(), norm.dimension());
    return EmbeddedBall{std::move(norm), std::move(basis)};
  });
}

BanachMap banach_map_fixture(const Params& p) {
  return resolve(p.scope(), [&] {
    return BanachMap{io::norm_from_json(p.at("source")), io::norm_from_json(p.at("target")),
                     io::real_matrix_from_json(p.at("matrix"))};
  });
}

Json interval_json(const NormInterval& n) { return {{"lower", number(n.lower)}, {"upper", number(n.upper)}}; }

Json certified_json(const CertifiedValue& v) {
  return {{"value", number(v.value)}, {"lower", number(v.lower)}, {"upper", number(v.upper)},
          {"evaluations", v.evaluations}};
}

Json min_expansion_sweep(const Params& p, Artifacts& out) {
  const int from = p.integer("from", 2, 2, 256);
  const int to = p.integer("to", 12, from, 256);
  const auto options = certified_options(p);
  const auto disk = FinDimBanachSpace::lp(2, 2.0);
  Json rows = Json::array();
  std::string csv = "i,min_expansion,closed_form\n";
  double max_error = 0.0;
  double min_value = kInf;
  for (int i = from; i <= to; ++i) {
    const auto v = min_expansion_split(disk, polygon_space(i), options);
    const double closed = 1.0 / std::cos(std::numbers::pi / (2.0 * i));
    max_error = std::max(max_error, std::abs(v.value - closed));
    min_value = std::min(min_value, v.value);
    rows.push_back({{"i", i}, {"value", number(v.value)}, {"closed_form", number(closed)}});
    csv += std::to_string(i) + "," + csv_number(v.value) + "," + csv_number(closed) + "\n";
  }
  out.curves.push_back({"min_expansion.csv", csv});
  return {{"rows", rows}, {"max_error", number(max_error)}, {"min_value", number(min_value)}};
}

}  // namespace

Json run_correct(const Params& p, std::uint64_t seed, Artifacts& out) {
  const std::string map = p.text("map");
  const double eta = p.number("eta", 0.0, 0.0, 0.5);
  const double tol = p.number("tol", kAlgebraicTolerance, 1e-16, 1.0);
  const int max_iter = p.integer("max_iter", 50, 1, 10'000);
  Rng rng(seed);

  std::optional<LinearMap> base;
  std::optional<LinearMap> input;
  if (map == "scalar") {
    const auto c = construct_algebra({{Field::Complex, 1}});
    base = LinearMap::identity(c);
    input = Complex{1.0 + eta} * *base;
  } else if (map == "identity") {
    base = LinearMap::identity(algebra_fixture(p, "algebra"));
  } else if (map == "embedding") {
    const auto source = algebra_fixture(p, "algebra");
    base = resolve(p.scope() + ".step", [&] {
      const auto tower = io::tower_from_json(
          {{"kind", "af"}, {"start", io::to_json(*source)}, {"steps", Json::array({p.at("step")})}});
      return tower.steps()[0];
    });
  } else {
    throw ConfigError(p.scope() + ".map: unknown map '" + map + "'");
  }
  if (!input) input = *base + random_map(base->source(), base->target(), eta, rng);

  const auto source = std::static_pointer_cast<const SemisimpleAlgebra>(base->source());
  NewtonOptions options;
  options.record_iterates = map == "scalar";
  auto trace = newton_correct(*input, diagonal(source), tol, max_iter, options);
  out.add_trace("newton", trace);

  Json results = {{"converged", trace.converged},
                  {"iterations", trace.iterations},
                  {"initial_defect", number(trace.defects.front())},
                  {"final_defect", number(trace.defects.back())},
                  {"unit_defect", number(trace.unit_defect)},
                  {"distance", number(basis_distance(*trace.final_map, *input))},
                  {"distance_to_unperturbed", number(basis_distance(*trace.final_map, *base))},
                  {"convergence", convergence_of(trace)}};
  if (map == "scalar") {
    // Independent recursion c_{n+1} = c_n + c_n^2 (1 - c_n).
    double c = 1.0 + eta;
    double gap = 0.0;
    for (const auto& iterate : trace.iterates) {
      gap = std::max(gap, std::abs(iterate.coefficients()(0, 0) - Complex{c}));
      c = c + c * c * (1.0 - c);
    }
    results["value"] = number(trace.final_map->coefficients()(0, 0).real());
    results["oracle_gap"] = number(gap);
  }
  return results;
}

Json run_haar(const Params& p, std::uint64_t seed, Artifacts& out) {
  const auto rho = representation_fixture(p, "representation");
  const double eta = p.number("eta", 0.0, 0.0, 0.5);
  const auto options = haar_options(p);
  const auto phi = resolve(p.scope() + ".eta", [&] { return perturb(rho, eta, seed); });

  const auto r = haar_correct(phi, options);
  out.add_trace("haar", r.trace);
  return {{"group_order", rho.group()->order()},
          {"target", rho.target()->name()},
          {"unitary", r.representation.unitary()},
          {"initial_defect", number(r.initial_defect)},
          {"final_defect", number(rep_defect(r.representation))},
          {"unitarity_defect", number(unitarity_defect(r.representation))},
          {"distance", number(rep_distance(r.representation, phi))},
          {"distance_to_unperturbed", number(rep_distance(r.representation, rho))},
          {"lipschitz_ratio", number(r.lipschitz_ratio)},
          {"iterations", r.trace.iterations},
          {"convergence", convergence_of(r.trace)}};
}

Json run_conjugate(const Params& p, std::uint64_t seed, Artifacts&) {
  const auto rho = representation_fixture(p, "representation");
  const double size = p.number("size", 0.0, 1.0);
  Rng rng(seed);
  const auto v = random_unitary_near_one(rho.target(), size, rng);
  const auto phi = conjugate(rho, v);

  const auto u = average_intertwiner(rho, phi);
  const auto w = unitarize_conjugation(rho, phi);
  const auto one = AlgebraElement::identity(rho.target());
  return {{"conjugator_distance", number(operator_norm(v - one))},
          {"average_residual", number(intertwining_residual(rho, phi, u))},
          {"residual", number(intertwining_residual(rho, phi, w))},
          {"unitarity", number(operator_norm(w.adjoint() * w - one))},
          {"recovered_distance", number(rep_distance(conjugate(rho, w), phi))}};
}

Json run_factor(const Params& p, std::uint64_t seed, Artifacts& out) {
  const auto tower = tower_fixture(p, "tower");
  const auto rho = representation_fixture(p, "representation");
  const int from = p.integer("source_stage", 0, 0, static_cast<int>(tower.top()));
  require_same_algebra(p, tower.stage(from), rho.target(), "representation");
  const double eta = p.number("eta", 0.0, 0.0, 0.5);
  const double epsilon = p.number("epsilon", 1e-16, 2.0);
  const auto options = haar_options(p);
  const auto phi = resolve(p.scope() + ".eta",
                           [&] { return perturb(pushforward(rho, tower.map(from, tower.top())), eta, seed); });

  const auto r = factor_through_stage(phi, tower, epsilon, options);
  out.add_trace("factor", r.trace);
  return {{"stage", r.stage},
          {"epsilon", number(r.epsilon)},
          {"input_defect", number(rep_defect(phi))},
          {"distance", number(r.distance)},
          {"residual", number(r.residual)},
          {"defect_before", number(r.defect_before)},
          {"defect_after", number(r.defect_after)},
          {"iterations", r.iterations}};
}

Json run_lift(const Params& p, std::uint64_t seed, Artifacts&) {
  const auto tower = tower_fixture(p, "tower");
  const auto rho = representation_fixture(p, "representation");
  require_same_algebra(p, tower.stage(tower.top()), rho.target(), "representation");
  const double size = p.number("conjugator", 0.0, 0.0, 1.0);
  const double tol = p.number("tol", 1e-8, 1e-14, 1.0);
  Rng rng(seed);
  const auto phi = conjugate(rho, random_unitary_near_one(rho.target(), size, rng));

  const auto r = lift_along_surjections(phi, tower, tol);
  return {{"stage", r.stage},
          {"residual", number(r.residual)},
          {"pushforward_residual", number(rep_distance(pushforward(r.representation, tower.to_colimit(r.stage)), phi))},
          {"lift_defect", number(rep_defect(r.representation))},
          {"conjugator_distance", number(r.conjugator_distance)}};
}

Json run_geometry(const Params& p, std::uint64_t, Artifacts& out) {
  const std::string op = p.text("op");
  if (op == "hausdorff") {
    const auto a = ball_fixture(p, "a");
    const auto b = ball_fixture(p, "b");
    const auto ambient = resolve(p.scope() + ".ambient", [&] { return io::norm_from_json(p.at("ambient")); });
    return certified_json(hausdorff_distance_balls(a, b, ambient, certified_options(p)));
  }
  if (op == "min_expansion") {
    const auto source = resolve(p.scope() + ".source", [&] { return io::norm_from_json(p.at("source")); });
    const auto target = resolve(p.scope() + ".target", [&] { return io::norm_from_json(p.at("target")); });
    return certified_json(min_expansion_split(source, target, certified_options(p)));
  }
  if (op == "min_expansion_sweep") return min_expansion_sweep(p, out);
  if (op == "operator_norm") return interval_json(banach_operator_norm(banach_map_fixture(p)));
  if (op == "rescale") {
    const auto r = rescale_to_contraction(banach_map_fixture(p));
    return {{"scale", number(r.scale)}, {"norm", interval_json(r.norm)}};
  }
  if (op == "graph") {
    const auto f = resolve(p.scope() + ".f", [&] { return io::real_matrix_from_json(p.at("f")); });
    const auto nearby = resolve(p.scope() + ".nearby", [&] { return io::real_matrix_from_json(p.at("nearby")); });
    const auto g = graph_approximate(f, nearby);
    return {{"map_norm", number(g.map_norm())}, {"map", io::to_json(g.map)}};
  }
  throw ConfigError(p.scope() + ".op: unknown geometry op '" + op + "'");
}

namespace {

Eigen::VectorXd random_probability(int n, Rng& rng) {
  std::exponential_distribution<double> exp;
  Eigen::VectorXd w(n);
  for (int k = 0; k < n; ++k) w(k) = exp(rng);
  return w / w.sum();
}

FinitelySupportedMeasure probability(const SpacePtr& space, const Eigen::VectorXd& w) {
  return {space, w.cast<Complex>(), MeasureKind::Probability};
}

Json transport_ensemble(const Params& p, std::uint64_t seed) {
  const int count = p.integer("count", 1, 10'000);
  const int max_points = p.integer("max_points", 2, kMaxTransportPoints);
  Rng rng(seed);
  std::uniform_int_distribution<int> size(2, max_points);
  std::normal_distribution<double> coord;
  double triangle = 0.0, symmetry = 0.0, identity = 0.0, gap = 0.0, combination = 0.0;
  for (int t = 0; t < count; ++t) {
    const int n = size(rng);
    Eigen::MatrixXd pts(n, 2);
    for (int k = 0; k < n; ++k) pts.row(k) << coord(rng), coord(rng);
    Eigen::MatrixXd d(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) d(a, b) = (pts.row(a) - pts.row(b)).norm();
    const auto space = std::make_shared<const FiniteMetricSpace>(d);
    const auto x = probability(space, random_probability(n, rng));
    const auto y = probability(space, random_probability(n, rng));
    const auto z = probability(space, random_probability(n, rng));
    const auto xy = kr_distance(x, y), yz = kr_distance(y, z), xz = kr_distance(x, z);
    triangle = std::max(triangle, xz.value - xy.value - yz.value);
    symmetry = std::max(symmetry, std::abs(xy.value - kr_distance(y, x).value));
    identity = std::max(identity, kr_distance(x, x).value);
    gap = std::max({gap, xy.gap, yz.gap, xz.gap});
    // d(s x + (1-s) z, s y + (1-s) z) <= s d(x, y).
    const double s = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const std::vector<Complex> weights{s, 1.0 - s};
    const double lhs = kr_distance(combine(weights, {x, z}), combine(weights, {y, z})).value;
    combination = std::max(combination, lhs - s * xy.value);
  }
  return {{"count", count},
          {"triangle_violation", number(triangle)},
          {"symmetry_gap", number(symmetry)},
          {"identity_gap", number(identity)},
          {"max_gap", number(gap)},
          {"combination_violation", number(combination)}};
}

}  // namespace

Json run_transport(const Params& p, std::uint64_t seed, Artifacts&) {
  if (p.has("ensemble")) return transport_ensemble(p.child("ensemble"), seed);
  const auto space = resolve(p.scope() + ".space", [&] { return io::space_from_json(p.at("space")); });
  const auto a = resolve(p.scope() + ".a", [&] { return io::measure_from_json(space, p.at("a")); });
  const auto b = resolve(p.scope() + ".b", [&] { return io::measure_from_json(space, p.at("b")); });
  const auto d = kr_distance(a, b);
  Json potential = Json::array();
  for (Index k = 0; k < d.potential.size(); ++k) potential.push_back(number(d.potential(k)));
  return {{"value", number(d.value)}, {"gap", number(d.gap)}, {"phase", number(d.phase)}, {"potential", potential}};
}

Json run_supmetric(const Params& p, std::uint64_t seed, Artifacts&) {
  const auto tower = tower_fixture(p, "tower");
  const int stage = p.integer("stage", 0, 0, static_cast<int>(tower.top()));
  const int points = p.integer("points", 1, 64);
  const int pairs = p.integer("pairs", 1, 10'000);
  std::vector<double> coords(points);
  for (int k = 0; k < points; ++k) coords[k] = k;
  const auto space = FiniteMetricSpace::on_line(coords);
  Rng rng(seed);
  double gap = 0.0;
  double largest = 0.0;
  for (int t = 0; t < pairs; ++t) {
    std::vector<AlgebraElement> f, g;
    for (int k = 0; k < points; ++k) {
      f.push_back(random_element(tower.stage(stage), rng));
      g.push_back(random_element(tower.stage(stage), rng));
    }
    const auto r = check_sup_metric_equality(space, tower, stage, f, g);
    gap = std::max(gap, r.gap);
    largest = std::max(largest, r.lhs);
  }
  return {{"pairs", pairs}, {"max_gap", number(gap)}, {"max_lhs", number(largest)}};
}

}  // namespace stabilize::runner::detail
