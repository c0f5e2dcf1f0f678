// One PASS/FAIL line per acceptance criterion. Every check recomputes its
// quantity from raw matrices or a closed form instead of reusing the residual
// helpers of the library under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "../unit/support.hpp"
#include "stabilize/runner/runner.hpp"

namespace {

using namespace stabilize;
using Clock = std::chrono::steady_clock;

// Tolerances and budgets, pinned.
constexpr double kDiagonalTol = 1e-12;
constexpr double kOracleTol = 1e-14;
constexpr double kExactTol = 1e-10;
constexpr double kDistanceFactor = 10.0;
constexpr double kQuadraticWindow = 1e-2;
constexpr double kRoundingFloor = 1e-12;
constexpr double kMaxQuadraticConstant = 10.0;
constexpr double kStabilityBudget = 30.0;
constexpr double kDiagonalBudget = 1.0;
constexpr double kConjugationTol = 1e-9;
constexpr double kUnitaryTol = 1e-12;
constexpr double kFactorDistance = 0.1;
constexpr double kLiftTol = 1e-8;
constexpr double kSupGapTol = 1e-10;
constexpr double kGeometryTol = 1e-6;
constexpr double kAxiomTol = 1e-8;
constexpr double kDualGapTol = 1e-9;
constexpr double kTotalBudget = 120.0;

struct Verdict {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double spectral(const Matrix& m) { return m.size() == 0 ? 0.0 : Eigen::JacobiSVD<Matrix>(m).singularValues()(0); }

/// Blockwise operator norm from raw blocks.
double raw_norm(const AlgebraElement& a) {
  double n = 0.0;
  for (const auto& b : a.blocks()) n = std::max(n, spectral(b));
  return n;
}

double raw_product_defect(const Representation& phi) {
  const auto& g = *phi.group();
  double worst = 0.0;
  for (int s = 0; s < g.order(); ++s)
    for (int t = 0; t < g.order(); ++t)
      for (std::size_t b = 0; b < phi(0).blocks().size(); ++b)
        worst = std::max(worst, spectral(phi(g.multiply(s, t)).block(b) - phi(s).block(b) * phi(t).block(b)));
  return worst;
}

double raw_distance(const Representation& a, const Representation& b) {
  double worst = 0.0;
  for (int g = 0; g < a.group()->order(); ++g)
    for (std::size_t k = 0; k < a(g).blocks().size(); ++k)
      worst = std::max(worst, spectral(a(g).block(k) - b(g).block(k)));
  return worst;
}

// 1. mu(e) = 1 and (b (x) 1) e = e (1 (x) b), recomputed from the terms.
Verdict diagonal_identities() {
  const auto start = Clock::now();
  std::vector<std::pair<AlgebraPtr, Diagonal>> cases;
  for (const auto& blocks : std::vector<std::vector<Block>>{{{Field::Complex, 1}},
                                                           {{Field::Complex, 2}},
                                                           {{Field::Complex, 3}},
                                                           {{Field::Complex, 2}, {Field::Complex, 3}}}) {
    const auto a = construct_algebra(blocks);
    cases.emplace_back(a, diagonal(a));
  }
  for (auto g : {FiniteGroup::cyclic(2), FiniteGroup::cyclic(6), FiniteGroup::symmetric3(), FiniteGroup::dihedral4(),
                 FiniteGroup::quaternion8()}) {
    auto data = group_algebra(make_group(std::move(g)));
    cases.emplace_back(data.algebra, data.diagonal);
  }
  double worst = 0.0;
  for (const auto& [alg, e] : cases) {
    const Index d = alg->dimension();
    Coords mu = Coords::Zero(d);
    for (const auto& t : e.terms()) mu += alg->multiply(t.left, t.right);
    worst = std::max(worst, (mu - alg->unit()).cwiseAbs().maxCoeff());
    for (Index i = 0; i < d; ++i) {
      const Coords b = alg->basis(i);
      Matrix lhs = Matrix::Zero(d, d), rhs = Matrix::Zero(d, d);
      for (const auto& t : e.terms()) {
        lhs += alg->multiply(b, t.left) * t.right.transpose();
        rhs += t.left * alg->multiply(t.right, b).transpose();
      }
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  }
  const double elapsed = seconds_since(start);
  return {worst <= kDiagonalTol && elapsed < kDiagonalBudget,
          fmt("%zu algebras, max residual %.2e (tol %.0e), %.3f s (budget %.0f s)", cases.size(), worst, kDiagonalTol,
              elapsed, kDiagonalBudget)};
}

// 2. Iterates of the correction of z -> (1 + eta) z follow c -> c + c^2 (1 - c).
Verdict scalar_oracle() {
  const auto c1 = construct_algebra({{Field::Complex, 1}});
  double worst_gap = 0.0, worst_final = 0.0;
  int most = 0;
  for (double eta : {0.01, 0.05, 0.1}) {
    NewtonOptions options;
    options.record_iterates = true;
    const auto trace = newton_correct(Complex{1.0 + eta} * LinearMap::identity(c1), diagonal(c1), 1e-15, 50, options);
    double c = 1.0 + eta;
    for (const auto& it : trace.iterates) {
      worst_gap = std::max(worst_gap, std::abs(it.coefficients()(0, 0) - c));
      c = c + c * c * (1.0 - c);
    }
    worst_final = std::max(worst_final, std::abs(trace.final_map->coefficients()(0, 0) - 1.0));
    most = std::max(most, trace.iterations);
  }
  return {worst_gap <= kOracleTol && worst_final <= kOracleTol,
          fmt("max iterate gap %.2e, max |c - 1| %.2e (tol %.0e), <= %d iterations", worst_gap, worst_final, kOracleTol,
              most)};
}

// 3. 50 seeded perturbations of regular representations.
Verdict stability_suite() {
  const auto start = Clock::now();
  const std::vector<GroupPtr> groups{make_group(FiniteGroup::symmetric3()), make_group(FiniteGroup::cyclic(6)),
                                     make_group(FiniteGroup::dihedral4())};
  std::mt19937_64 rng(20260401);
  std::uniform_real_distribution<double> eta_dist(0.001, 0.01);
  double worst_defect = 0.0, worst_ratio = 0.0, worst_k = 0.0;
  int failures = 0;
  for (int k = 0; k < 50; ++k) {
    const auto rho = regular_representation(groups[k % 3]);
    const double eta = eta_dist(rng);
    const auto phi = perturb(rho, eta, rng());
    try {
      const auto r = haar_correct(phi, {.tol = 1e-12});
      worst_defect = std::max(worst_defect, raw_product_defect(r.representation));
      worst_ratio = std::max(worst_ratio, raw_distance(r.representation, phi) / eta);
      const auto& d = r.trace.defects;
      for (std::size_t n = 0; n + 1 < d.size(); ++n)
        if (d[n] < kQuadraticWindow && d[n + 1] > kRoundingFloor) worst_k = std::max(worst_k, d[n + 1] / (d[n] * d[n]));
    } catch (const Error&) {
      ++failures;
    }
  }
  const double elapsed = seconds_since(start);
  const bool pass = failures == 0 && worst_defect <= kExactTol && worst_ratio <= kDistanceFactor &&
                    worst_k <= kMaxQuadraticConstant && elapsed < kStabilityBudget;
  return {pass, fmt("50 runs, %d errors, max defect %.2e (tol %.0e), max distance/eta %.3f (<= %.0f), "
                    "max K %.3g (<= %.0f), %.2f s (budget %.0f s)",
                    failures, worst_defect, kExactTol, worst_ratio, kDistanceFactor, worst_k, kMaxQuadraticConstant,
                    elapsed, kStabilityBudget)};
}

// 4. phi2 = v phi1 v* with ||v - 1|| <= 0.05; recover a unitary intertwiner.
Verdict conjugation() {
  const std::vector<Representation> reps{
      standard_representation(make_group(FiniteGroup::symmetric3())),
      regular_representation(make_group(FiniteGroup::cyclic(6))),
      regular_representation(make_group(FiniteGroup::quaternion8())),
      standard_representation(make_group(FiniteGroup::symmetric4())), rotation_representation(5)};
  std::mt19937_64 rng(44);
  double worst_res = 0.0, worst_unit = 0.0, worst_v = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto& rho = reps[k % reps.size()];
    const auto v = testing::random_unitary_near_one(rho.target(), 0.05, rng);
    worst_v = std::max(worst_v, raw_norm(v - AlgebraElement::identity(rho.target())));
    const auto phi = conjugate(rho, v);
    const auto w = unitarize_conjugation(rho, phi);
    for (int g = 0; g < rho.group()->order(); ++g)
      for (std::size_t b = 0; b < w.blocks().size(); ++b)
        worst_res = std::max(worst_res, spectral(phi(g).block(b) * w.block(b) - w.block(b) * rho(g).block(b)));
    for (const auto& b : w.blocks())
      worst_unit = std::max(worst_unit, spectral(b.adjoint() * b - Matrix::Identity(b.rows(), b.cols())));
  }
  return {worst_res <= kConjugationTol && worst_unit <= kUnitaryTol && worst_v <= 0.05 + 1e-12,
          fmt("20 pairs, max ||v - 1|| %.4f, residual %.2e (tol %.0e), ||w*w - 1|| %.2e (tol %.0e)", worst_v,
              worst_res, kConjugationTol, worst_unit, kUnitaryTol)};
}

/// diag(a, ..., a) with `copies` blocks.
Matrix repeat_diagonal(const Matrix& a, int copies) {
  Matrix out = Matrix::Zero(a.rows() * copies, a.cols() * copies);
  for (int k = 0; k < copies; ++k) out.block(k * a.rows(), k * a.cols(), a.rows(), a.cols()) = a;
  return out;
}

// 5. Z/3 pushed to the top of M2 -> M4 -> M8, perturbed by 0.005, factors at stage 0.
Verdict factorization() {
  const auto tower = build_af_tower({{Field::Complex, 2}}, {{{{2}}, {}}, {{{2}}, {}}});
  const auto rho = rotation_representation(3);
  std::size_t worst_stage = 0;
  double worst_dist = 0.0, worst_defect = 0.0;
  int failures = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto phi = perturb(pushforward(rho, tower.to_colimit(0)), 0.005, seed);
    try {
      const auto r = factor_through_stage(phi, tower, 0.1);
      worst_stage = std::max(worst_stage, r.stage);
      worst_defect = std::max(worst_defect, raw_product_defect(r.representation));
      if (r.stage == 0)
        for (int g = 0; g < 3; ++g)
          worst_dist = std::max(worst_dist, spectral(repeat_diagonal(r.representation(g).block(0), 4) - phi(g).block(0)));
    } catch (const Error&) {
      ++failures;
    }
  }
  return {failures == 0 && worst_stage == 0 && worst_dist <= kFactorDistance && worst_defect <= kExactTol,
          fmt("5 seeds, %d errors, max stage %zu (want 0), max distance %.4f (<= %.1f), max defect %.2e", failures,
              worst_stage, worst_dist, kFactorDistance, worst_defect)};
}

// 6. Exact lifts along M2+M2 -> M2 and M2+M3 -> M3.
Verdict lifts() {
  struct Case {
    std::vector<Block> start;
    int selection;
    Representation rho;
  };
  const std::vector<Case> cases{
      {{{Field::Complex, 2}, {Field::Complex, 2}}, 0, rotation_representation(4)},
      {{{Field::Complex, 2}, {Field::Complex, 2}}, 0, standard_representation(make_group(FiniteGroup::symmetric3()))},
      {{{Field::Complex, 2}, {Field::Complex, 3}}, 1, standard_representation(make_group(FiniteGroup::symmetric4()))},
      {{{Field::Complex, 2}, {Field::Complex, 3}}, 1, permutation_representation(make_group(FiniteGroup::symmetric3()))},
  };
  std::mt19937_64 rng(66);
  double worst = 0.0, worst_defect = 0.0;
  int failures = 0;
  for (const auto& c : cases) {
    const auto tower = build_surjective_tower(c.start, {{{c.selection}}});
    const auto phi = conjugate(c.rho, testing::random_unitary_near_one(c.rho.target(), 0.05, rng));
    try {
      const auto r = lift_along_surjections(phi, tower, kLiftTol);
      worst_defect = std::max(worst_defect, raw_product_defect(r.representation));
      for (int g = 0; g < phi.group()->order(); ++g) {
        // Stage 0 projects onto the selected block; the top stage is phi's own algebra.
        const Matrix& image = r.stage == 0 ? r.representation(g).block(c.selection) : r.representation(g).block(0);
        worst = std::max(worst, spectral(image - phi(g).block(0)));
      }
    } catch (const Error&) {
      ++failures;
    }
  }
  return {failures == 0 && worst <= kLiftTol && worst_defect <= kExactTol,
          fmt("%zu lifts, %d errors, max pushforward residual %.2e (tol %.0e), max lift defect %.2e", cases.size(),
              failures, worst, kLiftTol, worst_defect)};
}

// 7. On isometric towers the stage sup metric equals the inf-sup over later stages.
Verdict sup_metric() {
  const std::vector<Tower> towers{build_af_tower({{Field::Complex, 2}}, {{{{2}}, {}}, {{{2}}, {}}}),
                                  build_af_tower({{Field::Complex, 1}, {Field::Complex, 2}}, {{{{1, 1}, {2, 0}}, {}}}),
                                  build_af_tower({{Field::Complex, 1}}, {{{{3}}, {}}, {{{2}}, {}}})};
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> points(1, 5);
  double worst_gap = 0.0, worst_direct = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto& t = towers[k % towers.size()];
    const int n = points(rng);
    std::vector<double> coords(n);
    for (int p = 0; p < n; ++p) coords[p] = p;
    std::vector<AlgebraElement> f, g;
    double direct = 0.0;
    for (int p = 0; p < n; ++p) {
      f.push_back(testing::random_element(t.stage(0), rng));
      g.push_back(testing::random_element(t.stage(0), rng));
      direct = std::max(direct, raw_norm(f.back() - g.back()));
    }
    const auto r = check_sup_metric_equality(FiniteMetricSpace::on_line(coords), t, 0, f, g);
    worst_gap = std::max(worst_gap, r.gap);
    worst_direct = std::max(worst_direct, std::abs(r.rhs - direct));
  }
  return {worst_gap <= kSupGapTol && worst_direct <= kSupGapTol,
          fmt("100 pairs, max gap %.2e, max |inf-sup - stage sup| %.2e (tol %.0e)", worst_gap, worst_direct,
              kSupGapTol)};
}

// 8. Hexagon vs disk and the polygon splitting constants.
Verdict geometry() {
  const auto disk = FinDimBanachSpace::lp(2, 2.0);
  const EmbeddedBall hex{polygon_space(3), RealMatrix::Identity(2, 2)};
  const EmbeddedBall round{disk, RealMatrix::Identity(2, 2)};
  const double h = hausdorff_distance_balls(hex, round, disk, {.tol = 1e-7}).value;
  const double h_err = std::abs(h - (1.0 - std::cos(std::numbers::pi / 6.0)));
  double worst = 0.0, smallest = INFINITY;
  for (int i = 2; i <= 12; ++i) {
    const double v = min_expansion_split(disk, polygon_space(i)).value;
    worst = std::max(worst, std::abs(v - 1.0 / std::cos(std::numbers::pi / (2.0 * i))));
    smallest = std::min(smallest, v);
  }
  return {h_err <= kGeometryTol && worst <= kGeometryTol && smallest > 1.0,
          fmt("hexagon error %.2e, max min_expansion error %.2e (tol %.0e), min value %.6f (> 1)", h_err, worst,
              kGeometryTol, smallest)};
}

Eigen::VectorXd random_probability(int n, std::mt19937_64& rng) {
  std::exponential_distribution<double> e;
  Eigen::VectorXd w(n);
  for (int k = 0; k < n; ++k) w(k) = e(rng);
  return w / w.sum();
}

FinitelySupportedMeasure prob(const SpacePtr& s, const Eigen::VectorXd& w) {
  return {s, w.cast<Complex>(), MeasureKind::Probability};
}

// 9. Kantorovich-Rubinstein distance.
Verdict transport() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> size(2, 16);
  std::normal_distribution<double> normal;
  double axioms = 0.0, gap = 0.0, line_err = 0.0, combo = 0.0, min_positive = INFINITY;
  for (int k = 0; k < 200; ++k) {
    const int n = size(rng);
    Eigen::MatrixXd pts(n, 3);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < 3; ++c) pts(a, c) = normal(rng);
    Eigen::MatrixXd d(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) d(a, b) = (pts.row(a) - pts.row(b)).norm();
    const auto s = std::make_shared<const FiniteMetricSpace>(d);
    const auto x = prob(s, random_probability(n, rng)), y = prob(s, random_probability(n, rng)),
               z = prob(s, random_probability(n, rng));
    const auto xy = kr_distance(x, y), yz = kr_distance(y, z), xz = kr_distance(x, z);
    axioms = std::max({axioms, xz.value - xy.value - yz.value, std::abs(xy.value - kr_distance(y, x).value),
                       kr_distance(x, x).value});
    min_positive = std::min(min_positive, xy.value);
    gap = std::max({gap, xy.gap, yz.gap, xz.gap});

    // On the line, KR is the L1 distance of the distribution functions.
    std::vector<double> coords(n);
    for (int a = 0; a < n; ++a) coords[a] = normal(rng);
    std::vector<int> order(n);
    for (int a = 0; a < n; ++a) order[a] = a;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return coords[a] < coords[b]; });
    const auto line = std::make_shared<const FiniteMetricSpace>(FiniteMetricSpace::on_line(coords));
    const Eigen::VectorXd p = random_probability(n, rng), q = random_probability(n, rng);
    double cdf = 0.0, l1 = 0.0;
    for (int r = 0; r + 1 < n; ++r) {
      cdf += p(order[r]) - q(order[r]);
      l1 += std::abs(cdf) * (coords[order[r + 1]] - coords[order[r]]);
    }
    line_err = std::max(line_err, std::abs(kr_distance(prob(line, p), prob(line, q)).value - l1));

    // d(sum w_i x_i, sum w_i y_i) <= sum |w_i| d(x_i, y_i).
    std::vector<FinitelySupportedMeasure> xs, ys;
    for (int i = 0; i < 3; ++i) {
      xs.push_back(prob(s, random_probability(n, rng)));
      ys.push_back(prob(s, random_probability(n, rng)));
    }
    const Eigen::VectorXd w = random_probability(3, rng);
    const std::vector<Complex> weights{w(0), w(1), w(2)};
    double bound = 0.0;
    for (int i = 0; i < 3; ++i) bound += w(i) * kr_distance(xs[i], ys[i]).value;
    combo = std::max(combo, kr_distance(combine(weights, xs), combine(weights, ys)).value - bound);
  }
  // Two points at distance D: d(p d0 + (1-p) d1, q d0 + (1-q) d1) = |p - q| D, also for complex masses.
  double two_point = 0.0;
  const auto pair = std::make_shared<const FiniteMetricSpace>(FiniteMetricSpace::on_line({0.0, 2.5}));
  for (double p : {0.0, 0.125, 0.5, 0.75}) {
    const double q = 1.0 - p;
    const Eigen::Vector2d a(p, 1.0 - p), b(q, 1.0 - q);
    two_point = std::max(two_point, std::abs(kr_distance(prob(pair, a), prob(pair, b)).value -
                                             std::abs(p - q) * 2.5));
    const Complex c{0.25 * p, 0.125};
    Eigen::VectorXcd u(2), v(2);
    u << Complex{0.25, 0.25} + c, Complex{0.125, 0.0};
    v << Complex{0.25, 0.25}, Complex{0.125, 0.0} + c;
    const FinitelySupportedMeasure mu(pair, u, MeasureKind::AbsolutelyConvex), nu(pair, v, MeasureKind::AbsolutelyConvex);
    two_point = std::max(two_point, std::abs(kr_distance(mu, nu).value - std::abs(c) * 2.5));
  }
  const bool pass = axioms <= kAxiomTol && min_positive > 0.0 && gap <= kDualGapTol && line_err <= kDualGapTol &&
                    combo <= kAxiomTol && two_point <= 1e-15;
  return {pass, fmt("200 triples: axiom violation %.2e (tol %.0e), min d(x,y) %.2e, dual gap %.2e, line CDF error "
                    "%.2e (tol %.0e), combination excess %.2e, two-point error %.2e",
                    axioms, kAxiomTol, min_positive, gap, line_err, kDualGapTol, combo, two_point)};
}

// 10. Golden verification, plus the wall clock of the whole suite.
Verdict determinism(Clock::time_point suite_start) {
  int failed = 0, total = 0;
  for (const auto& r : runner::verify_golden(STABILIZE_GOLDEN_DIR)) {
    ++total;
    if (!r.passed) {
      ++failed;
      for (const auto& m : r.mismatches) std::printf("    %s: %s\n", r.name.c_str(), m.c_str());
    }
  }
  const double elapsed = seconds_since(suite_start);
  return {failed == 0 && total > 0 && elapsed < kTotalBudget,
          fmt("%d golden cases, %d mismatched, suite wall clock %.2f s (budget %.0f s)", total, failed, elapsed,
              kTotalBudget)};
}

}  // namespace

int main() {
  const auto suite_start = Clock::now();
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"diagonal identities", diagonal_identities},
      {"scalar oracle", scalar_oracle},
      {"stability suite", stability_suite},
      {"conjugation", conjugation},
      {"factorization at M2", factorization},
      {"lifts along surjections", lifts},
      {"sup metric equality", sup_metric},
      {"geometry closed forms", geometry},
      {"transport", transport},
      {"determinism", [&] { return determinism(suite_start); }},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
