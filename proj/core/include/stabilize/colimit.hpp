#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "stabilize/algebra.hpp"
#include "stabilize/linear_map.hpp"
#include "stabilize/measure.hpp"
#include "stabilize/representation.hpp"
#include "stabilize/stabilization.hpp"

namespace stabilize {

enum class TowerKind { Isometric, Surjective };

/// A finite chain A_0 -> A_1 -> ... -> A_N of unital morphisms. The last stage
/// stands in for the colimit; map(i, j) composes the consecutive steps.
class Tower {
 public:
  /// steps[t] : stages[t] -> stages[t+1]. Validates unitality, multiplicativity
  /// and the isometry or surjectivity demanded by `kind`.
  Tower(std::vector<SemisimplePtr> stages, std::vector<LinearMap> steps, TowerKind kind);

  std::size_t size() const { return stages_.size(); }
  std::size_t top() const { return stages_.size() - 1; }
  TowerKind kind() const { return kind_; }
  const SemisimplePtr& stage(std::size_t i) const { return stages_.at(i); }
  const std::vector<SemisimplePtr>& stages() const { return stages_; }
  const std::vector<LinearMap>& steps() const { return steps_; }

  /// A_i -> A_j for i <= j.
  LinearMap map(std::size_t i, std::size_t j) const;
  /// A_i -> A_N.
  LinearMap to_colimit(std::size_t i) const { return map(i, top()); }

 private:
  std::vector<SemisimplePtr> stages_;
  std::vector<LinearMap> steps_;
  TowerKind kind_;
};

/// One embedding step: multiplicities[r][c] copies of source block c sit on
/// the diagonal of target block r. target_sizes, when given, must match.
struct AfStep {
  std::vector<std::vector<int>> multiplicities;
  std::vector<int> target_sizes;
};

Tower build_af_tower(std::vector<Block> start, const std::vector<AfStep>& steps);

/// One projection step: target block r is a copy of source block selections[r].
struct ProjectionStep {
  std::vector<int> selections;
};

Tower build_surjective_tower(std::vector<Block> start, const std::vector<ProjectionStep>& steps);

struct FactorReport {
  std::size_t stage = 0;
  double epsilon = 0.0;
  /// rep_distance(iota_i o phi_i, phi).
  double distance = 0.0;
  double defect_before = 0.0;
  double defect_after = 0.0;
  int iterations = 0;
  /// Largest operator-norm distance from phi(g) to the image of A_i.
  double residual = 0.0;
  Representation representation;
  CorrectionTrace trace;
};

/// Smallest stage i at which phi is within epsilon/2 of iota_i(A_i), whose
/// projected candidate corrects to an exact phi_i with
/// rep_distance(iota_i o phi_i, phi) <= epsilon.
FactorReport factor_through_stage(const Representation& phi, const Tower& tower, double epsilon,
                                  const HaarOptions& options = {});

struct LiftReport {
  std::size_t stage = 0;
  Representation representation;
  /// max over g of ||iota_i(lift(g)) - phi(g)||.
  double residual = 0.0;
  /// ||u - 1|| for the conjugator u with phi = u (iota_i o phi_i) u^-1.
  double conjugator_distance = 0.0;
};

/// Exact lift of phi through the first stage of a surjective tower at which
/// the pipeline succeeds; residual <= tol.
LiftReport lift_along_surjections(const Representation& phi, const Tower& tower, double tol = 1e-8,
                                  const HaarOptions& options = {});

/// Conjugation step of the lift, starting from a given exact approximant at a stage.
LiftReport lift_with_approximant(const Representation& phi, const Tower& tower, std::size_t stage,
                                 const Representation& approximant);

/// Guard on the conjugator: the lift is refused when ||u - 1|| reaches this.
inline constexpr double kMaxConjugatorDistance = 0.5;

struct SupMetricCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
};

/// lhs = sup_p ||iota_i f(p) - iota_i g(p)||,
/// rhs = inf_{j >= i} sup_p ||iota_ji f(p) - iota_ji g(p)||.
SupMetricCheck check_sup_metric_equality(const FiniteMetricSpace& points, const Tower& tower, std::size_t stage,
                                         const std::vector<AlgebraElement>& f, const std::vector<AlgebraElement>& g);

}  // namespace stabilize
