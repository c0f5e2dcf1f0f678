#include "stabilize/colimit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "stabilize/errors.hpp"

namespace stabilize {

namespace {

void validate_step(const LinearMap& step, TowerKind kind, std::size_t index) {
  const std::string where = "tower step " + std::to_string(index) + ": ";
  const Coords unit_image = step.coefficients() * step.source()->unit();
  if (step.target()->norm(unit_image - step.target()->unit()) > kAlgebraicTolerance)
    throw PreconditionError(where + "connecting map is not unital");
  if (basis_defect(step) > kAlgebraicTolerance) throw PreconditionError(where + "connecting map is not multiplicative");

  if (kind == TowerKind::Isometric) {
    std::mt19937_64 rng(0x70 + index);
    std::normal_distribution<double> normal;
    const Algebra& source = *step.source();
    for (int trial = 0; trial < 8; ++trial) {
      Coords x(source.dimension());
      for (Index i = 0; i < x.size(); ++i)
        x(i) = Complex{normal(rng), source.is_real_coordinate(i) ? 0.0 : normal(rng)};
      const double before = source.norm(x);
      const double after = step.target()->norm(step.coefficients() * x);
      if (std::abs(before - after) > 1e-9 * std::max(1.0, before))
        throw PreconditionError(where + "connecting map is not isometric");
    }
  } else {
    Eigen::FullPivLU<Matrix> lu(step.coefficients());
    if (lu.rank() != step.target()->dimension()) throw PreconditionError(where + "connecting map is not surjective");
  }
}

/// Least-squares preimage of y under the map, real on real coordinates.
Coords least_squares_preimage(const Eigen::CompleteOrthogonalDecomposition<Matrix>& solver, const Algebra& source,
                              const Coords& y) {
  Coords x = solver.solve(y);
  for (Index i = 0; i < x.size(); ++i)
    if (source.is_real_coordinate(i)) x(i) = x(i).real();
  return x;
}

}  // namespace

Tower::Tower(std::vector<SemisimplePtr> stages, std::vector<LinearMap> steps, TowerKind kind)
    : stages_(std::move(stages)), steps_(std::move(steps)), kind_(kind) {
  if (stages_.empty()) throw PreconditionError("a tower needs at least one stage");
  if (steps_.size() + 1 != stages_.size()) throw PreconditionError("a tower needs one map per consecutive pair");
  for (std::size_t t = 0; t < steps_.size(); ++t) {
    if (!steps_[t].source()->same_as(*stages_[t]) || !steps_[t].target()->same_as(*stages_[t + 1]))
      throw PreconditionError("tower step " + std::to_string(t) + " does not connect consecutive stages");
    validate_step(steps_[t], kind_, t);
  }
}

LinearMap Tower::map(std::size_t i, std::size_t j) const {
  if (i > j || j >= stages_.size()) throw PreconditionError("tower maps go from lower to higher stages");
  LinearMap out = LinearMap::identity(stages_[i]);
  for (std::size_t t = i; t < j; ++t) out = out.then(steps_[t]);
  return out;
}

Tower build_af_tower(std::vector<Block> start, const std::vector<AfStep>& steps) {
  std::vector<SemisimplePtr> stages{construct_algebra(std::move(start))};
  std::vector<LinearMap> maps;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const auto& source = stages.back();
    const auto& in = source->blocks();
    const auto& m = steps[t].multiplicities;
    const std::string where = "embedding step " + std::to_string(t) + ": ";
    if (m.empty()) throw PreconditionError(where + "no target blocks");
    std::vector<bool> used(in.size(), false);
    std::vector<Block> out;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (m[r].size() != in.size()) throw PreconditionError(where + "row length must equal the source block count");
      Block b{Field::Real, 0};
      for (std::size_t c = 0; c < in.size(); ++c) {
        if (m[r][c] < 0) throw PreconditionError(where + "multiplicities must be non-negative integers");
        if (m[r][c] == 0) continue;
        used[c] = true;
        b.n += m[r][c] * in[c].n;
        if (in[c].field == Field::Complex) b.field = Field::Complex;
      }
      if (b.n == 0) throw PreconditionError(where + "target block receives nothing; the embedding is not unital");
      if (!steps[t].target_sizes.empty() &&
          (steps[t].target_sizes.size() != m.size() || steps[t].target_sizes[r] != b.n))
        throw PreconditionError(where + "declared target size does not match the multiplicities");
      out.push_back(b);
    }
    if (std::find(used.begin(), used.end(), false) != used.end())
      throw PreconditionError(where + "a source block is dropped; the embedding is not injective");

    auto target = construct_algebra(out);
    Matrix coefficients = Matrix::Zero(target->dimension(), source->dimension());
    for (std::size_t r = 0; r < m.size(); ++r) {
      int corner = 0;
      for (std::size_t c = 0; c < in.size(); ++c)
        for (int copy = 0; copy < m[r][c]; ++copy) {
          for (int row = 0; row < in[c].n; ++row)
            for (int col = 0; col < in[c].n; ++col)
              coefficients(target->unit_index(r, corner + row, corner + col), source->unit_index(c, row, col)) = 1.0;
          corner += in[c].n;
        }
    }
    maps.emplace_back(source, target, std::move(coefficients));
    stages.push_back(std::move(target));
  }
  return Tower(std::move(stages), std::move(maps), TowerKind::Isometric);
}

Tower build_surjective_tower(std::vector<Block> start, const std::vector<ProjectionStep>& steps) {
  std::vector<SemisimplePtr> stages{construct_algebra(std::move(start))};
  std::vector<LinearMap> maps;
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const auto& source = stages.back();
    const auto& in = source->blocks();
    const auto& sel = steps[t].selections;
    const std::string where = "projection step " + std::to_string(t) + ": ";
    if (sel.empty()) throw PreconditionError(where + "no target blocks");
    std::set<int> distinct;
    std::vector<Block> out;
    for (int c : sel) {
      if (c < 0 || static_cast<std::size_t>(c) >= in.size()) throw PreconditionError(where + "selection out of range");
      if (!distinct.insert(c).second)
        throw PreconditionError(where + "a source block is selected twice; the map is not surjective");
      out.push_back(in[c]);
    }
    auto target = construct_algebra(out);
    Matrix coefficients = Matrix::Zero(target->dimension(), source->dimension());
    for (std::size_t r = 0; r < sel.size(); ++r) {
      const int n = in[sel[r]].n;
      for (int row = 0; row < n; ++row)
        for (int col = 0; col < n; ++col)
          coefficients(target->unit_index(r, row, col), source->unit_index(sel[r], row, col)) = 1.0;
    }
    maps.emplace_back(source, target, std::move(coefficients));
    stages.push_back(std::move(target));
  }
  return Tower(std::move(stages), std::move(maps), TowerKind::Surjective);
}

FactorReport factor_through_stage(const Representation& phi, const Tower& tower, double epsilon,
                                  const HaarOptions& options) {
  if (tower.kind() != TowerKind::Isometric) throw PreconditionError("factorization needs an isometric tower");
  if (!phi.target()->same_as(*tower.stage(tower.top())))
    throw PreconditionError("representation does not land in the top stage of the tower");
  if (!(epsilon > 0.0)) throw PreconditionError("epsilon must be positive");

  for (std::size_t i = 0; i < tower.size(); ++i) {
    const LinearMap iota = tower.to_colimit(i);
    const auto& stage = tower.stage(i);
    const Eigen::CompleteOrthogonalDecomposition<Matrix> solver(iota.coefficients());

    double residual = 0.0;
    std::vector<AlgebraElement> values;
    for (const auto& value : phi.values()) {
      const Coords y = value.coords();
      Coords x = least_squares_preimage(solver, *stage, y);
      residual = std::max(residual, phi.target()->norm(y - iota.coefficients() * x));
      values.push_back(AlgebraElement::from_coords(stage, x));
    }
    if (residual > epsilon / 2) continue;

    try {
      if (phi.unitary())
        for (auto& v : values) v = polar_decompose(v).unitary;
      Representation candidate(phi.group(), stage, std::move(values));
      const double before = rep_defect(candidate);
      HaarResult corrected = haar_correct(candidate, options);
      const double distance = rep_distance(pushforward(corrected.representation, iota), phi);
      if (distance > epsilon) continue;
      return {i,
              epsilon,
              distance,
              before,
              rep_defect(corrected.representation),
              corrected.trace.iterations,
              residual,
              std::move(corrected.representation),
              std::move(corrected.trace)};
    } catch (const SingularError&) {
      continue;
    } catch (const PreconditionError&) {
      continue;
    } catch (const ConvergenceError&) {
      continue;
    }
  }
  throw NotFoundError("no stage of the tower approximates the representation within epsilon = " +
                      std::to_string(epsilon));
}

LiftReport lift_with_approximant(const Representation& phi, const Tower& tower, std::size_t stage,
                                 const Representation& approximant) {
  if (tower.kind() != TowerKind::Surjective) throw PreconditionError("lifting needs a surjective tower");
  if (!phi.exact() || !approximant.exact()) throw PreconditionError("lifting needs exact representations");
  if (!approximant.target()->same_as(*tower.stage(stage)))
    throw PreconditionError("approximant does not land in the requested stage");

  const LinearMap pi = tower.to_colimit(stage);
  const auto& source = tower.stage(stage);
  const Representation pushed = pushforward(approximant, pi);
  AlgebraElement u = average_intertwiner(pushed, phi);
  const double distance = operator_norm(u - AlgebraElement::identity(phi.target()));
  if (distance >= kMaxConjugatorDistance)
    throw PreconditionError("conjugator is too far from the unit (||u - 1|| = " + std::to_string(distance) +
                            "); its lift need not be invertible");
  const bool unitary = phi.unitary() && approximant.unitary();
  if (unitary) u = polar_decompose(u).unitary;

  // Section of the surjection: pseudo-inverse, completed by 1 - s(1) on the kernel.
  const Eigen::CompleteOrthogonalDecomposition<Matrix> solver(pi.coefficients());
  const Coords s_unit = least_squares_preimage(solver, *source, phi.target()->unit());
  const Coords lifted = least_squares_preimage(solver, *source, u.coords()) + (source->unit() - s_unit);
  const AlgebraElement u_lift = AlgebraElement::from_coords(source, lifted);
  const AlgebraElement u_inverse = unitary ? u_lift.adjoint() : u_lift.inverse();

  std::vector<AlgebraElement> values;
  for (const auto& v : approximant.values()) values.push_back(u_lift * v * u_inverse);
  Representation lift(phi.group(), source, std::move(values));
  const double residual = rep_distance(pushforward(lift, pi), phi);
  return {stage, std::move(lift), residual, distance};
}

LiftReport lift_along_surjections(const Representation& phi, const Tower& tower, double tol,
                                  const HaarOptions& options) {
  if (tower.kind() != TowerKind::Surjective) throw PreconditionError("lifting needs a surjective tower");
  if (!phi.exact()) throw PreconditionError("lifting needs an exact representation");
  if (!phi.target()->same_as(*tower.stage(tower.top())))
    throw PreconditionError("representation does not land in the top stage of the tower");

  std::optional<Error> last;
  for (std::size_t i = 0; i < tower.size(); ++i) {
    const LinearMap pi = tower.to_colimit(i);
    const auto& source = tower.stage(i);
    const Eigen::CompleteOrthogonalDecomposition<Matrix> solver(pi.coefficients());
    const Coords complement = source->unit() - least_squares_preimage(solver, *source, phi.target()->unit());
    try {
      std::vector<AlgebraElement> values;
      for (const auto& v : phi.values())
        values.push_back(
            AlgebraElement::from_coords(source, least_squares_preimage(solver, *source, v.coords()) + complement));
      Representation candidate(phi.group(), source, std::move(values));
      Representation approximant = haar_correct(candidate, options).representation;
      LiftReport report = lift_with_approximant(phi, tower, i, approximant);
      if (report.residual <= tol) return report;
      last = Error("lift residual " + std::to_string(report.residual) + " exceeds tolerance");
    } catch (const ConvergenceError& e) {
      last = Error(e.what());
    } catch (const SingularError& e) {
      last = Error(e.what());
    }
  }
  throw NotFoundError("no stage admits an exact lift" + (last ? std::string(": ") + last->what() : std::string()));
}

SupMetricCheck check_sup_metric_equality(const FiniteMetricSpace& points, const Tower& tower, std::size_t stage,
                                         const std::vector<AlgebraElement>& f, const std::vector<AlgebraElement>& g) {
  if (tower.kind() != TowerKind::Isometric) throw PreconditionError("sup-metric equality is asserted only for isometric towers");
  const auto n = static_cast<std::size_t>(points.size());
  if (f.size() != n || g.size() != n) throw PreconditionError("maps need one value per point of K");
  for (std::size_t p = 0; p < n; ++p)
    if (!f[p].algebra()->same_as(*tower.stage(stage)) || !g[p].algebra()->same_as(*tower.stage(stage)))
      throw PreconditionError("map values do not lie in the requested stage");

  auto sup_distance = [&](const LinearMap& iota) {
    double worst = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      worst = std::max(worst, iota.target()->norm(iota.coefficients() * (f[p].coords() - g[p].coords())));
    return worst;
  };
  SupMetricCheck out;
  out.lhs = sup_distance(tower.to_colimit(stage));
  out.rhs = std::numeric_limits<double>::infinity();
  for (std::size_t j = stage; j < tower.size(); ++j) out.rhs = std::min(out.rhs, sup_distance(tower.map(stage, j)));
  out.gap = std::abs(out.lhs - out.rhs);
  return out;
}

}  // namespace stabilize
