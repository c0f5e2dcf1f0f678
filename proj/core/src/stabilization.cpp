#include "stabilize/stabilization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace stabilize {

namespace {

/// Rounding floor of the basis defect; below it iteration stops once progress stalls.
constexpr double kFixedPointDefect = 1e-13;

/// Columns of the result are a * (columns of coords).
Matrix left_multiply_columns(const SemisimpleAlgebra& algebra, const Coords& a, const Matrix& columns) {
  const auto left = algebra.to_blocks(a);
  Matrix out(columns.rows(), columns.cols());
  for (Index j = 0; j < columns.cols(); ++j) {
    auto right = algebra.to_blocks(columns.col(j));
    for (std::size_t k = 0; k < right.size(); ++k) right[k] = (left[k] * right[k]).eval();
    out.col(j) = algebra.from_blocks(right);
  }
  return out;
}

/// Column (i * d + j) holds the target coordinates of T(b_i b_j) - T(b_i) T(b_j).
Matrix defect_tensor(const LinearMap& map) {
  const Algebra& source = *map.source();
  const SemisimpleAlgebra& target = *map.target();
  const Matrix& m = map.coefficients();
  const Index d = source.dimension();
  Matrix out(target.dimension(), d * d);
  for (Index i = 0; i < d; ++i) {
    const Matrix products = left_multiply_columns(target, m.col(i), m);
    for (Index j = 0; j < d; ++j) {
      Coords image = -products.col(j);
      if (auto term = source.basis_product(i, j)) image += term->coefficient * m.col(term->index);
      out.col(i * d + j) = image;
    }
  }
  return out;
}

double unit_defect_of(const LinearMap& map) {
  const Coords image = map.coefficients() * map.source()->unit();
  return map.target()->norm(image - map.target()->unit());
}

}  // namespace

double basis_defect(const LinearMap& map) {
  const Matrix tensor = defect_tensor(map);
  double worst = 0.0;
  for (Index c = 0; c < tensor.cols(); ++c) worst = std::max(worst, map.target()->norm(tensor.col(c)));
  return worst;
}

BilinearDefect bilinear_defect(const LinearMap& map, const NormEstimateOptions& options) {
  const Algebra& source = *map.source();
  const SemisimpleAlgebra& target = *map.target();
  const Matrix tensor = defect_tensor(map);
  const Index d = source.dimension();

  BilinearDefect out;
  out.unit_defect = unit_defect_of(map);
  for (Index c = 0; c < tensor.cols(); ++c) out.basis_defect = std::max(out.basis_defect, target.norm(tensor.col(c)));
  if (out.basis_defect == 0.0) return out;

  // Coordinates satisfy |x|_2 <= sqrt(d) ||x|| in both supported source algebras.
  Eigen::JacobiSVD<Matrix> svd(tensor);
  out.norm_interval.upper = svd.singularValues()(0) * static_cast<double>(d);

  auto value = [&](const Coords& x, const Coords& y) {
    const double nx = source.norm(x), ny = source.norm(y);
    if (nx == 0.0 || ny == 0.0) return 0.0;
    Coords xy(d * d);
    for (Index i = 0; i < d; ++i) xy.segment(i * d, d) = x(i) * y;
    return target.norm(tensor * xy) / (nx * ny);
  };

  // Basis pairs, then seeded random pairs improved by alternating sampling.
  double best = 0.0;
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) best = std::max(best, value(source.basis(i), source.basis(j)));
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  auto sample = [&] {
    Coords x(d);
    for (Index i = 0; i < d; ++i) x(i) = Complex{normal(rng), source.is_real_coordinate(i) ? 0.0 : normal(rng)};
    return x;
  };
  for (int r = 0; r < options.restarts; ++r) {
    Coords x = sample(), y = sample();
    double current = value(x, y);
    for (int it = 0; it < options.iterations / 10; ++it) {
      Coords step = sample() * 0.1;
      Coords trial_x = x + step;
      if (double v = value(trial_x, y); v > current) {
        x = trial_x;
        current = v;
      }
      Coords trial_y = y + sample() * 0.1;
      if (double v = value(x, trial_y); v > current) {
        y = trial_y;
        current = v;
      }
    }
    best = std::max(best, current);
  }
  out.norm_interval.lower = std::min(best, out.norm_interval.upper);
  return out;
}

ConvergenceOrder convergence_order(const std::vector<double>& defects, double threshold, double floor,
                                   double min_order) {
  ConvergenceOrder out;
  std::size_t start = 0;
  while (start < defects.size() && !(defects[start] < threshold)) ++start;
  std::size_t end = start;
  while (end < defects.size() && defects[end] > floor) ++end;
  // [start, end) are the usable defects; a landing at or below the floor is rounding, not contraction.
  for (std::size_t n = start; n + 1 < end; ++n)
    out.constant = std::max(out.constant, defects[n + 1] / (defects[n] * defects[n]));
  double order = std::numeric_limits<double>::infinity();
  for (std::size_t n = start; n + 2 < end; ++n) {
    const double earlier = std::log(defects[n + 1] / defects[n]);
    const double later = std::log(defects[n + 2] / defects[n + 1]);
    order = std::min(order, later / earlier);
    ++out.ratios;
  }
  out.order = out.ratios > 0 ? order : 0.0;
  out.quadratic = out.ratios == 0 || order >= min_order;
  return out;
}

CorrectionTrace newton_correct(const LinearMap& map, const Diagonal& diagonal, double tol, int max_iter,
                               const NewtonOptions& options) {
  if (!map.source()->same_as(*diagonal.algebra())) throw PreconditionError("diagonal belongs to another algebra");
  if (!(tol > 0.0)) throw PreconditionError("tolerance must be positive");
  if (max_iter < 1) throw PreconditionError("max_iter must be >= 1");

  const Algebra& source = *map.source();
  const SemisimpleAlgebra& target = *map.target();
  const Index d = source.dimension();

  // right_products[l] has columns e''_l b_j in source coordinates.
  std::vector<Matrix> right_products;
  for (const auto& term : diagonal.terms()) {
    Matrix p(d, d);
    for (Index j = 0; j < d; ++j) p.col(j) = source.multiply(term.right, source.basis(j));
    right_products.push_back(std::move(p));
  }

  CorrectionTrace trace;
  LinearMap current = map;
  if (options.record_iterates) trace.iterates.push_back(current);
  trace.defects.push_back(basis_defect(current));

  int streak = 0;
  auto finish = [&](bool converged) {
    trace.converged = converged;
    trace.unit_defect = unit_defect_of(current);
    trace.final_map = current;
  };

  while (true) {
    const double defect = trace.defects.back();
    if (!std::isfinite(defect)) {
      finish(false);
      throw ConvergenceError("correction diverged: defect is not finite", std::move(trace));
    }
    if (defect <= tol) {
      finish(true);
      return trace;
    }
    if (trace.iterations >= max_iter) {
      finish(false);
      throw ConvergenceError("correction did not reach tolerance within max_iter", std::move(trace));
    }

    const Matrix& m = current.coefficients();
    Matrix step = Matrix::Zero(m.rows(), m.cols());
    for (std::size_t l = 0; l < diagonal.terms().size(); ++l) {
      const auto& term = diagonal.terms()[l];
      const Coords left_image = m * term.left;
      const Coords right_image = m * term.right;
      const Matrix inner = m * right_products[l] - left_multiply_columns(target, right_image, m);
      step += left_multiply_columns(target, left_image, inner);
    }
    current = LinearMap(current.source(), current.target(), m + step);
    if (options.retraction) current = options.retraction(current);
    ++trace.iterations;
    if (options.record_iterates) trace.iterates.push_back(current);

    const double next = basis_defect(current);
    streak = next > defect ? streak + 1 : 0;
    trace.defects.push_back(next);
    // Below the rounding floor a step that fails to halve the defect marks the fixed point.
    if (defect <= kFixedPointDefect && !(next < 0.5 * defect)) {
      finish(true);
      return trace;
    }
    if (streak >= kDivergenceStreak) {
      finish(false);
      throw ConvergenceError("correction diverged: defect increased on consecutive iterations", std::move(trace));
    }
  }
}

LinearMap self_adjoint_part(const LinearMap& map) {
  const Algebra& source = *map.source();
  const SemisimpleAlgebra& target = *map.target();
  const Matrix& m = map.coefficients();
  Matrix adjoint(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j) adjoint.col(j) = target.star(m * source.star(source.basis(j)));
  return {map.source(), map.target(), 0.5 * (m + adjoint)};
}

PolarDecomposition polar_decompose(const AlgebraElement& x) {
  const auto& algebra = x.algebra();
  std::vector<Matrix> unitary, positive;
  for (std::size_t k = 0; k < x.blocks().size(); ++k) {
    const Matrix& block = x.block(k);
    Eigen::VectorXd sigma;
    Matrix u, v;
    if (algebra->blocks()[k].field == Field::Real) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(block.real(), Eigen::ComputeFullU | Eigen::ComputeFullV);
      sigma = svd.singularValues();
      u = svd.matrixU().cast<Complex>();
      v = svd.matrixV().cast<Complex>();
    } else {
      Eigen::JacobiSVD<Matrix> svd(block, Eigen::ComputeFullU | Eigen::ComputeFullV);
      sigma = svd.singularValues();
      u = svd.matrixU();
      v = svd.matrixV();
    }
    if (sigma(sigma.size() - 1) <= 1e-14 * std::max(1.0, sigma(0)))
      throw SingularError("polar decomposition of a singular element");
    unitary.push_back(u * v.adjoint());
    positive.push_back(v * sigma.cast<Complex>().asDiagonal() * v.adjoint());
  }
  return {AlgebraElement::from_coords(algebra, algebra->from_blocks(unitary)),
          AlgebraElement::from_coords(algebra, algebra->from_blocks(positive))};
}

HaarResult haar_correct(const Representation& phi, const HaarOptions& options) {
  const double initial = rep_defect(phi);
  if (initial <= options.tol) {
    CorrectionTrace trace;
    trace.defects = {initial};
    trace.converged = true;
    trace.final_map = linearize(phi);
    trace.unit_defect = operator_norm(phi(phi.group()->identity()) - AlgebraElement::identity(phi.target()));
    if (options.record_iterates) trace.iterates.push_back(*trace.final_map);
    return {phi, std::move(trace), initial, 0.0};
  }
  if (initial > options.admissible_defect)
    throw PreconditionError("initial defect " + std::to_string(initial) + " exceeds the admissible threshold " +
                            std::to_string(options.admissible_defect));

  const auto data = group_algebra(phi.group());
  LinearMap start = linearize(phi);
  NewtonOptions newton;
  newton.record_iterates = options.record_iterates;
  if (phi.unitary()) {
    start = self_adjoint_part(start);
    newton.retraction = [](const LinearMap& m) {
      const LinearMap sa = self_adjoint_part(m);
      std::vector<AlgebraElement> images;
      for (const auto& image : sa.images()) images.push_back(polar_decompose(image).unitary);
      return LinearMap::from_images(sa.source(), images);
    };
  }

  CorrectionTrace trace = newton_correct(start, data.diagonal, options.tol, options.max_iter, newton);
  Representation corrected = restrict_to_group(*trace.final_map, phi.group());
  trace.distance_to_input = rep_distance(corrected, phi);
  const double ratio = trace.distance_to_input / initial;
  return {std::move(corrected), std::move(trace), initial, ratio};
}

AlgebraElement average_intertwiner(const Representation& phi1, const Representation& phi2) {
  if (!(*phi1.group() == *phi2.group())) throw PreconditionError("representations are over different groups");
  if (!phi1.target()->same_as(*phi2.target())) throw PreconditionError("representations have different targets");
  if (!phi1.exact() || !phi2.exact()) throw PreconditionError("intertwiner averaging needs exact representations");
  auto u = AlgebraElement::zero(phi1.target());
  for (int t = 0; t < phi1.group()->order(); ++t) u += phi2(t) * phi1(t).inverse();
  u *= Complex{1.0 / phi1.group()->order()};
  if (u.smallest_singular_value() <= 1e-8 * std::max(1.0, operator_norm(u)))
    throw SingularError("averaged intertwiner is singular; the representations are not conjugate");
  return u;
}

AlgebraElement unitarize_conjugation(const Representation& phi1, const Representation& phi2) {
  if (!phi1.unitary() || !phi2.unitary()) throw PreconditionError("unitary conjugation needs unitary representations");
  return polar_decompose(average_intertwiner(phi1, phi2)).unitary;
}

double intertwining_residual(const Representation& phi1, const Representation& phi2, const AlgebraElement& u) {
  double worst = 0.0;
  for (int g = 0; g < phi1.group()->order(); ++g)
    worst = std::max(worst, operator_norm(phi2(g) * u - u * phi1(g)));
  return worst;
}

}  // namespace stabilize
