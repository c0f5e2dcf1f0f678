#include "stabilize/linear_map.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "stabilize/errors.hpp"

namespace stabilize {

LinearMap::LinearMap(AlgebraPtr source, SemisimplePtr target, Matrix coefficients)
    : source_(std::move(source)), target_(std::move(target)), coefficients_(std::move(coefficients)) {
  if (!source_ || !target_) throw PreconditionError("linear map needs a source and a target");
  if (coefficients_.rows() != target_->dimension() || coefficients_.cols() != source_->dimension())
    throw PreconditionError("coefficient array does not match source/target dimensions");
}

LinearMap LinearMap::zero(AlgebraPtr source, SemisimplePtr target) {
  Matrix c = Matrix::Zero(target->dimension(), source->dimension());
  return {std::move(source), std::move(target), std::move(c)};
}

LinearMap LinearMap::from_images(AlgebraPtr source, std::span<const AlgebraElement> images) {
  if (images.empty() || static_cast<Index>(images.size()) != source->dimension())
    throw PreconditionError("need exactly one image per source basis element");
  const auto& target = images.front().algebra();
  Matrix c(target->dimension(), source->dimension());
  for (std::size_t j = 0; j < images.size(); ++j) {
    if (!images[j].algebra()->same_as(*target)) throw PreconditionError("images live in different algebras");
    c.col(static_cast<Index>(j)) = images[j].coords();
  }
  return {std::move(source), target, std::move(c)};
}

LinearMap LinearMap::identity(const SemisimplePtr& algebra) {
  return {algebra, algebra, Matrix::Identity(algebra->dimension(), algebra->dimension())};
}

AlgebraElement LinearMap::apply(const Coords& x) const {
  if (x.size() != source_->dimension()) throw PreconditionError("argument has wrong dimension");
  return AlgebraElement::from_coords(target_, coefficients_ * x);
}

AlgebraElement LinearMap::image(Index basis_index) const {
  return AlgebraElement::from_coords(target_, coefficients_.col(basis_index));
}

std::vector<AlgebraElement> LinearMap::images() const {
  std::vector<AlgebraElement> out;
  out.reserve(static_cast<std::size_t>(coefficients_.cols()));
  for (Index j = 0; j < coefficients_.cols(); ++j) out.push_back(image(j));
  return out;
}

LinearMap LinearMap::then(const LinearMap& next) const {
  if (!next.source_->same_as(*target_)) throw PreconditionError("cannot compose: target/source mismatch");
  return {source_, next.target_, next.coefficients_ * coefficients_};
}

void LinearMap::check_compatible(const LinearMap& other) const {
  if (!source_->same_as(*other.source_) || !target_->same_as(*other.target_))
    throw PreconditionError("linear maps have different source or target");
}

LinearMap& LinearMap::operator+=(const LinearMap& other) {
  check_compatible(other);
  coefficients_ += other.coefficients_;
  return *this;
}

LinearMap& LinearMap::operator-=(const LinearMap& other) {
  check_compatible(other);
  coefficients_ -= other.coefficients_;
  return *this;
}

LinearMap& LinearMap::operator*=(Complex scalar) {
  coefficients_ *= scalar;
  return *this;
}

double basis_distance(const LinearMap& a, const LinearMap& b) {
  const LinearMap diff = a - b;
  double worst = 0.0;
  for (Index j = 0; j < diff.coefficients().cols(); ++j)
    worst = std::max(worst, diff.target()->norm(diff.coefficients().col(j)));
  return worst;
}

namespace {

Coords random_point(const Algebra& algebra, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Coords x(algebra.dimension());
  for (Index i = 0; i < x.size(); ++i) {
    const double re = normal(rng);
    const double im = algebra.is_real_coordinate(i) ? 0.0 : normal(rng);
    x(i) = Complex{re, im};
  }
  return x;
}

void realify(const Algebra& algebra, Coords& x) {
  for (Index i = 0; i < x.size(); ++i)
    if (algebra.is_real_coordinate(i)) x(i) = x(i).real();
}

}  // namespace

NormInterval map_norm_estimate(const LinearMap& map, const NormEstimateOptions& options) {
  const Algebra& source = *map.source();
  const Algebra& target = *map.target();
  const Matrix& m = map.coefficients();

  NormInterval out;
  if (m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0) return out;

  Eigen::JacobiSVD<Matrix> svd(m);
  out.upper = svd.singularValues()(0) * std::sqrt(static_cast<double>(source.dimension()));

  auto ratio = [&](const Coords& x) {
    const double nx = source.norm(x);
    return nx > 0.0 ? target.norm(m * x) / nx : 0.0;
  };

  std::mt19937_64 rng(options.seed);
  std::vector<Coords> starts;
  starts.push_back(source.unit());
  for (int r = 0; r < options.restarts; ++r) starts.push_back(random_point(source, rng));

  for (auto x : starts) {
    double nx = source.norm(x);
    if (nx == 0.0) continue;
    x /= nx;
    double r = ratio(x);
    double step = 0.5;
    for (int it = 0; it < options.iterations && step > 1e-12; ++it) {
      const Coords y = m * x;
      if (target.norm(y) == 0.0) break;
      Coords grad = m.adjoint() * target.norm_subgradient(y) - r * source.norm_subgradient(x);
      realify(source, grad);
      const double gnorm = grad.norm();
      if (gnorm < 1e-14) break;
      Coords trial = x + (step / gnorm) * grad;
      const double nt = source.norm(trial);
      if (nt == 0.0) {
        step *= 0.5;
        continue;
      }
      trial /= nt;
      const double rt = ratio(trial);
      if (rt > r) {
        x = std::move(trial);
        r = rt;
        step = std::min(1.0, step * 1.5);
      } else {
        step *= 0.5;
      }
    }
    out.lower = std::max(out.lower, r);
  }
  out.lower = std::min(out.lower, out.upper);
  return out;
}

}  // namespace stabilize
