#include "stabilize/representation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "stabilize/errors.hpp"
#include "stabilize/stabilization.hpp"

namespace stabilize {

namespace {

void check_same_domain(const Representation& a, const Representation& b) {
  if (!(*a.group() == *b.group())) throw PreconditionError("representations are over different groups");
  if (!a.target()->same_as(*b.target())) throw PreconditionError("representations have different target algebras");
}

double unitarity_defect_of(const std::vector<AlgebraElement>& values, const SemisimplePtr& target) {
  const auto one = AlgebraElement::identity(target);
  double worst = 0.0;
  for (const auto& v : values) worst = std::max(worst, operator_norm(v.adjoint() * v - one));
  return worst;
}

double defect_of(const FiniteGroup& group, const std::vector<AlgebraElement>& values) {
  double worst = 0.0;
  for (int s = 0; s < group.order(); ++s)
    for (int t = 0; t < group.order(); ++t)
      worst = std::max(worst, operator_norm(values[group.multiply(s, t)] - values[s] * values[t]));
  return worst;
}

AlgebraElement random_element(const SemisimplePtr& algebra, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<Matrix> blocks;
  for (const auto& b : algebra->blocks()) {
    Matrix m(b.n, b.n);
    for (Index r = 0; r < b.n; ++r)
      for (Index c = 0; c < b.n; ++c)
        m(r, c) = Complex{normal(rng), b.field == Field::Real ? 0.0 : normal(rng)};
    blocks.push_back(std::move(m));
  }
  return {algebra, std::move(blocks)};
}

}  // namespace

Representation::Representation(GroupPtr group, SemisimplePtr target, std::vector<AlgebraElement> values,
                               std::optional<bool> unitary, std::optional<bool> exact)
    : group_(std::move(group)), target_(std::move(target)), values_(std::move(values)) {
  if (!group_ || !target_) throw PreconditionError("representation needs a group and a target");
  if (static_cast<int>(values_.size()) != group_->order())
    throw PreconditionError("representation needs exactly one value per group element");
  for (const auto& v : values_) {
    if (!v.algebra()->same_as(*target_)) throw PreconditionError("representation value lies in another algebra");
    if (!(v.smallest_singular_value() > 0.0)) throw SingularError("representation value is not invertible");
  }
  const bool is_unitary = unitarity_defect_of(values_, target_) <= kRepresentationTolerance;
  const bool is_exact = defect_of(*group_, values_) <= kRepresentationTolerance;
  if (unitary.value_or(false) && !is_unitary) throw PreconditionError("representation claimed unitary is not");
  if (exact.value_or(false) && !is_exact) throw PreconditionError("representation claimed exact is not");
  unitary_ = unitary.value_or(is_unitary);
  exact_ = exact.value_or(is_exact);
}

double rep_defect(const Representation& phi) { return defect_of(*phi.group(), phi.values()); }

double unitarity_defect(const Representation& phi) { return unitarity_defect_of(phi.values(), phi.target()); }

double rep_distance(const Representation& a, const Representation& b) {
  check_same_domain(a, b);
  double worst = 0.0;
  for (std::size_t g = 0; g < a.values().size(); ++g)
    worst = std::max(worst, operator_norm(a.values()[g] - b.values()[g]));
  return worst;
}

Representation perturb(const Representation& phi, double eta, std::uint64_t seed) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw PreconditionError("perturbation size must be finite and >= 0");
  if (eta == 0.0) return phi;
  std::mt19937_64 rng(seed);
  const auto& target = phi.target();
  auto values = phi.values();
  for (int g = 0; g < phi.group()->order(); ++g) {
    if (g == phi.group()->identity()) continue;
    auto noise = random_element(target, rng);
    if (phi.unitary()) noise = (noise - noise.adjoint()) * Complex{0.5};
    const double size = operator_norm(noise);
    if (size == 0.0) continue;
    noise *= Complex{eta / size};
    AlgebraElement moved = phi.unitary() ? polar_decompose(values[g] * (AlgebraElement::identity(target) + noise)).unitary
                                         : values[g] + noise;
    if (moved.smallest_singular_value() <= kSingularThreshold)
      throw SingularError("perturbation makes a value singular");
    values[g] = std::move(moved);
  }
  return Representation(phi.group(), target, std::move(values), phi.unitary() ? std::optional<bool>{} : false,
                        false);
}

LinearMap linearize(const Representation& phi) {
  auto algebra = group_algebra(phi.group()).algebra;
  return LinearMap::from_images(algebra, phi.values());
}

Representation restrict_to_group(const LinearMap& psi, const GroupPtr& group) {
  const auto* source = dynamic_cast<const GroupAlgebra*>(psi.source().get());
  if (source == nullptr || !(*source->group() == *group))
    throw PreconditionError("map is not defined on the group algebra of this group");
  auto values = psi.images();
  for (const auto& v : values)
    if (v.smallest_singular_value() <= kSingularThreshold) throw SingularError("image of a group element is singular");
  const double defect = defect_of(*group, values);
  if (defect > 1e-8) throw PreconditionError("map is not multiplicative on group elements");
  return Representation(group, psi.target(), std::move(values), std::nullopt, defect <= kRepresentationTolerance);
}

Representation regular_representation(const GroupPtr& group) {
  const int n = group->order();
  auto target = construct_algebra({{Field::Complex, n}});
  const GroupAlgebra algebra(group);
  std::vector<AlgebraElement> values;
  for (int g = 0; g < n; ++g) values.emplace_back(target, std::vector<Matrix>{algebra.regular_image(algebra.basis(g))});
  return {group, target, std::move(values)};
}

Representation trivial_representation(const GroupPtr& group, const SemisimplePtr& target) {
  std::vector<AlgebraElement> values(static_cast<std::size_t>(group->order()), AlgebraElement::identity(target));
  return {group, target, std::move(values)};
}

Representation character(int n, int k) {
  auto group = make_group(FiniteGroup::cyclic(n));
  auto target = construct_algebra({{Field::Complex, 1}});
  std::vector<AlgebraElement> values;
  for (int g = 0; g < n; ++g) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) * g / n;
    Matrix m(1, 1);
    m(0, 0) = std::polar(1.0, angle);
    if (2 * k * g % n == 0) m(0, 0) = std::round(m(0, 0).real());
    values.emplace_back(target, std::vector<Matrix>{m});
  }
  return {group, target, std::move(values)};
}

Representation sign_representation() { return character(2, 1); }

Representation rotation_representation(int n, Field field) {
  auto group = make_group(FiniteGroup::cyclic(n));
  auto target = construct_algebra({{field, 2}});
  std::vector<AlgebraElement> values;
  for (int g = 0; g < n; ++g) {
    const double angle = 2.0 * std::numbers::pi * g / n;
    Matrix m(2, 2);
    m << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    values.emplace_back(target, std::vector<Matrix>{m});
  }
  return {group, target, std::move(values)};
}

Representation permutation_representation(const GroupPtr& group, Field field) {
  if (!group->permutations()) throw PreconditionError("group was not built from permutations");
  const auto& perms = *group->permutations();
  const int d = static_cast<int>(perms.front().size());
  auto target = construct_algebra({{field, d}});
  std::vector<AlgebraElement> values;
  for (const auto& p : perms) {
    Matrix m = Matrix::Zero(d, d);
    for (int x = 0; x < d; ++x) m(p[x], x) = 1.0;
    values.emplace_back(target, std::vector<Matrix>{m});
  }
  return {group, target, std::move(values)};
}

Representation standard_representation(const GroupPtr& group, Field field) {
  const auto perm = permutation_representation(group, field);
  const Index d = perm.target()->blocks().front().n;
  if (d < 2) throw PreconditionError("standard representation needs at least two points");
  // Orthonormal basis of the sum-zero hyperplane: trailing columns of a QR of [1 | I].
  Eigen::MatrixXd seed = Eigen::MatrixXd::Zero(d, d);
  seed.col(0).setOnes();
  seed.rightCols(d - 1) = Eigen::MatrixXd::Identity(d, d).leftCols(d - 1);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(seed);
  const Eigen::MatrixXd q = Eigen::MatrixXd(qr.householderQ()).rightCols(d - 1);
  auto target = construct_algebra({{field, static_cast<int>(d - 1)}});
  std::vector<AlgebraElement> values;
  for (const auto& v : perm.values()) {
    const Eigen::MatrixXd m = q.transpose() * v.block(0).real() * q;
    values.emplace_back(target, std::vector<Matrix>{m.cast<Complex>()});
  }
  return {group, target, std::move(values)};
}

Representation pushforward(const Representation& phi, const LinearMap& morphism) {
  if (!morphism.source()->same_as(*phi.target())) throw PreconditionError("morphism source is not the target of phi");
  std::vector<AlgebraElement> values;
  for (const auto& v : phi.values()) values.push_back(morphism.apply(v.coords()));
  return {phi.group(), morphism.target(), std::move(values)};
}

Representation conjugate(const Representation& phi, const AlgebraElement& u) {
  const auto inv = u.inverse();
  std::vector<AlgebraElement> values;
  for (const auto& v : phi.values()) values.push_back(u * v * inv);
  return {phi.group(), phi.target(), std::move(values)};
}

}  // namespace stabilize
