#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stabilize/algebra.hpp"
#include "stabilize/group.hpp"
#include "stabilize/linear_map.hpp"

namespace stabilize {

/// Tolerance behind the unitary/exact flags.
inline constexpr double kRepresentationTolerance = 1e-10;
/// Perturbed values whose smallest singular value falls below this are rejected.
inline constexpr double kSingularThreshold = 1e-8;

/// A table g -> phi(g) of invertible elements of a matrix-block algebra.
/// Flags left unset are inferred; flags set to true are verified.
class Representation {
 public:
  Representation(GroupPtr group, SemisimplePtr target, std::vector<AlgebraElement> values,
                 std::optional<bool> unitary = std::nullopt, std::optional<bool> exact = std::nullopt);

  const GroupPtr& group() const { return group_; }
  const SemisimplePtr& target() const { return target_; }
  const std::vector<AlgebraElement>& values() const { return values_; }
  const AlgebraElement& operator()(int g) const { return values_.at(static_cast<std::size_t>(g)); }
  bool unitary() const { return unitary_; }
  bool exact() const { return exact_; }

 private:
  GroupPtr group_;
  SemisimplePtr target_;
  std::vector<AlgebraElement> values_;
  bool unitary_ = false;
  bool exact_ = false;
};

/// max over (s,t) of ||phi(st) - phi(s)phi(t)||.
double rep_defect(const Representation& phi);

/// max over g of ||phi(g)^* phi(g) - 1||.
double unitarity_defect(const Representation& phi);

/// max over g of ||phi1(g) - phi2(g)||.
double rep_distance(const Representation& a, const Representation& b);

/// Moves every non-identity value by a seeded random displacement of norm eta.
/// Unitary inputs move along a skew-Hermitian direction and are re-projected
/// onto the unitaries, so the displacement stays <= eta.
Representation perturb(const Representation& phi, double eta, std::uint64_t seed);

/// delta_g -> phi(g), extended linearly over the group algebra.
LinearMap linearize(const Representation& phi);

/// g -> psi(delta_g); psi must be multiplicative on basis pairs within 1e-8.
Representation restrict_to_group(const LinearMap& psi, const GroupPtr& group);

/// Left regular representation in M_|G|(C).
Representation regular_representation(const GroupPtr& group);
/// Constant map to the unit.
Representation trivial_representation(const GroupPtr& group, const SemisimplePtr& target);
/// g -> exp(2 pi i k g / n) on Z/n, into C.
Representation character(int n, int k);
/// The non-trivial character of Z/2.
Representation sign_representation();
/// g -> rotation by 2 pi g / n on Z/n, into M_2 over the given field.
Representation rotation_representation(int n, Field field = Field::Complex);
/// Permutation matrices of a group built from permutations.
Representation permutation_representation(const GroupPtr& group, Field field = Field::Complex);
/// Permutation representation restricted to the sum-zero hyperplane (real orthonormal basis).
Representation standard_representation(const GroupPtr& group, Field field = Field::Complex);

/// g -> morphism(phi(g)); the morphism's source must be phi's target.
Representation pushforward(const Representation& phi, const LinearMap& morphism);
/// g -> u phi(g) u^-1.
Representation conjugate(const Representation& phi, const AlgebraElement& u);

}  // namespace stabilize
