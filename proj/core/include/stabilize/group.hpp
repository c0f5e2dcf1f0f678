#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stabilize/algebra.hpp"

namespace stabilize {

/// Largest group order accepted; every defect is computed over all |G|^2 pairs.
inline constexpr int kMaxGroupOrder = 64;

/// A finite group given by its full multiplication table.
/// table[a][b] is the index of a*b; the identity and inverses are derived.
class FiniteGroup {
 public:
  explicit FiniteGroup(std::vector<std::vector<int>> table, std::string name = {});

  static FiniteGroup cyclic(int n);
  /// Closure of the generating permutations; element 0 is the identity and
  /// table[a][b] = index of (p_a o p_b).
  static FiniteGroup from_permutations(const std::vector<std::vector<int>>& generators, std::string name = {});
  static FiniteGroup symmetric3();
  static FiniteGroup symmetric4();
  static FiniteGroup dihedral4();
  static FiniteGroup quaternion8();

  int order() const { return static_cast<int>(table_.size()); }
  int multiply(int a, int b) const { return table_[a][b]; }
  int identity() const { return identity_; }
  int inverse(int g) const { return inverse_[g]; }
  const std::vector<std::vector<int>>& table() const { return table_; }
  const std::string& name() const { return name_; }
  /// Point permutations, present only for groups built from permutations.
  const std::optional<std::vector<std::vector<int>>>& permutations() const { return permutations_; }

  friend bool operator==(const FiniteGroup& a, const FiniteGroup& b) { return a.table_ == b.table_; }

 private:
  std::vector<std::vector<int>> table_;
  std::vector<int> inverse_;
  int identity_ = 0;
  std::string name_;
  std::optional<std::vector<std::vector<int>>> permutations_;
};

using GroupPtr = std::shared_ptr<const FiniteGroup>;

GroupPtr make_group(FiniteGroup group);

/// Complex group algebra C[G] with basis {delta_g}, convolution product,
/// star delta_g -> delta_{g^-1}, and the C*-norm of the left regular
/// representation.
class GroupAlgebra final : public Algebra {
 public:
  explicit GroupAlgebra(GroupPtr group);

  const GroupPtr& group() const { return group_; }
  /// sum_g a_g L_g, the left regular image of a.
  Matrix regular_image(const Coords& a) const;

  Index dimension() const override { return group_->order(); }
  std::optional<BasisTerm> basis_product(Index i, Index j) const override;
  Coords multiply(const Coords& a, const Coords& b) const override;
  Coords unit() const override;
  Coords star(const Coords& a) const override;
  double norm(const Coords& a) const override;
  Coords norm_subgradient(const Coords& a) const override;
  bool same_as(const Algebra& other) const override;
  std::string name() const override;

 private:
  GroupPtr group_;
};

using GroupAlgebraPtr = std::shared_ptr<const GroupAlgebra>;

struct GroupAlgebraData {
  GroupAlgebraPtr algebra;
  /// (1/|G|) sum_g delta_g (x) delta_{g^-1}.
  Diagonal diagonal;
};

GroupAlgebraData group_algebra(const GroupPtr& group);

}  // namespace stabilize
