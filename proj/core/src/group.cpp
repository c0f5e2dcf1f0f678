#include "stabilize/group.hpp"

#include <map>
#include <queue>

#include "stabilize/errors.hpp"

namespace stabilize {

FiniteGroup::FiniteGroup(std::vector<std::vector<int>> table, std::string name)
    : table_(std::move(table)), name_(std::move(name)) {
  const int n = order();
  if (n < 1) throw PreconditionError("group table is empty");
  if (n > kMaxGroupOrder) throw PreconditionError("group order exceeds " + std::to_string(kMaxGroupOrder));
  for (const auto& row : table_)
    if (static_cast<int>(row.size()) != n) throw PreconditionError("group table is not square");

  // Latin square: every row and column is a permutation of 0..n-1.
  for (int a = 0; a < n; ++a) {
    std::vector<bool> row_seen(n, false), col_seen(n, false);
    for (int b = 0; b < n; ++b) {
      const int r = table_[a][b];
      const int c = table_[b][a];
      if (r < 0 || r >= n || c < 0 || c >= n) throw PreconditionError("group table entry out of range");
      if (row_seen[r] || col_seen[c]) throw PreconditionError("group table is not a Latin square");
      row_seen[r] = col_seen[c] = true;
    }
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (table_[table_[a][b]][c] != table_[a][table_[b][c]])
          throw PreconditionError("group table is not associative");

  identity_ = -1;
  for (int e = 0; e < n && identity_ < 0; ++e) {
    bool ok = true;
    for (int a = 0; a < n && ok; ++a) ok = table_[e][a] == a && table_[a][e] == a;
    if (ok) identity_ = e;
  }
  if (identity_ < 0) throw PreconditionError("group table has no identity");

  inverse_.assign(n, -1);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (table_[a][b] == identity_) inverse_[a] = b;
  for (int a = 0; a < n; ++a)
    if (inverse_[a] < 0 || table_[inverse_[a]][a] != identity_)
      throw PreconditionError("group table has inconsistent inverses");
}

GroupPtr make_group(FiniteGroup group) { return std::make_shared<const FiniteGroup>(std::move(group)); }

FiniteGroup FiniteGroup::cyclic(int n) {
  if (n < 1) throw PreconditionError("cyclic group order must be >= 1");
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t[a][b] = (a + b) % n;
  return FiniteGroup(std::move(t), n == 1 ? "trivial" : "Z/" + std::to_string(n));
}

FiniteGroup FiniteGroup::from_permutations(const std::vector<std::vector<int>>& generators, std::string name) {
  if (generators.empty()) throw PreconditionError("need at least one generating permutation");
  const std::size_t degree = generators.front().size();
  for (const auto& g : generators) {
    if (g.size() != degree) throw PreconditionError("generators act on different point sets");
    std::vector<bool> seen(degree, false);
    for (int x : g) {
      if (x < 0 || static_cast<std::size_t>(x) >= degree || seen[x])
        throw PreconditionError("generator is not a permutation");
      seen[x] = true;
    }
  }
  using Perm = std::vector<int>;
  auto compose = [](const Perm& p, const Perm& q) {  // (p o q)(x) = p(q(x))
    Perm r(q.size());
    for (std::size_t x = 0; x < q.size(); ++x) r[x] = p[q[x]];
    return r;
  };

  Perm id(degree);
  for (std::size_t x = 0; x < degree; ++x) id[x] = static_cast<int>(x);
  std::vector<Perm> elements{id};
  std::map<Perm, int> index{{id, 0}};
  std::queue<Perm> frontier;
  frontier.push(id);
  while (!frontier.empty()) {
    const Perm p = frontier.front();
    frontier.pop();
    for (const auto& g : generators) {
      Perm q = compose(g, p);
      if (index.contains(q)) continue;
      if (static_cast<int>(elements.size()) >= kMaxGroupOrder)
        throw PreconditionError("generated group exceeds order " + std::to_string(kMaxGroupOrder));
      index.emplace(q, static_cast<int>(elements.size()));
      elements.push_back(q);
      frontier.push(std::move(q));
    }
  }

  const int n = static_cast<int>(elements.size());
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t[a][b] = index.at(compose(elements[a], elements[b]));
  FiniteGroup group(std::move(t), std::move(name));
  group.permutations_ = std::move(elements);
  return group;
}

FiniteGroup FiniteGroup::symmetric3() { return from_permutations({{1, 0, 2}, {1, 2, 0}}, "S3"); }

FiniteGroup FiniteGroup::symmetric4() { return from_permutations({{1, 0, 2, 3}, {1, 2, 3, 0}}, "S4"); }

FiniteGroup FiniteGroup::dihedral4() { return from_permutations({{1, 2, 3, 0}, {0, 3, 2, 1}}, "D4"); }

FiniteGroup FiniteGroup::quaternion8() {
  // Elements s*u with s in {+1,-1} and u in {1,i,j,k}; index = 4*(s<0) + u.
  static constexpr int unit_product[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  static constexpr int unit_sign[4][4] = {{1, 1, 1, 1}, {1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, -1, -1}};
  std::vector<std::vector<int>> t(8, std::vector<int>(8));
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      const int ua = a % 4, ub = b % 4;
      int sign = (a < 4 ? 1 : -1) * (b < 4 ? 1 : -1) * unit_sign[ua][ub];
      t[a][b] = (sign < 0 ? 4 : 0) + unit_product[ua][ub];
    }
  return FiniteGroup(std::move(t), "Q8");
}

// ---------------------------------------------------------------------------
// GroupAlgebra

GroupAlgebra::GroupAlgebra(GroupPtr group) : group_(std::move(group)) {
  if (!group_) throw PreconditionError("group algebra needs a group");
}

std::optional<BasisTerm> GroupAlgebra::basis_product(Index i, Index j) const {
  return BasisTerm{group_->multiply(static_cast<int>(i), static_cast<int>(j)), Complex{1.0, 0.0}};
}

Coords GroupAlgebra::multiply(const Coords& a, const Coords& b) const {
  const int n = group_->order();
  Coords out = Coords::Zero(n);
  for (int g = 0; g < n; ++g) {
    if (a(g) == Complex{}) continue;
    for (int h = 0; h < n; ++h) out(group_->multiply(g, h)) += a(g) * b(h);
  }
  return out;
}

Coords GroupAlgebra::unit() const { return basis(group_->identity()); }

Coords GroupAlgebra::star(const Coords& a) const {
  Coords out(a.size());
  for (int g = 0; g < group_->order(); ++g) out(group_->inverse(g)) = std::conj(a(g));
  return out;
}

Matrix GroupAlgebra::regular_image(const Coords& a) const {
  const int n = group_->order();
  Matrix m = Matrix::Zero(n, n);
  for (int g = 0; g < n; ++g)
    for (int h = 0; h < n; ++h) m(group_->multiply(g, h), h) += a(g);
  return m;
}

double GroupAlgebra::norm(const Coords& a) const { return spectral_norm(regular_image(a)); }

Coords GroupAlgebra::norm_subgradient(const Coords& a) const {
  const int n = group_->order();
  Eigen::JacobiSVD<Matrix> svd(regular_image(a), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXcd u = svd.matrixU().col(0);
  const Eigen::VectorXcd v = svd.matrixV().col(0);
  // d/dh sigma_max = Re(u^* L(h) v); L_g maps h -> gh.
  Coords grad = Coords::Zero(n);
  for (int g = 0; g < n; ++g) {
    Complex s{};
    for (int h = 0; h < n; ++h) s += std::conj(u(group_->multiply(g, h))) * v(h);
    grad(g) = std::conj(s);
  }
  return grad;
}

bool GroupAlgebra::same_as(const Algebra& other) const {
  const auto* o = dynamic_cast<const GroupAlgebra*>(&other);
  return o != nullptr && *o->group_ == *group_;
}

std::string GroupAlgebra::name() const {
  return "C[" + (group_->name().empty() ? "G" + std::to_string(group_->order()) : group_->name()) + "]";
}

GroupAlgebraData group_algebra(const GroupPtr& group) {
  auto algebra = std::make_shared<const GroupAlgebra>(group);
  const int n = group->order();
  std::vector<DiagonalTerm> terms;
  terms.reserve(n);
  for (int g = 0; g < n; ++g)
    terms.push_back({algebra->basis(g) / static_cast<double>(n), algebra->basis(group->inverse(g))});
  return {algebra, Diagonal(algebra, std::move(terms))};
}

}  // namespace stabilize
