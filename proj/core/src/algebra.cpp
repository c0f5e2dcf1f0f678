#include "stabilize/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "stabilize/errors.hpp"

namespace stabilize {

std::string to_string(Field field) { return field == Field::Real ? "real" : "complex"; }

Field field_from_string(const std::string& name) {
  if (name == "real") return Field::Real;
  if (name == "complex") return Field::Complex;
  throw PreconditionError("unknown field '" + name + "' (expected 'real' or 'complex')");
}

// ---------------------------------------------------------------------------
// Algebra

Coords Algebra::basis(Index i) const {
  Coords e = Coords::Zero(dimension());
  e(i) = 1.0;
  return e;
}

bool Algebra::is_real_coordinate(Index) const { return false; }

Coords Algebra::multiply(const Coords& a, const Coords& b) const {
  const Index d = dimension();
  Coords out = Coords::Zero(d);
  for (Index i = 0; i < d; ++i) {
    if (a(i) == Complex{}) continue;
    for (Index j = 0; j < d; ++j) {
      if (b(j) == Complex{}) continue;
      if (auto term = basis_product(i, j)) out(term->index) += a(i) * b(j) * term->coefficient;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// SemisimpleAlgebra

SemisimpleAlgebra::SemisimpleAlgebra(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw PreconditionError("an algebra needs at least one block");
  offsets_.reserve(blocks_.size());
  for (const auto& b : blocks_) {
    if (b.n < 1) throw PreconditionError("block dimension must be >= 1");
    offsets_.push_back(dimension_);
    dimension_ += static_cast<Index>(b.n) * b.n;
  }
}

SemisimplePtr construct_algebra(std::vector<Block> blocks) {
  return std::make_shared<const SemisimpleAlgebra>(std::move(blocks));
}

Index SemisimpleAlgebra::unit_index(std::size_t block, int row, int col) const {
  return offsets_.at(block) + static_cast<Index>(row) * blocks_[block].n + col;
}

SemisimpleAlgebra::Position SemisimpleAlgebra::locate(Index i) const {
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), i);
  const auto block = static_cast<std::size_t>(std::distance(offsets_.begin(), it) - 1);
  const Index local = i - offsets_[block];
  const int n = blocks_[block].n;
  return {block, static_cast<int>(local / n), static_cast<int>(local % n)};
}

std::vector<Matrix> SemisimpleAlgebra::to_blocks(const Coords& a) const {
  if (a.size() != dimension_) throw PreconditionError("coordinate vector has wrong length");
  std::vector<Matrix> out;
  out.reserve(blocks_.size());
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const int n = blocks_[k].n;
    Matrix m(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) m(r, c) = a(offsets_[k] + static_cast<Index>(r) * n + c);
    out.push_back(std::move(m));
  }
  return out;
}

Coords SemisimpleAlgebra::from_blocks(std::span<const Matrix> blocks) const {
  if (blocks.size() != blocks_.size()) throw PreconditionError("block count mismatch");
  Coords out(dimension_);
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const int n = blocks_[k].n;
    if (blocks[k].rows() != n || blocks[k].cols() != n) throw PreconditionError("block has wrong size");
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) out(offsets_[k] + static_cast<Index>(r) * n + c) = blocks[k](r, c);
  }
  return out;
}

std::optional<BasisTerm> SemisimpleAlgebra::basis_product(Index i, Index j) const {
  const auto a = locate(i);
  const auto b = locate(j);
  if (a.block != b.block || a.col != b.row) return std::nullopt;
  return BasisTerm{unit_index(a.block, a.row, b.col), Complex{1.0, 0.0}};
}

Coords SemisimpleAlgebra::multiply(const Coords& a, const Coords& b) const {
  auto x = to_blocks(a);
  const auto y = to_blocks(b);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = (x[k] * y[k]).eval();
  return from_blocks(x);
}

Coords SemisimpleAlgebra::unit() const {
  std::vector<Matrix> blocks;
  for (const auto& b : blocks_) blocks.push_back(Matrix::Identity(b.n, b.n));
  return from_blocks(blocks);
}

Coords SemisimpleAlgebra::star(const Coords& a) const {
  auto x = to_blocks(a);
  for (auto& m : x) m = m.adjoint().eval();
  return from_blocks(x);
}

double spectral_norm(const Matrix& m, bool real) {
  if (m.size() == 0) return 0.0;
  if (real) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.real());
    return svd.singularValues()(0);
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double SemisimpleAlgebra::norm(const Coords& a) const {
  const auto x = to_blocks(a);
  double best = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k)
    best = std::max(best, spectral_norm(x[k], blocks_[k].field == Field::Real));
  return best;
}

Coords SemisimpleAlgebra::norm_subgradient(const Coords& a) const {
  const auto x = to_blocks(a);
  std::size_t arg = 0;
  double best = -1.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double s = spectral_norm(x[k], blocks_[k].field == Field::Real);
    if (s > best) {
      best = s;
      arg = k;
    }
  }
  std::vector<Matrix> grad;
  for (const auto& b : blocks_) grad.push_back(Matrix::Zero(b.n, b.n));
  if (blocks_[arg].field == Field::Real) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x[arg].real(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    grad[arg] = (svd.matrixU().col(0) * svd.matrixV().col(0).transpose()).cast<Complex>();
  } else {
    Eigen::JacobiSVD<Matrix> svd(x[arg], Eigen::ComputeThinU | Eigen::ComputeThinV);
    grad[arg] = svd.matrixU().col(0) * svd.matrixV().col(0).adjoint();
  }
  return from_blocks(grad);
}

bool SemisimpleAlgebra::is_real_coordinate(Index i) const {
  return blocks_[locate(i).block].field == Field::Real;
}

bool SemisimpleAlgebra::same_as(const Algebra& other) const {
  const auto* o = dynamic_cast<const SemisimpleAlgebra*>(&other);
  return o != nullptr && o->blocks_ == blocks_;
}

std::string SemisimpleAlgebra::name() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    if (k) os << " + ";
    const char f = blocks_[k].field == Field::Real ? 'R' : 'C';
    if (blocks_[k].n == 1)
      os << f;
    else
      os << 'M' << blocks_[k].n << '(' << f << ')';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// AlgebraElement

AlgebraElement::AlgebraElement(SemisimplePtr algebra, std::vector<Matrix> blocks)
    : algebra_(std::move(algebra)), blocks_(std::move(blocks)) {
  if (!algebra_) throw PreconditionError("element without algebra");
  const auto& layout = algebra_->blocks();
  if (blocks_.size() != layout.size()) throw PreconditionError("element has wrong block count");
  for (std::size_t k = 0; k < layout.size(); ++k) {
    if (blocks_[k].rows() != layout[k].n || blocks_[k].cols() != layout[k].n)
      throw PreconditionError("element block has wrong size");
    if (layout[k].field == Field::Real && (blocks_[k].imag().array() != 0.0).any())
      throw PreconditionError("real block carries a non-zero imaginary part");
  }
}

AlgebraElement AlgebraElement::zero(SemisimplePtr algebra) {
  std::vector<Matrix> blocks;
  for (const auto& b : algebra->blocks()) blocks.push_back(Matrix::Zero(b.n, b.n));
  return {std::move(algebra), std::move(blocks)};
}

AlgebraElement AlgebraElement::identity(SemisimplePtr algebra) {
  std::vector<Matrix> blocks;
  for (const auto& b : algebra->blocks()) blocks.push_back(Matrix::Identity(b.n, b.n));
  return {std::move(algebra), std::move(blocks)};
}

AlgebraElement AlgebraElement::matrix_unit(SemisimplePtr algebra, std::size_t block, int row, int col) {
  auto e = zero(algebra);
  if (block >= e.blocks_.size() || row < 0 || col < 0 || row >= algebra->blocks()[block].n ||
      col >= algebra->blocks()[block].n)
    throw PreconditionError("matrix unit out of range");
  e.blocks_[block](row, col) = 1.0;
  return e;
}

AlgebraElement AlgebraElement::from_coords(SemisimplePtr algebra, const Coords& coords) {
  auto blocks = algebra->to_blocks(coords);
  const auto& layout = algebra->blocks();
  for (std::size_t k = 0; k < layout.size(); ++k) {
    if (layout[k].field != Field::Real) continue;
    const double scale = 1.0 + blocks[k].real().cwiseAbs().maxCoeff();
    if (blocks[k].imag().cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw PreconditionError("coordinates carry an imaginary part on a real block");
    blocks[k] = blocks[k].real().cast<Complex>();
  }
  return {std::move(algebra), std::move(blocks)};
}

Coords AlgebraElement::coords() const { return algebra_->from_blocks(blocks_); }

AlgebraElement AlgebraElement::adjoint() const {
  auto out = *this;
  for (auto& m : out.blocks_) m = m.adjoint().eval();
  return out;
}

double AlgebraElement::smallest_singular_value() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    if (algebra_->blocks()[k].field == Field::Real) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(blocks_[k].real());
      best = std::min(best, svd.singularValues().tail(1)(0));
    } else {
      Eigen::JacobiSVD<Matrix> svd(blocks_[k]);
      best = std::min(best, svd.singularValues().tail(1)(0));
    }
  }
  return best;
}

AlgebraElement AlgebraElement::inverse() const {
  const double smin = smallest_singular_value();
  const double smax = operator_norm(*this);
  if (!(smin > 1e-14 * std::max(1.0, smax))) throw SingularError("element is not invertible");
  auto out = *this;
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    if (algebra_->blocks()[k].field == Field::Real)
      out.blocks_[k] = blocks_[k].real().inverse().cast<Complex>();
    else
      out.blocks_[k] = blocks_[k].inverse();
  }
  return out;
}

void AlgebraElement::check_compatible(const AlgebraElement& other) const {
  if (algebra_ != other.algebra_ && !algebra_->same_as(*other.algebra_))
    throw PreconditionError("elements belong to different algebras");
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& other) {
  check_compatible(other);
  for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] += other.blocks_[k];
  return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& other) {
  check_compatible(other);
  for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] -= other.blocks_[k];
  return *this;
}

AlgebraElement& AlgebraElement::operator*=(Complex scalar) {
  const auto& layout = algebra_->blocks();
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    if (layout[k].field == Field::Real && scalar.imag() != 0.0)
      throw PreconditionError("complex scalar applied to a real block");
    blocks_[k] *= scalar;
  }
  return *this;
}

AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
  a.check_compatible(b);
  auto out = a;
  for (std::size_t k = 0; k < out.blocks_.size(); ++k) out.blocks_[k] = (a.blocks_[k] * b.blocks_[k]).eval();
  return out;
}

double operator_norm(const AlgebraElement& a) {
  double best = 0.0;
  const auto& layout = a.algebra()->blocks();
  for (std::size_t k = 0; k < layout.size(); ++k)
    best = std::max(best, spectral_norm(a.block(k), layout[k].field == Field::Real));
  return best;
}

// ---------------------------------------------------------------------------
// Diagonal

Diagonal::Diagonal(AlgebraPtr algebra, std::vector<DiagonalTerm> terms)
    : algebra_(std::move(algebra)), terms_(std::move(terms)) {
  if (!algebra_) throw PreconditionError("diagonal without algebra");
  for (const auto& t : terms_)
    if (t.left.size() != algebra_->dimension() || t.right.size() != algebra_->dimension())
      throw PreconditionError("diagonal term has wrong length");
}

Matrix Diagonal::tensor(const std::vector<DiagonalTerm>& terms) const {
  const Index d = algebra_->dimension();
  Matrix t = Matrix::Zero(d, d);
  for (const auto& term : terms) t += term.left * term.right.transpose();
  return t;
}

Coords Diagonal::multiplication_image() const {
  Coords sum = Coords::Zero(algebra_->dimension());
  for (const auto& t : terms_) sum += algebra_->multiply(t.left, t.right);
  return sum;
}

double Diagonal::unit_residual() const {
  return (multiplication_image() - algebra_->unit()).cwiseAbs().maxCoeff();
}

double Diagonal::commutation_residual() const {
  const Index d = algebra_->dimension();
  double worst = 0.0;
  for (Index i = 0; i < d; ++i) {
    const Coords b = algebra_->basis(i);
    Matrix diff = Matrix::Zero(d, d);
    for (const auto& t : terms_) {
      diff += algebra_->multiply(b, t.left) * t.right.transpose();
      diff -= t.left * algebra_->multiply(t.right, b).transpose();
    }
    worst = std::max(worst, diff.cwiseAbs().maxCoeff());
  }
  return worst;
}

double Diagonal::self_adjoint_residual() const {
  std::vector<DiagonalTerm> starred;
  starred.reserve(terms_.size());
  for (const auto& t : terms_) starred.push_back({algebra_->star(t.left), algebra_->star(t.right)});
  return (tensor(terms_) - tensor(starred)).cwiseAbs().maxCoeff();
}

bool Diagonal::is_self_adjoint(double tol) const { return self_adjoint_residual() <= tol; }

Diagonal Diagonal::symmetrized() const {
  std::vector<DiagonalTerm> terms;
  terms.reserve(2 * terms_.size());
  for (const auto& t : terms_) terms.push_back({0.5 * t.left, t.right});
  for (const auto& t : terms_) terms.push_back({0.5 * algebra_->star(t.left), algebra_->star(t.right)});
  return {algebra_, std::move(terms)};
}

Diagonal diagonal(const SemisimplePtr& algebra) {
  std::vector<DiagonalTerm> terms;
  for (std::size_t k = 0; k < algebra->block_count(); ++k) {
    const int n = algebra->blocks()[k].n;
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        DiagonalTerm t{Coords::Zero(algebra->dimension()), Coords::Zero(algebra->dimension())};
        t.left(algebra->unit_index(k, r, c)) = 1.0 / n;
        t.right(algebra->unit_index(k, c, r)) = 1.0;
        terms.push_back(std::move(t));
      }
    }
  }
  return {algebra, std::move(terms)};
}

}  // namespace stabilize
