#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace stabilize {

using Complex = std::complex<double>;
using Coords = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

/// Default tolerance for exact algebraic identities.
inline constexpr double kAlgebraicTolerance = 1e-12;
/// Default tolerance for quantities produced by an optimizer.
inline constexpr double kOptimizedTolerance = 1e-6;

enum class Field { Real, Complex };

std::string to_string(Field field);
Field field_from_string(const std::string& name);

/// One full matrix block M_n(field).
struct Block {
  Field field = Field::Complex;
  int n = 1;

  friend bool operator==(const Block&, const Block&) = default;
};

/// A basis element times a scalar; the product of two basis elements in
/// either supported algebra is always of this form (or zero).
struct BasisTerm {
  Index index = 0;
  Complex coefficient{1.0, 0.0};
};

/// A finite-dimensional unital *-algebra with a fixed linear basis and a
/// C*-norm. Elements are handled as coordinate vectors over that basis.
class Algebra {
 public:
  virtual ~Algebra() = default;

  virtual Index dimension() const = 0;
  virtual std::optional<BasisTerm> basis_product(Index i, Index j) const = 0;
  virtual Coords multiply(const Coords& a, const Coords& b) const;
  virtual Coords unit() const = 0;
  /// Conjugate-linear involution on coordinates.
  virtual Coords star(const Coords& a) const = 0;
  virtual double norm(const Coords& a) const = 0;
  /// A subgradient g of the norm at a: norm(a + h) >= norm(a) + Re<g, h>.
  virtual Coords norm_subgradient(const Coords& a) const = 0;
  /// Coordinates that must stay real (real matrix blocks).
  virtual bool is_real_coordinate(Index i) const;
  virtual bool same_as(const Algebra& other) const = 0;
  virtual std::string name() const = 0;

  Coords basis(Index i) const;
};

using AlgebraPtr = std::shared_ptr<const Algebra>;

/// Finite direct sum of real/complex matrix blocks with the blockwise
/// spectral norm. Basis: blocks in declaration order, matrix units row-major.
class SemisimpleAlgebra final : public Algebra {
 public:
  explicit SemisimpleAlgebra(std::vector<Block> blocks);

  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t block_count() const { return blocks_.size(); }
  Index offset(std::size_t block) const { return offsets_[block]; }
  /// Coordinate index of the matrix unit E_{row,col} in the given block.
  Index unit_index(std::size_t block, int row, int col) const;

  std::vector<Matrix> to_blocks(const Coords& a) const;
  Coords from_blocks(std::span<const Matrix> blocks) const;

  Index dimension() const override { return dimension_; }
  std::optional<BasisTerm> basis_product(Index i, Index j) const override;
  Coords multiply(const Coords& a, const Coords& b) const override;
  Coords unit() const override;
  Coords star(const Coords& a) const override;
  double norm(const Coords& a) const override;
  Coords norm_subgradient(const Coords& a) const override;
  bool is_real_coordinate(Index i) const override;
  bool same_as(const Algebra& other) const override;
  std::string name() const override;

 private:
  struct Position {
    std::size_t block;
    int row;
    int col;
  };
  Position locate(Index i) const;

  std::vector<Block> blocks_;
  std::vector<Index> offsets_;
  Index dimension_ = 0;
};

using SemisimplePtr = std::shared_ptr<const SemisimpleAlgebra>;

/// Validating constructor for shared algebra handles.
SemisimplePtr construct_algebra(std::vector<Block> blocks);

/// An element of a SemisimpleAlgebra: one complex matrix per block, with
/// exactly-zero imaginary parts on real blocks.
class AlgebraElement {
 public:
  AlgebraElement(SemisimplePtr algebra, std::vector<Matrix> blocks);

  static AlgebraElement zero(SemisimplePtr algebra);
  static AlgebraElement identity(SemisimplePtr algebra);
  static AlgebraElement matrix_unit(SemisimplePtr algebra, std::size_t block, int row, int col);
  /// Imaginary rounding noise below 1e-12 (relative) on real blocks is dropped;
  /// anything larger is rejected.
  static AlgebraElement from_coords(SemisimplePtr algebra, const Coords& coords);

  const SemisimplePtr& algebra() const { return algebra_; }
  const std::vector<Matrix>& blocks() const { return blocks_; }
  const Matrix& block(std::size_t i) const { return blocks_[i]; }
  Coords coords() const;

  AlgebraElement adjoint() const;
  AlgebraElement inverse() const;
  double smallest_singular_value() const;

  AlgebraElement& operator+=(const AlgebraElement& other);
  AlgebraElement& operator-=(const AlgebraElement& other);
  AlgebraElement& operator*=(Complex scalar);

  friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
  friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
  friend AlgebraElement operator*(AlgebraElement a, Complex s) { return a *= s; }
  friend AlgebraElement operator*(Complex s, AlgebraElement a) { return a *= s; }
  friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b);

 private:
  void check_compatible(const AlgebraElement& other) const;

  SemisimplePtr algebra_;
  std::vector<Matrix> blocks_;
};

/// Largest singular value over all blocks.
double operator_norm(const AlgebraElement& a);

/// Largest singular value of a single matrix; uses a real SVD when asked.
double spectral_norm(const Matrix& m, bool real = false);

/// One tensor term e'_l (x) e''_l of a diagonal, in coordinates.
struct DiagonalTerm {
  Coords left;
  Coords right;
};

/// A separability idempotent e = sum_l e'_l (x) e''_l in B (x) B.
class Diagonal {
 public:
  Diagonal(AlgebraPtr algebra, std::vector<DiagonalTerm> terms);

  const AlgebraPtr& algebra() const { return algebra_; }
  const std::vector<DiagonalTerm>& terms() const { return terms_; }

  /// Coordinates of sum_l e'_l e''_l.
  Coords multiplication_image() const;
  /// max-abs entry of sum_l e'_l e''_l - 1.
  double unit_residual() const;
  /// max over basis b of the max-abs entry of (b (x) 1) e - e (1 (x) b).
  double commutation_residual() const;
  /// max-abs entry of e - e*, with (x (x) y)* = x* (x) y*.
  double self_adjoint_residual() const;
  bool is_self_adjoint(double tol = kAlgebraicTolerance) const;
  /// (e + e*) / 2.
  Diagonal symmetrized() const;

 private:
  Matrix tensor(const std::vector<DiagonalTerm>& terms) const;

  AlgebraPtr algebra_;
  std::vector<DiagonalTerm> terms_;
};

/// Diagonal of a matrix-block algebra: ((1/n) E_kl, E_lk) per block.
Diagonal diagonal(const SemisimplePtr& algebra);

}  // namespace stabilize
