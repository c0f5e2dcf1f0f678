#pragma once

#include <random>

#include "stabilize/stabilize.hpp"

namespace stabilize::testing {

inline AlgebraElement random_element(const SemisimplePtr& algebra, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<Matrix> blocks;
  for (const auto& b : algebra->blocks()) {
    Matrix m(b.n, b.n);
    for (Index r = 0; r < b.n; ++r)
      for (Index c = 0; c < b.n; ++c) m(r, c) = Complex{normal(rng), b.field == Field::Real ? 0.0 : normal(rng)};
    blocks.push_back(std::move(m));
  }
  return {algebra, std::move(blocks)};
}

/// exp(K) for K skew-Hermitian with operator norm `size`.
inline AlgebraElement random_unitary_near_one(const SemisimplePtr& algebra, double size, std::mt19937_64& rng) {
  auto k = random_element(algebra, rng);
  k = (k - k.adjoint()) * Complex{0.5};
  k *= Complex{size / operator_norm(k)};
  std::vector<Matrix> blocks;
  for (const auto& b : k.blocks()) {
    Eigen::ComplexEigenSolver<Matrix> eig(b);
    const Matrix v = eig.eigenvectors();
    blocks.push_back(v * eig.eigenvalues().array().exp().matrix().asDiagonal() * v.inverse());
  }
  return AlgebraElement::from_coords(algebra, algebra->from_blocks(blocks));
}

inline double max_abs(const Coords& x) { return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff(); }

}  // namespace stabilize::testing
