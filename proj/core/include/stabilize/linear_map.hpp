#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stabilize/algebra.hpp"

namespace stabilize {

/// Certified enclosure of a quantity that can only be bounded, not computed.
struct NormInterval {
  double lower = 0.0;
  double upper = 0.0;
};

/// A linear map from a basis-equipped algebra into a matrix-block algebra,
/// stored as the dense coefficient array over the source basis: column j is
/// the target coordinate vector of T(b_j).
class LinearMap {
 public:
  LinearMap(AlgebraPtr source, SemisimplePtr target, Matrix coefficients);

  static LinearMap zero(AlgebraPtr source, SemisimplePtr target);
  static LinearMap from_images(AlgebraPtr source, std::span<const AlgebraElement> images);
  /// Identity on a matrix-block algebra.
  static LinearMap identity(const SemisimplePtr& algebra);

  const AlgebraPtr& source() const { return source_; }
  const SemisimplePtr& target() const { return target_; }
  const Matrix& coefficients() const { return coefficients_; }

  AlgebraElement apply(const Coords& x) const;
  AlgebraElement image(Index basis_index) const;
  std::vector<AlgebraElement> images() const;

  /// next o this; requires this->target() to be next.source().
  LinearMap then(const LinearMap& next) const;

  LinearMap& operator+=(const LinearMap& other);
  LinearMap& operator-=(const LinearMap& other);
  LinearMap& operator*=(Complex scalar);
  friend LinearMap operator+(LinearMap a, const LinearMap& b) { return a += b; }
  friend LinearMap operator-(LinearMap a, const LinearMap& b) { return a -= b; }
  friend LinearMap operator*(Complex s, LinearMap a) { return a *= s; }

 private:
  void check_compatible(const LinearMap& other) const;

  AlgebraPtr source_;
  SemisimplePtr target_;
  Matrix coefficients_;
};

/// max over source basis elements b of ||T1(b) - T2(b)||.
double basis_distance(const LinearMap& a, const LinearMap& b);

struct NormEstimateOptions {
  int restarts = 32;
  int iterations = 200;
  std::uint64_t seed = 0x5eed;
};

/// Interval for the operator norm of T between the source and target C*-norms.
/// lower: best ratio found by projected gradient ascent on the unit sphere;
/// upper: sigma_max(coefficients) * sqrt(source dimension).
NormInterval map_norm_estimate(const LinearMap& map, const NormEstimateOptions& options = {});

}  // namespace stabilize
