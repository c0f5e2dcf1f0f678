#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "stabilize/linear_map.hpp"

namespace stabilize {

using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Largest ambient dimension for certified sphere searches.
inline constexpr int kMaxCertifiedDimension = 4;

enum class NormKind { P, Polytope, Ellipsoid };

/// R^d with one of three computable norms:
///   P          ||x||_p, p in [1, inf]
///   Polytope   max_k |f_k . x| over facet functionals (rows of `facets`)
///   Ellipsoid  sqrt(x^T Q x), Q positive definite
class FinDimBanachSpace {
 public:
  static FinDimBanachSpace lp(int dimension, double p);
  static FinDimBanachSpace polytope(RealMatrix facets);
  static FinDimBanachSpace ellipsoid(RealMatrix form);

  int dimension() const { return dimension_; }
  NormKind kind() const { return kind_; }
  double p() const { return p_; }
  const RealMatrix& facets() const { return facets_; }
  const RealMatrix& form() const { return form_; }

  double norm(const RealVector& x) const;
  /// Support function of the unit ball.
  double dual_norm(const RealVector& u) const;
  /// Extreme points of the unit ball (columns, one of each +-pair) when it is a polytope.
  std::optional<RealMatrix> vertices() const;
  /// Rows f_k with ||x|| = max_k |f_k . x|, when the norm has that form.
  std::optional<RealMatrix> facet_functionals() const;
  /// max |x|_2 over the unit ball.
  double outer_radius() const;
  /// min |x|_2 over the unit sphere.
  double inner_radius() const;
  std::string describe() const;

  friend bool operator==(const FinDimBanachSpace& a, const FinDimBanachSpace& b);

 private:
  FinDimBanachSpace() = default;

  int dimension_ = 0;
  NormKind kind_ = NormKind::P;
  double p_ = 2.0;
  RealMatrix facets_;
  RealMatrix vertices_;
  RealMatrix form_;
  RealMatrix inverse_form_;
};

/// Unit ball is the regular 2i-gon with vertices at the 2i-th roots of unity.
FinDimBanachSpace polygon_space(int i);

/// The image basis * {y : ||y|| <= 1} of a unit ball inside an ambient space.
struct EmbeddedBall {
  FinDimBanachSpace norm;
  RealMatrix basis;
};

struct CertifiedOptions {
  double tol = kOptimizedTolerance;
  long max_evaluations = 20'000'000;
};

struct CertifiedValue {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  long evaluations = 0;
};

/// Two-sided Hausdorff distance between two embedded unit balls in the ambient
/// norm: sup over u != 0 of |h_a(u) - h_b(u)| / ||u||_*, maximized by
/// Lipschitz branch-and-bound on the Euclidean sphere.
CertifiedValue hausdorff_distance_balls(const EmbeddedBall& a, const EmbeddedBall& b,
                                        const FinDimBanachSpace& ambient, const CertifiedOptions& options = {});

/// Operator norm of the identity (R^d, source) -> (R^d, target): the least
/// expansion of any splitting of the identity, by sphere branch-and-bound.
CertifiedValue min_expansion_split(const FinDimBanachSpace& source, const FinDimBanachSpace& target,
                                   const CertifiedOptions& options = {});

/// A linear map between two normed coordinate spaces.
struct BanachMap {
  FinDimBanachSpace source;
  FinDimBanachSpace target;
  RealMatrix matrix;
};

/// Exact when the target has facet functionals, the source has finitely many
/// extreme points, or both norms are Euclidean/ellipsoidal; otherwise a
/// sampled lower bound and an equivalence-constant upper bound.
NormInterval banach_operator_norm(const BanachMap& map);

struct RescaledMap {
  double scale = 1.0;
  BanachMap map;
  NormInterval norm;
};

/// scale = min(1, 1 / upper bound of ||T||); the scaled map has norm <= 1.
RescaledMap rescale_to_contraction(const BanachMap& map);

/// F_i written as the graph {x + Lx : x in F} over F along the orthogonal
/// complement E'. base and complement are orthonormal.
struct SubspaceGraph {
  RealMatrix base;
  RealMatrix complement;
  /// Coordinates over base -> coordinates over complement.
  RealMatrix map;

  RealMatrix graph_basis() const { return base + complement * map; }
  /// Euclidean operator norm of L.
  double map_norm() const;
};

/// Orthonormal frame of span(f) and of its orthogonal complement, with
/// deterministic signs; the returned map is zero.
SubspaceGraph complement_frame(const RealMatrix& f);

SubspaceGraph graph_approximate(const RealMatrix& f, const RealMatrix& nearby);

}  // namespace stabilize
