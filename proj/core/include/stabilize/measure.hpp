#pragma once

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace stabilize {

/// Largest support size accepted by the exact transport solver.
inline constexpr int kMaxTransportPoints = 64;

/// n points with a symmetric distance matrix; infinite entries are allowed
/// and mark the space as extended.
class FiniteMetricSpace {
 public:
  explicit FiniteMetricSpace(Eigen::MatrixXd distances);

  /// Points on the real line at the given coordinates.
  static FiniteMetricSpace on_line(const std::vector<double>& coordinates);

  int size() const { return static_cast<int>(distances_.rows()); }
  double operator()(int x, int y) const { return distances_(x, y); }
  const Eigen::MatrixXd& distances() const { return distances_; }
  bool extended() const { return extended_; }

  friend bool operator==(const FiniteMetricSpace& a, const FiniteMetricSpace& b) {
    return a.distances_.rows() == b.distances_.rows() && a.distances_ == b.distances_;
  }

 private:
  Eigen::MatrixXd distances_;
  bool extended_ = false;
};

using SpacePtr = std::shared_ptr<const FiniteMetricSpace>;

enum class MeasureKind { Probability, AbsolutelyConvex };

/// Weighted point masses on a finite metric space.
///   Probability       real weights >= 0 summing to 1
///   AbsolutelyConvex  complex weights with sum |w| <= 1
class FinitelySupportedMeasure {
 public:
  FinitelySupportedMeasure(SpacePtr space, Eigen::VectorXcd weights, MeasureKind kind);

  const SpacePtr& space() const { return space_; }
  const Eigen::VectorXcd& weights() const { return weights_; }
  MeasureKind kind() const { return kind_; }

 private:
  SpacePtr space_;
  Eigen::VectorXcd weights_;
  MeasureKind kind_;
};

FinitelySupportedMeasure dirac(const SpacePtr& space, int point, MeasureKind kind = MeasureKind::Probability);

/// Optimal transport of supply onto demand (equal total mass) under the space's metric.
struct TransportSolution {
  double cost = 0.0;
  /// plan(k, j): mass moved from k to j.
  Eigen::MatrixXd plan;
  /// 1-Lipschitz potential f with sum f (supply - demand) = cost.
  Eigen::VectorXd potential;
  /// |cost - sum f (supply - demand)|.
  double gap = 0.0;
};

TransportSolution solve_transport(const FiniteMetricSpace& space, const Eigen::VectorXd& supply,
                                  const Eigen::VectorXd& demand);

struct KrDistance {
  /// +inf when the total masses differ.
  double value = 0.0;
  /// Dual certificate of the optimal phase.
  Eigen::VectorXd potential;
  double gap = 0.0;
  /// Phase theta at which Re(e^{i theta} (mu - mu')) attains the value.
  double phase = 0.0;
};

/// sup over 1-Lipschitz f of |int f d mu - int f d mu'|.
KrDistance kr_distance(const FinitelySupportedMeasure& a, const FinitelySupportedMeasure& b);

/// sum_i w_i mu_i; all measures share a space and a kind.
FinitelySupportedMeasure combine(const std::vector<std::complex<double>>& weights,
                                 const std::vector<FinitelySupportedMeasure>& measures);

/// sum |w|, the total variation.
double acvx_seminorm(const FinitelySupportedMeasure& mu);

/// ||mu|| + ||mu'||.
double acvx_pseudometric(const FinitelySupportedMeasure& a, const FinitelySupportedMeasure& b);

/// True when d_Y(f x, f x') <= d_X(x, x') for all pairs.
bool is_short_map(const FiniteMetricSpace& from, const FiniteMetricSpace& to, const std::vector<int>& map);

/// Image measure along an index map into another space.
FinitelySupportedMeasure pushforward(const FinitelySupportedMeasure& mu, const SpacePtr& to,
                                     const std::vector<int>& map);

}  // namespace stabilize
