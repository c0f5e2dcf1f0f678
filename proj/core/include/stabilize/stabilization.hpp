#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "stabilize/algebra.hpp"
#include "stabilize/errors.hpp"
#include "stabilize/linear_map.hpp"
#include "stabilize/representation.hpp"

namespace stabilize {

/// Initial defect above which haar_correct refuses to start.
inline constexpr double kAdmissibleDefect = 0.2;
/// Consecutive defect increases that count as divergence.
inline constexpr int kDivergenceStreak = 3;

struct CorrectionTrace {
  int iterations = 0;
  /// defects[n] is the basis defect of the n-th iterate; size = iterations + 1.
  std::vector<double> defects;
  bool converged = false;
  std::optional<LinearMap> final_map;
  /// Distance of the output to the input, in the caller's metric.
  double distance_to_input = 0.0;
  /// ||Psi(1) - 1|| of the final iterate.
  double unit_defect = 0.0;
  /// Every iterate, when requested.
  std::vector<LinearMap> iterates;
};

/// A correction that stopped without reaching its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, CorrectionTrace trace) : Error(what), trace_(std::move(trace)) {}
  const CorrectionTrace& trace() const { return trace_; }

 private:
  CorrectionTrace trace_;
};

/// Empirical convergence of a defect sequence once it drops below a threshold.
struct ConvergenceOrder {
  /// Smallest K with d_{n+1} <= K d_n^2 over the fitted steps.
  double constant = 0.0;
  /// Smallest log-decrement ratio log(d_{n+2}/d_{n+1}) / log(d_{n+1}/d_n); 2 for exact quadratic decay.
  double order = 0.0;
  /// Number of ratios behind `order`; 0 when the sequence is too short to judge.
  int ratios = 0;
  bool quadratic = true;
};

/// Steps start at defects below `threshold`; values at or below `floor` are
/// rounding noise and end the fit.
ConvergenceOrder convergence_order(const std::vector<double>& defects, double threshold = 1e-2, double floor = 1e-12,
                                   double min_order = 1.8);

struct BilinearDefect {
  /// max over basis pairs (b, b') of ||T(bb') - T(b)T(b')||.
  double basis_defect = 0.0;
  /// Enclosure of the sup over pairs in the unit ball.
  NormInterval norm_interval;
  /// ||T(1) - 1||.
  double unit_defect = 0.0;
};

double basis_defect(const LinearMap& map);
BilinearDefect bilinear_defect(const LinearMap& map, const NormEstimateOptions& options = {});

struct NewtonOptions {
  bool record_iterates = false;
  /// Applied to every iterate after the correction step.
  std::function<LinearMap(const LinearMap&)> retraction;
};

/// Psi_{n+1} = Psi_n + psi_{n+1},
/// psi_{n+1}(x) = sum_l Psi_n(e'_l) (Psi_n(e''_l x) - Psi_n(e''_l) Psi_n(x)).
/// Throws ConvergenceError on divergence or when max_iter is exhausted.
CorrectionTrace newton_correct(const LinearMap& map, const Diagonal& diagonal, double tol, int max_iter,
                               const NewtonOptions& options = {});

struct HaarOptions {
  double tol = kAlgebraicTolerance;
  int max_iter = 50;
  double admissible_defect = kAdmissibleDefect;
  bool record_iterates = false;
};

struct HaarResult {
  Representation representation;
  CorrectionTrace trace;
  double initial_defect = 0.0;
  /// distance_to_input / initial_defect (0 when the input is exact).
  double lipschitz_ratio = 0.0;
};

/// Linearize over the group algebra, correct against its diagonal, restrict.
/// Unitary inputs stay in the *-preserving maps and are re-projected onto
/// unitaries after every step.
HaarResult haar_correct(const Representation& phi, const HaarOptions& options = {});

/// (T + T*) / 2 with T*(b) = T(b*)*.
LinearMap self_adjoint_part(const LinearMap& map);

/// (1/|G|) sum_t phi2(t) phi1(t)^-1; satisfies phi2(s) u = u phi1(s).
AlgebraElement average_intertwiner(const Representation& phi1, const Representation& phi2);

struct PolarDecomposition {
  AlgebraElement unitary;
  AlgebraElement positive;
};

/// x = unitary * positive with positive = (x* x)^{1/2}.
PolarDecomposition polar_decompose(const AlgebraElement& x);

/// Polar part of the averaged intertwiner; phi2 = w phi1 w*.
AlgebraElement unitarize_conjugation(const Representation& phi1, const Representation& phi2);

/// max over g of ||phi2(g) u - u phi1(g)||.
double intertwining_residual(const Representation& phi1, const Representation& phi2, const AlgebraElement& u);

}  // namespace stabilize
