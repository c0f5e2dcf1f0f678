#include "stabilize/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "stabilize/errors.hpp"

namespace stabilize {

using Eigen::Index;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kWeightTolerance = 1e-12;

struct Edge {
  int to;
  int reverse;
  double capacity;
  double cost;
};

/// Residual network for successive-shortest-path min-cost flow.
class FlowNetwork {
 public:
  explicit FlowNetwork(int nodes) : adjacency_(nodes) {}

  void add_edge(int from, int to, double capacity, double cost) {
    adjacency_[from].push_back({to, static_cast<int>(adjacency_[to].size()), capacity, cost});
    adjacency_[to].push_back({from, static_cast<int>(adjacency_[from].size()) - 1, 0.0, -cost});
  }

  /// Bellman-Ford distances from every node with initial distance 0 at `sources`.
  std::vector<double> distances(const std::vector<int>& sources, std::vector<std::pair<int, int>>* parent,
                                double threshold) const {
    const int n = static_cast<int>(adjacency_.size());
    std::vector<double> dist(n, kInf);
    if (parent) parent->assign(n, {-1, -1});
    for (int s : sources) dist[s] = 0.0;
    for (int round = 0; round < n; ++round) {
      bool changed = false;
      for (int u = 0; u < n; ++u) {
        if (dist[u] == kInf) continue;
        for (int e = 0; e < static_cast<int>(adjacency_[u].size()); ++e) {
          const Edge& edge = adjacency_[u][e];
          if (edge.capacity <= threshold) continue;
          const double candidate = dist[u] + edge.cost;
          if (candidate < dist[edge.to] - 1e-15 * std::max(1.0, std::abs(candidate))) {
            dist[edge.to] = candidate;
            if (parent) (*parent)[edge.to] = {u, e};
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    return dist;
  }

  std::vector<std::vector<Edge>>& adjacency() { return adjacency_; }
  const std::vector<std::vector<Edge>>& adjacency() const { return adjacency_; }

 private:
  std::vector<std::vector<Edge>> adjacency_;
};

}  // namespace

// ---------------------------------------------------------------------------
// FiniteMetricSpace

FiniteMetricSpace::FiniteMetricSpace(Eigen::MatrixXd distances) : distances_(std::move(distances)) {
  const Index n = distances_.rows();
  if (n < 1 || distances_.cols() != n) throw PreconditionError("distance matrix must be square and non-empty");
  for (Index x = 0; x < n; ++x) {
    if (distances_(x, x) != 0.0) throw PreconditionError("distance matrix must have a zero diagonal");
    for (Index y = 0; y < n; ++y) {
      const double d = distances_(x, y);
      if (std::isnan(d) || d != distances_(y, x)) throw PreconditionError("distance matrix must be symmetric");
      if (x != y && !(d > 0.0)) throw PreconditionError("distinct points must have positive distance");
      if (std::isinf(d)) extended_ = true;
    }
  }
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y)
      for (Index z = 0; z < n; ++z) {
        const double via = distances_(x, z) + distances_(z, y);
        if (distances_(x, y) > via + 1e-12 * std::max(1.0, via))
          throw PreconditionError("distance matrix violates the triangle inequality");
      }
}

FiniteMetricSpace FiniteMetricSpace::on_line(const std::vector<double>& coordinates) {
  const Index n = static_cast<Index>(coordinates.size());
  Eigen::MatrixXd d(n, n);
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y) d(x, y) = std::abs(coordinates[x] - coordinates[y]);
  return FiniteMetricSpace(std::move(d));
}

// ---------------------------------------------------------------------------
// FinitelySupportedMeasure

FinitelySupportedMeasure::FinitelySupportedMeasure(SpacePtr space, Eigen::VectorXcd weights, MeasureKind kind)
    : space_(std::move(space)), weights_(std::move(weights)), kind_(kind) {
  if (!space_) throw PreconditionError("measure needs a base space");
  if (weights_.size() != space_->size()) throw PreconditionError("one weight per point is required");
  if (!weights_.allFinite()) throw PreconditionError("weights must be finite");
  if (kind_ == MeasureKind::Probability) {
    if (weights_.imag().cwiseAbs().maxCoeff() > 0.0) throw PreconditionError("probability weights must be real");
    if (weights_.real().minCoeff() < 0.0) throw PreconditionError("probability weights must be non-negative");
    if (std::abs(weights_.real().sum() - 1.0) > kWeightTolerance)
      throw PreconditionError("probability weights must sum to 1");
  } else if (weights_.cwiseAbs().sum() > 1.0 + kWeightTolerance) {
    throw PreconditionError("total variation exceeds 1");
  }
}

FinitelySupportedMeasure dirac(const SpacePtr& space, int point, MeasureKind kind) {
  if (point < 0 || point >= space->size()) throw PreconditionError("point index out of range");
  Eigen::VectorXcd w = Eigen::VectorXcd::Zero(space->size());
  w(point) = 1.0;
  return {space, std::move(w), kind};
}

// ---------------------------------------------------------------------------
// Transport

TransportSolution solve_transport(const FiniteMetricSpace& space, const Eigen::VectorXd& supply,
                                  const Eigen::VectorXd& demand) {
  const int n = space.size();
  if (n > kMaxTransportPoints)
    throw PreconditionError("transport is solved exactly only for at most " + std::to_string(kMaxTransportPoints) +
                            " points");
  if (supply.size() != n || demand.size() != n) throw PreconditionError("mass vectors do not match the space");
  if (supply.minCoeff() < 0.0 || demand.minCoeff() < 0.0) throw PreconditionError("masses must be non-negative");
  const double total = supply.sum();
  if (std::abs(total - demand.sum()) > 1e-12 * std::max(1.0, total))
    throw PreconditionError("supply and demand have different total mass");

  // Nodes: supply side 0..n-1, demand side n..2n-1, source 2n, sink 2n+1.
  const int source = 2 * n, sink = 2 * n + 1;
  FlowNetwork net(2 * n + 2);
  for (int k = 0; k < n; ++k) {
    if (supply(k) > 0.0) net.add_edge(source, k, supply(k), 0.0);
    if (demand(k) > 0.0) net.add_edge(n + k, sink, demand(k), 0.0);
    for (int j = 0; j < n; ++j)
      if (std::isfinite(space(k, j))) net.add_edge(k, n + j, kInf, space(k, j));
  }

  TransportSolution out;
  out.plan = Eigen::MatrixXd::Zero(n, n);
  const double threshold = 1e-15 * std::max(1.0, total);
  double remaining = std::min(total, demand.sum());
  std::vector<std::pair<int, int>> parent;
  while (remaining > threshold) {
    const auto dist = net.distances({source}, &parent, threshold);
    if (dist[sink] == kInf) {
      out.cost = kInf;
      out.gap = 0.0;
      return out;
    }
    double push = remaining;
    for (int v = sink; v != source; v = parent[v].first)
      push = std::min(push, net.adjacency()[parent[v].first][parent[v].second].capacity);
    for (int v = sink; v != source; v = parent[v].first) {
      Edge& edge = net.adjacency()[parent[v].first][parent[v].second];
      edge.capacity -= push;
      net.adjacency()[edge.to][edge.reverse].capacity += push;
    }
    remaining -= push;
  }

  for (int k = 0; k < n; ++k)
    for (const Edge& edge : net.adjacency()[k])
      if (edge.to >= n && edge.to < 2 * n) {
        const double flow = net.adjacency()[edge.to][edge.reverse].capacity;
        out.plan(k, edge.to - n) = flow;
        out.cost += flow * space(k, edge.to - n);
      }

  // Potentials of the optimal residual network, then the c-transform, which is
  // 1-Lipschitz on the whole space.
  std::vector<int> all(2 * n);
  for (int v = 0; v < 2 * n; ++v) all[v] = v;
  auto& adj = net.adjacency();
  for (auto* list : {&adj[source], &adj[sink]})
    for (auto& edge : *list) edge.capacity = 0.0;
  for (int v = 0; v < 2 * n; ++v)
    for (auto& edge : adj[v])
      if (edge.to >= 2 * n) edge.capacity = 0.0;
  const auto pi = net.distances(all, nullptr, threshold);
  out.potential.resize(n);
  for (int x = 0; x < n; ++x) {
    double best = kInf;
    for (int j = 0; j < n; ++j) best = std::min(best, space(x, j) - pi[n + j]);
    out.potential(x) = best;
  }
  out.gap = std::abs(out.cost - out.potential.dot(supply - demand));
  return out;
}

namespace {

TransportSolution signed_flow(const FiniteMetricSpace& space, const Eigen::VectorXd& difference) {
  Eigen::VectorXd supply = difference.cwiseMax(0.0);
  Eigen::VectorXd demand = (-difference).cwiseMax(0.0);
  // Balance rounding residue on the larger side.
  const double excess = supply.sum() - demand.sum();
  if (excess > 0.0) {
    Index arg;
    supply.maxCoeff(&arg);
    supply(arg) = std::max(0.0, supply(arg) - excess);
  } else if (excess < 0.0) {
    Index arg;
    demand.maxCoeff(&arg);
    demand(arg) = std::max(0.0, demand(arg) + excess);
  }
  return solve_transport(space, supply, demand);
}

}  // namespace

KrDistance kr_distance(const FinitelySupportedMeasure& a, const FinitelySupportedMeasure& b) {
  if (!(a.space() == b.space() || *a.space() == *b.space()))
    throw PreconditionError("measures live on different base spaces");
  const FiniteMetricSpace& space = *a.space();
  const Eigen::VectorXcd nu = a.weights() - b.weights();
  const double scale = std::max(1.0, a.weights().cwiseAbs().sum() + b.weights().cwiseAbs().sum());

  KrDistance out;
  if (std::abs(nu.sum()) > 1e-12 * scale) {
    out.value = kInf;
    return out;
  }
  if (nu.cwiseAbs().maxCoeff() == 0.0) {
    out.potential = Eigen::VectorXd::Zero(space.size());
    return out;
  }

  auto at_phase = [&](double theta) {
    return signed_flow(space, (std::polar(1.0, theta) * nu).real());
  };
  auto record = [&](double theta, const TransportSolution& s) {
    out.value = s.cost;
    out.potential = s.potential;
    out.gap = s.gap;
    out.phase = theta;
  };

  if (nu.imag().cwiseAbs().maxCoeff() == 0.0) {
    record(0.0, at_phase(0.0));
    return out;
  }

  // |z| = sup_theta Re(e^{i theta} z); the flow value is pi-periodic in theta.
  constexpr int kGrid = 64;
  const double step = std::numbers::pi / kGrid;
  double best_theta = 0.0;
  double best = -1.0;
  for (int k = 0; k < kGrid; ++k) {
    const double theta = k * step;
    const double v = at_phase(theta).cost;
    if (v > best) {
      best = v;
      best_theta = theta;
    }
  }
  constexpr double kGolden = 0.6180339887498949;
  double lo = best_theta - step, hi = best_theta + step;
  double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
  double f1 = at_phase(x1).cost, f2 = at_phase(x2).cost;
  while (hi - lo > 1e-7) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = at_phase(x2).cost;
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = at_phase(x1).cost;
    }
  }
  const double refined = 0.5 * (lo + hi);
  const auto candidate = at_phase(refined);
  if (candidate.cost >= best)
    record(refined, candidate);
  else
    record(best_theta, at_phase(best_theta));
  return out;
}

FinitelySupportedMeasure combine(const std::vector<std::complex<double>>& weights,
                                 const std::vector<FinitelySupportedMeasure>& measures) {
  if (weights.empty() || weights.size() != measures.size())
    throw PreconditionError("need one weight per measure and at least one measure");
  const auto kind = measures.front().kind();
  const auto& space = measures.front().space();
  for (const auto& m : measures) {
    if (m.kind() != kind) throw PreconditionError("measures of different kinds cannot be combined");
    if (!(m.space() == space || *m.space() == *space)) throw PreconditionError("measures live on different spaces");
  }
  if (kind == MeasureKind::Probability) {
    double sum = 0.0;
    for (const auto& w : weights) {
      if (w.imag() != 0.0 || w.real() < 0.0) throw PreconditionError("convex weights must be real and non-negative");
      sum += w.real();
    }
    if (std::abs(sum - 1.0) > kWeightTolerance) throw PreconditionError("convex weights must sum to 1");
  } else {
    double sum = 0.0;
    for (const auto& w : weights) sum += std::abs(w);
    if (sum > 1.0 + kWeightTolerance) throw PreconditionError("absolutely convex weights exceed total modulus 1");
  }
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(space->size());
  for (std::size_t i = 0; i < weights.size(); ++i) out += weights[i] * measures[i].weights();
  if (kind == MeasureKind::Probability) {
    Eigen::VectorXd real = out.real().cwiseMax(0.0);
    out = (real / real.sum()).cast<std::complex<double>>();
  }
  return {space, std::move(out), kind};
}

double acvx_seminorm(const FinitelySupportedMeasure& mu) { return mu.weights().cwiseAbs().sum(); }

double acvx_pseudometric(const FinitelySupportedMeasure& a, const FinitelySupportedMeasure& b) {
  return acvx_seminorm(a) + acvx_seminorm(b);
}

bool is_short_map(const FiniteMetricSpace& from, const FiniteMetricSpace& to, const std::vector<int>& map) {
  if (static_cast<int>(map.size()) != from.size()) throw PreconditionError("map needs one image per point");
  for (int x : map)
    if (x < 0 || x >= to.size()) throw PreconditionError("map image out of range");
  for (int x = 0; x < from.size(); ++x)
    for (int y = 0; y < from.size(); ++y)
      if (to(map[x], map[y]) > from(x, y) + 1e-12 * std::max(1.0, from(x, y))) return false;
  return true;
}

FinitelySupportedMeasure pushforward(const FinitelySupportedMeasure& mu, const SpacePtr& to,
                                     const std::vector<int>& map) {
  if (static_cast<int>(map.size()) != mu.space()->size()) throw PreconditionError("map needs one image per point");
  Eigen::VectorXcd w = Eigen::VectorXcd::Zero(to->size());
  for (std::size_t x = 0; x < map.size(); ++x) {
    if (map[x] < 0 || map[x] >= to->size()) throw PreconditionError("map image out of range");
    w(map[x]) += mu.weights()(static_cast<Index>(x));
  }
  return {to, std::move(w), mu.kind()};
}

}  // namespace stabilize
