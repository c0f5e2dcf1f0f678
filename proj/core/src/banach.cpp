#include "stabilize/banach.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <random>
#include <sstream>

#include "stabilize/errors.hpp"

namespace stabilize {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double p_norm(const RealVector& x, double p) {
  if (std::isinf(p)) return x.cwiseAbs().maxCoeff();
  if (p == 1.0) return x.cwiseAbs().sum();
  if (p == 2.0) return x.norm();
  const double scale = x.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return scale * std::pow((x.cwiseAbs() / scale).array().pow(p).sum(), 1.0 / p);
}

double conjugate_exponent(double p) {
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

/// Vertices of {x : |F x| <= 1} by hyperplane enumeration, one per +-pair.
RealMatrix enumerate_vertices(const RealMatrix& facets) {
  const int m = static_cast<int>(facets.rows());
  const int d = static_cast<int>(facets.cols());
  std::vector<RealVector> found;
  std::vector<int> pick(d);
  auto record = [&](const RealVector& x) {
    if ((facets * x).cwiseAbs().maxCoeff() > 1.0 + 1e-9) return;
    for (const auto& y : found)
      if ((x - y).cwiseAbs().maxCoeff() < 1e-9 || (x + y).cwiseAbs().maxCoeff() < 1e-9) return;
    found.push_back(x);
  };
  std::function<void(int, int)> choose = [&](int slot, int start) {
    if (slot == d) {
      RealMatrix a(d, d);
      for (int r = 0; r < d; ++r) a.row(r) = facets.row(pick[r]);
      Eigen::FullPivLU<RealMatrix> lu(a);
      if (lu.rank() < d) return;
      // The first sign is fixed to +1; the antipode is implied.
      for (int mask = 0; mask < (1 << (d - 1)); ++mask) {
        RealVector s(d);
        s(0) = 1.0;
        for (int r = 1; r < d; ++r) s(r) = (mask >> (r - 1)) & 1 ? -1.0 : 1.0;
        record(lu.solve(s));
      }
      return;
    }
    for (int k = start; k <= m - (d - slot); ++k) {
      pick[slot] = k;
      choose(slot + 1, k + 1);
    }
  };
  choose(0, 0);
  RealMatrix out(d, static_cast<Index>(found.size()));
  for (std::size_t j = 0; j < found.size(); ++j) out.col(static_cast<Index>(j)) = found[j];
  return out;
}

/// Certified maximum of an even function on the Euclidean unit sphere of R^d,
/// given a Lipschitz constant with respect to the Euclidean distance.
CertifiedValue maximize_on_sphere(int d, const std::function<double(const RealVector&)>& f, double lipschitz,
                                  const CertifiedOptions& options) {
  if (d < 1) throw PreconditionError("sphere dimension must be >= 1");
  if (d > kMaxCertifiedDimension)
    throw CertificateError("dimension " + std::to_string(d) + " exceeds the certified search limit of " +
                           std::to_string(kMaxCertifiedDimension));
  CertifiedValue out;
  if (d == 1) {
    out.value = out.lower = out.upper = f(RealVector::Ones(1));
    out.evaluations = 1;
    return out;
  }

  struct Cell {
    double upper;
    double value;
    RealVector center;  // 2-d: (angle); higher: (face, coordinates...)
    double half_width;
    bool operator<(const Cell& other) const { return upper < other.upper; }
  };
  const int free_dims = d == 2 ? 1 : d - 1;
  const double radius_factor = std::sqrt(static_cast<double>(free_dims));

  auto point = [&](const RealVector& center) {
    RealVector u(d);
    if (d == 2) {
      u << std::cos(center(0)), std::sin(center(0));
      return u;
    }
    const int face = static_cast<int>(center(0));
    for (int k = 0, c = 1; k < d; ++k) u(k) = k == face ? 1.0 : center(c++);
    return RealVector(u / u.norm());
  };

  std::priority_queue<Cell> heap;
  double best = -kInf;
  auto push = [&](RealVector center, double half_width) {
    const double v = f(point(center));
    ++out.evaluations;
    best = std::max(best, v);
    heap.push({v + lipschitz * half_width * radius_factor, v, std::move(center), half_width});
  };

  if (d == 2) {
    constexpr int kInitial = 64;
    const double w = std::numbers::pi / kInitial;
    for (int j = 0; j < kInitial; ++j) push(RealVector::Constant(1, (j + 0.5) * w), w / 2);
  } else {
    for (int face = 0; face < d; ++face) {
      RealVector c = RealVector::Zero(d);
      c(0) = face;
      push(c, 1.0);
    }
  }

  while (true) {
    const Cell top = heap.top();
    if (top.upper - best <= options.tol) {
      out.lower = best;
      out.upper = std::max(best, top.upper);
      out.value = best;
      return out;
    }
    if (out.evaluations >= options.max_evaluations)
      throw CertificateError("sphere search exceeded its evaluation budget before reaching tolerance");
    heap.pop();
    const double h = top.half_width / 2;
    if (d == 2) {
      push(RealVector::Constant(1, top.center(0) - h), h);
      push(RealVector::Constant(1, top.center(0) + h), h);
    } else {
      for (int mask = 0; mask < (1 << free_dims); ++mask) {
        RealVector c = top.center;
        for (int k = 0; k < free_dims; ++k) c(1 + k) += (mask >> k) & 1 ? h : -h;
        push(std::move(c), h);
      }
    }
  }
}

double sigma_max(const RealMatrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<RealMatrix>(m).singularValues()(0);
}

RealMatrix symmetric_sqrt(const RealMatrix& m, bool inverse) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(m);
  RealVector values = eig.eigenvalues().cwiseSqrt();
  if (inverse) values = values.cwiseInverse();
  return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
}

bool is_euclidean_like(const FinDimBanachSpace& s) {
  return s.kind() == NormKind::Ellipsoid || (s.kind() == NormKind::P && s.p() == 2.0);
}

RealMatrix quadratic_form(const FinDimBanachSpace& s) {
  return s.kind() == NormKind::Ellipsoid ? s.form() : RealMatrix::Identity(s.dimension(), s.dimension());
}

}  // namespace

// ---------------------------------------------------------------------------
// FinDimBanachSpace

FinDimBanachSpace FinDimBanachSpace::lp(int dimension, double p) {
  if (dimension < 1) throw PreconditionError("space dimension must be >= 1");
  if (!(p >= 1.0)) throw PreconditionError("p must lie in [1, inf]");
  FinDimBanachSpace s;
  s.dimension_ = dimension;
  s.kind_ = NormKind::P;
  s.p_ = p;
  return s;
}

FinDimBanachSpace FinDimBanachSpace::polytope(RealMatrix facets) {
  if (facets.rows() < 1 || facets.cols() < 1) throw PreconditionError("polytope norm needs facet functionals");
  if (!facets.allFinite()) throw PreconditionError("facet functionals must be finite");
  if (Eigen::FullPivLU<RealMatrix>(facets).rank() < facets.cols())
    throw PreconditionError("facet functionals do not span the dual; the unit ball is unbounded");
  FinDimBanachSpace s;
  s.dimension_ = static_cast<int>(facets.cols());
  s.kind_ = NormKind::Polytope;
  s.facets_ = std::move(facets);
  s.vertices_ = enumerate_vertices(s.facets_);
  return s;
}

FinDimBanachSpace FinDimBanachSpace::ellipsoid(RealMatrix form) {
  if (form.rows() != form.cols() || form.rows() < 1) throw PreconditionError("quadratic form must be square");
  if ((form - form.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, form.cwiseAbs().maxCoeff()))
    throw PreconditionError("quadratic form must be symmetric");
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(form);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) throw PreconditionError("quadratic form must be positive definite");
  FinDimBanachSpace s;
  s.dimension_ = static_cast<int>(form.rows());
  s.kind_ = NormKind::Ellipsoid;
  s.inverse_form_ = form.inverse();
  s.form_ = std::move(form);
  return s;
}

double FinDimBanachSpace::norm(const RealVector& x) const {
  if (x.size() != dimension_) throw PreconditionError("vector has wrong dimension");
  switch (kind_) {
    case NormKind::P: return p_norm(x, p_);
    case NormKind::Polytope: return (facets_ * x).cwiseAbs().maxCoeff();
    case NormKind::Ellipsoid: return std::sqrt(std::max(0.0, x.dot(form_ * x)));
  }
  return 0.0;
}

double FinDimBanachSpace::dual_norm(const RealVector& u) const {
  if (u.size() != dimension_) throw PreconditionError("vector has wrong dimension");
  switch (kind_) {
    case NormKind::P: return p_norm(u, conjugate_exponent(p_));
    case NormKind::Polytope: return (vertices_.transpose() * u).cwiseAbs().maxCoeff();
    case NormKind::Ellipsoid: return std::sqrt(std::max(0.0, u.dot(inverse_form_ * u)));
  }
  return 0.0;
}

std::optional<RealMatrix> FinDimBanachSpace::vertices() const {
  if (kind_ == NormKind::Polytope) return vertices_;
  if (kind_ == NormKind::P && p_ == 1.0) return RealMatrix::Identity(dimension_, dimension_);
  if (kind_ == NormKind::P && (std::isinf(p_) || dimension_ == 1)) {
    const int n = 1 << (dimension_ - 1);
    RealMatrix out(dimension_, n);
    for (int mask = 0; mask < n; ++mask) {
      out(0, mask) = 1.0;
      for (int k = 1; k < dimension_; ++k) out(k, mask) = (mask >> (k - 1)) & 1 ? -1.0 : 1.0;
    }
    return out;
  }
  return std::nullopt;
}

std::optional<RealMatrix> FinDimBanachSpace::facet_functionals() const {
  if (kind_ == NormKind::Polytope) return facets_;
  if (kind_ == NormKind::P && (std::isinf(p_) || dimension_ == 1)) return RealMatrix::Identity(dimension_, dimension_);
  if (kind_ == NormKind::P && p_ == 1.0) {
    auto v = FinDimBanachSpace::lp(dimension_, kInf).vertices();
    return RealMatrix(v->transpose());
  }
  return std::nullopt;
}

double FinDimBanachSpace::outer_radius() const {
  const double d = dimension_;
  switch (kind_) {
    case NormKind::P: return std::pow(d, std::max(0.0, 0.5 - 1.0 / p_));
    case NormKind::Polytope: return vertices_.colwise().norm().maxCoeff();
    case NormKind::Ellipsoid:
      return 1.0 / std::sqrt(Eigen::SelfAdjointEigenSolver<RealMatrix>(form_).eigenvalues().minCoeff());
  }
  return 0.0;
}

double FinDimBanachSpace::inner_radius() const {
  const double d = dimension_;
  switch (kind_) {
    case NormKind::P: return std::pow(d, std::min(0.0, 0.5 - 1.0 / p_));
    case NormKind::Polytope: return 1.0 / facets_.rowwise().norm().maxCoeff();
    case NormKind::Ellipsoid:
      return 1.0 / std::sqrt(Eigen::SelfAdjointEigenSolver<RealMatrix>(form_).eigenvalues().maxCoeff());
  }
  return 0.0;
}

std::string FinDimBanachSpace::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case NormKind::P:
      os << "l";
      if (std::isinf(p_))
        os << "inf";
      else
        os << p_;
      os << "^" << dimension_;
      break;
    case NormKind::Polytope: os << "polytope(" << facets_.rows() << " facets)^" << dimension_; break;
    case NormKind::Ellipsoid: os << "ellipsoid^" << dimension_; break;
  }
  return os.str();
}

bool operator==(const FinDimBanachSpace& a, const FinDimBanachSpace& b) {
  if (a.dimension_ != b.dimension_ || a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case NormKind::P: return a.p_ == b.p_;
    case NormKind::Polytope: return a.facets_.rows() == b.facets_.rows() && a.facets_ == b.facets_;
    case NormKind::Ellipsoid: return a.form_ == b.form_;
  }
  return false;
}

FinDimBanachSpace polygon_space(int i) {
  if (i < 2) throw PreconditionError("polygon space needs i >= 2");
  const double inradius = std::cos(std::numbers::pi / (2.0 * i));
  RealMatrix facets(i, 2);
  for (int j = 0; j < i; ++j) {
    const double angle = (2.0 * j + 1.0) * std::numbers::pi / (2.0 * i);
    facets(j, 0) = std::cos(angle) / inradius;
    facets(j, 1) = std::sin(angle) / inradius;
  }
  return FinDimBanachSpace::polytope(std::move(facets));
}

// ---------------------------------------------------------------------------
// Certified searches

CertifiedValue hausdorff_distance_balls(const EmbeddedBall& a, const EmbeddedBall& b,
                                        const FinDimBanachSpace& ambient, const CertifiedOptions& options) {
  const int d = ambient.dimension();
  for (const auto* ball : {&a, &b}) {
    if (ball->basis.rows() != d) throw PreconditionError("embedded ball lives in another ambient dimension");
    if (ball->basis.cols() != ball->norm.dimension()) throw PreconditionError("embedding basis does not match its norm");
  }
  if (a.norm == b.norm && a.basis.cols() == b.basis.cols() && a.basis == b.basis) return {};

  const double ra = a.norm.outer_radius() * sigma_max(a.basis);
  const double rb = b.norm.outer_radius() * sigma_max(b.basis);
  const double r_in = ambient.inner_radius();
  const double r_out = ambient.outer_radius();
  const double lipschitz = (ra + rb) / r_in + std::max(ra, rb) * r_out / (r_in * r_in);

  auto gap = [&](const RealVector& u) {
    const double ha = a.norm.dual_norm(a.basis.transpose() * u);
    const double hb = b.norm.dual_norm(b.basis.transpose() * u);
    return std::abs(ha - hb) / ambient.dual_norm(u);
  };
  return maximize_on_sphere(d, gap, lipschitz, options);
}

CertifiedValue min_expansion_split(const FinDimBanachSpace& source, const FinDimBanachSpace& target,
                                   const CertifiedOptions& options) {
  if (source.dimension() != target.dimension()) throw PreconditionError("spaces have different dimensions");
  // ||u||_t <= |u|_2 / r_t, ||u||_s >= |u|_2 / R_s on the Euclidean sphere.
  const double top = 1.0 / target.inner_radius();
  const double bottom = 1.0 / source.outer_radius();
  const double lipschitz = top / bottom + top * (1.0 / source.inner_radius()) / (bottom * bottom);
  auto ratio = [&](const RealVector& u) { return target.norm(u) / source.norm(u); };
  return maximize_on_sphere(source.dimension(), ratio, lipschitz, options);
}

NormInterval banach_operator_norm(const BanachMap& map) {
  const auto& s = map.source;
  const auto& t = map.target;
  const RealMatrix& m = map.matrix;
  if (m.rows() != t.dimension() || m.cols() != s.dimension()) throw PreconditionError("map matrix has wrong shape");
  if (m.cwiseAbs().maxCoeff() == 0.0) return {};

  if (auto f = t.facet_functionals()) {
    double best = 0.0;
    const RealMatrix pulled = *f * m;
    for (Index k = 0; k < pulled.rows(); ++k) best = std::max(best, s.dual_norm(pulled.row(k).transpose()));
    return {best, best};
  }
  if (auto v = s.vertices()) {
    double best = 0.0;
    for (Index k = 0; k < v->cols(); ++k) best = std::max(best, t.norm(m * v->col(k)));
    return {best, best};
  }
  if (is_euclidean_like(s) && is_euclidean_like(t)) {
    const double value =
        sigma_max(symmetric_sqrt(quadratic_form(t), false) * m * symmetric_sqrt(quadratic_form(s), true));
    return {value, value};
  }

  NormInterval out;
  out.upper = sigma_max(m) * s.outer_radius() / t.inner_radius();
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  for (int k = 0; k < 4096; ++k) {
    RealVector x(s.dimension());
    for (auto& c : x) c = normal(rng);
    out.lower = std::max(out.lower, t.norm(m * x) / s.norm(x));
  }
  out.lower = std::min(out.lower, out.upper);
  return out;
}

RescaledMap rescale_to_contraction(const BanachMap& map) {
  RescaledMap out{1.0, map, banach_operator_norm(map)};
  if (out.norm.upper > 1.0) {
    out.scale = 1.0 / out.norm.upper;
    out.map.matrix *= out.scale;
    out.norm.lower *= out.scale;
    out.norm.upper = std::min(1.0, out.norm.upper * out.scale);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Graphs over subspaces

double SubspaceGraph::map_norm() const { return sigma_max(map); }

SubspaceGraph complement_frame(const RealMatrix& f) {
  const Index d = f.rows();
  const Index k = f.cols();
  if (k < 1 || k > d) throw PreconditionError("subspace basis has invalid shape");
  Eigen::HouseholderQR<RealMatrix> qr(f);
  const RealMatrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const RealVector diag = r.diagonal();
  if (diag.cwiseAbs().minCoeff() <= 1e-12 * std::max(1.0, diag.cwiseAbs().maxCoeff()))
    throw PreconditionError("subspace basis is rank deficient");
  RealMatrix q = qr.householderQ();
  for (Index j = 0; j < k; ++j)
    if (diag(j) < 0) q.col(j) *= -1.0;
  for (Index j = k; j < d; ++j) {
    Index arg = 0;
    q.col(j).cwiseAbs().maxCoeff(&arg);
    if (q(arg, j) < 0) q.col(j) *= -1.0;
  }
  return {q.leftCols(k), q.rightCols(d - k), RealMatrix::Zero(d - k, k)};
}

SubspaceGraph graph_approximate(const RealMatrix& f, const RealMatrix& nearby) {
  if (f.rows() != nearby.rows() || f.cols() != nearby.cols())
    throw PreconditionError("subspaces must have equal dimension in the same ambient space");
  SubspaceGraph out = complement_frame(f);
  const RealMatrix a = out.base.transpose() * nearby;
  const RealMatrix b = out.complement.transpose() * nearby;
  Eigen::JacobiSVD<RealMatrix> svd(a);
  const RealVector sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-10 * std::max(1.0, sv(0)))
    throw SingularError("projection onto the base subspace is singular; not a graph over it");
  out.map = b * a.inverse();
  return out;
}

}  // namespace stabilize
