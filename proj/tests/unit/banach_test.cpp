#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "stabilize/banach.hpp"
#include "stabilize/errors.hpp"

namespace stabilize {
namespace {

RealVector vec(std::initializer_list<double> xs) {
  RealVector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

RealMatrix identity(int d) { return RealMatrix::Identity(d, d); }

EmbeddedBall standard_ball(const FinDimBanachSpace& norm) { return {norm, identity(norm.dimension())}; }

/// Plane through e1 tilted from span(e1, e2) by theta about the e1 axis.
RealMatrix tilted_plane(double theta) {
  RealMatrix f(3, 2);
  f << 1, 0, 0, std::cos(theta), 0, std::sin(theta);
  return f;
}

std::vector<FinDimBanachSpace> sample_spaces() {
  RealMatrix form(2, 2);
  form << 2.0, 0.3, 0.3, 0.5;
  return {FinDimBanachSpace::lp(2, 1.0), FinDimBanachSpace::lp(2, 2.0), FinDimBanachSpace::lp(2, 3.5),
          FinDimBanachSpace::lp(2, INFINITY), polygon_space(3), polygon_space(5), FinDimBanachSpace::ellipsoid(form)};
}

TEST(FinDimBanachSpace, NormAxiomsOnRandomTriples) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (const auto& space : sample_spaces()) {
    for (int k = 0; k < space.dimension(); ++k) EXPECT_GT(space.norm(identity(space.dimension()).col(k)), 0.0);
    for (int k = 0; k < 200; ++k) {
      const RealVector x = vec({normal(rng), normal(rng)});
      const RealVector y = vec({normal(rng), normal(rng)});
      const double s = normal(rng);
      EXPECT_NEAR(space.norm(s * x), std::abs(s) * space.norm(x), 1e-9) << space.describe();
      EXPECT_LE(space.norm(x + y), space.norm(x) + space.norm(y) + 1e-9) << space.describe();
      // Support function and norm are dual: u.x <= ||u||_* ||x||.
      EXPECT_LE(y.dot(x), space.dual_norm(y) * space.norm(x) + 1e-9) << space.describe();
    }
    EXPECT_LE(space.inner_radius(), space.outer_radius());
  }
}

TEST(FinDimBanachSpace, RejectsInvalidDescriptors) {
  EXPECT_THROW(FinDimBanachSpace::lp(2, 0.5), PreconditionError);
  EXPECT_THROW(FinDimBanachSpace::lp(0, 2.0), PreconditionError);
  RealMatrix flat(2, 2);
  flat << 1, 0, 2, 0;
  EXPECT_THROW(FinDimBanachSpace::polytope(flat), PreconditionError);
  RealMatrix indefinite(2, 2);
  indefinite << 1, 0, 0, -1;
  EXPECT_THROW(FinDimBanachSpace::ellipsoid(indefinite), PreconditionError);
}

TEST(PolygonSpace, SquareIsTheL1Ball) {
  const auto square = polygon_space(2);
  const auto l1 = FinDimBanachSpace::lp(2, 1.0);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  for (int k = 0; k < 100; ++k) {
    const RealVector x = vec({normal(rng), normal(rng)});
    EXPECT_NEAR(square.norm(x), l1.norm(x), 1e-12);
  }
}

TEST(PolygonSpace, HexagonNorms) {
  const auto hex = polygon_space(3);
  EXPECT_NEAR(hex.norm(vec({1.0, 0.0})), 1.0, 1e-15);
  const double a = M_PI / 6;
  EXPECT_NEAR(hex.norm(vec({std::cos(a), std::sin(a)})), 1.0 / std::cos(a), 1e-14);
}

TEST(PolygonSpace, VertexNormsAreOne) {
  for (int i = 2; i <= 12; ++i) {
    const auto p = polygon_space(i);
    for (int k = 0; k < 2 * i; ++k) {
      const double a = M_PI * k / i;
      EXPECT_NEAR(p.norm(vec({std::cos(a), std::sin(a)})), 1.0, 1e-14) << i;
    }
  }
  EXPECT_THROW(polygon_space(1), PreconditionError);
}

TEST(Hausdorff, IdenticalBallsAreAtDistanceZero) {
  const auto hex = standard_ball(polygon_space(3));
  EXPECT_EQ(hausdorff_distance_balls(hex, hex, FinDimBanachSpace::lp(2, 2.0)).value, 0.0);
}

TEST(Hausdorff, HexagonVersusDisk) {
  const auto r = hausdorff_distance_balls(standard_ball(polygon_space(3)), standard_ball(FinDimBanachSpace::lp(2, 2.0)),
                                          FinDimBanachSpace::lp(2, 2.0));
  EXPECT_NEAR(r.value, 1.0 - std::cos(M_PI / 6), 1e-6);
  EXPECT_LE(r.lower, r.value);
  EXPECT_LE(r.upper - r.lower, 1e-6);
}

TEST(Hausdorff, L1VersusLInfinity) {
  const auto r = hausdorff_distance_balls(standard_ball(FinDimBanachSpace::lp(2, 1.0)),
                                          standard_ball(FinDimBanachSpace::lp(2, INFINITY)), FinDimBanachSpace::lp(2, 2.0));
  EXPECT_NEAR(r.value, 1.0 / std::sqrt(2.0), 1e-6);
}

TEST(Hausdorff, TiltedDisksInThreeSpace) {
  const auto disk = FinDimBanachSpace::lp(2, 2.0);
  const auto ambient = FinDimBanachSpace::lp(3, 2.0);
  for (double theta : {0.1, 0.3}) {
    const auto r = hausdorff_distance_balls({disk, tilted_plane(0.0)}, {disk, tilted_plane(theta)}, ambient,
                                            {.tol = 1e-4});
    EXPECT_NEAR(r.value, std::sin(theta), 1e-4) << theta;
  }
}

TEST(Hausdorff, MetricAxiomsOnPlanarBalls) {
  const auto ambient = FinDimBanachSpace::lp(2, 2.0);
  const auto spaces = sample_spaces();
  std::vector<double> table(spaces.size() * spaces.size());
  for (std::size_t a = 0; a < spaces.size(); ++a)
    for (std::size_t b = 0; b < spaces.size(); ++b)
      table[a * spaces.size() + b] =
          hausdorff_distance_balls(standard_ball(spaces[a]), standard_ball(spaces[b]), ambient).value;
  const auto d = [&](std::size_t a, std::size_t b) { return table[a * spaces.size() + b]; };
  for (std::size_t a = 0; a < spaces.size(); ++a) {
    EXPECT_EQ(d(a, a), 0.0);
    for (std::size_t b = 0; b < spaces.size(); ++b) {
      EXPECT_NEAR(d(a, b), d(b, a), 1e-5);
      if (a != b) EXPECT_GT(d(a, b), 1e-5);
      for (std::size_t c = 0; c < spaces.size(); ++c) EXPECT_LE(d(a, c), d(a, b) + d(b, c) + 1e-5);
    }
  }
}

TEST(Hausdorff, RejectsHighDimensions) {
  const auto s = FinDimBanachSpace::lp(5, 2.0);
  EXPECT_THROW(hausdorff_distance_balls(standard_ball(s), standard_ball(FinDimBanachSpace::lp(5, 1.0)), s),
               CertificateError);
}

TEST(Hausdorff, BudgetExhaustionIsReported) {
  EXPECT_THROW(hausdorff_distance_balls(standard_ball(polygon_space(3)), standard_ball(FinDimBanachSpace::lp(2, 2.0)),
                                        FinDimBanachSpace::lp(2, 2.0), {.tol = 1e-12, .max_evaluations = 1000}),
               CertificateError);
}

TEST(MinExpansionSplit, MatchesClosedForm) {
  const auto disk = FinDimBanachSpace::lp(2, 2.0);
  double previous = INFINITY;
  for (int i = 2; i <= 12; ++i) {
    const auto r = min_expansion_split(disk, polygon_space(i));
    const double exact = 1.0 / std::cos(M_PI / (2 * i));
    EXPECT_NEAR(r.value, exact, 1e-6) << i;
    EXPECT_GT(r.value, 1.0);
    EXPECT_LT(r.value, previous);
    previous = r.value;
    // Independent check: the norm of the identity is the largest Euclidean length of a facet functional.
    EXPECT_NEAR(polygon_space(i).facets().rowwise().norm().maxCoeff(), exact, 1e-14);
  }
}

TEST(MinExpansionSplit, NamedExamples) {
  const auto disk = FinDimBanachSpace::lp(2, 2.0);
  EXPECT_NEAR(min_expansion_split(disk, polygon_space(2)).value, std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(min_expansion_split(disk, polygon_space(3)).value, 2.0 / std::sqrt(3.0), 1e-6);
  const double limit = min_expansion_split(disk, polygon_space(64)).value;
  EXPECT_LE(limit, 1.0004);
  EXPECT_GT(limit, 1.0);
  EXPECT_NEAR(limit, 1.0 / std::cos(M_PI / 128), 1e-6);
}

TEST(BanachOperatorNorm, ExactRoutesAgree) {
  RealMatrix t(2, 2);
  t << 1.0, 0.5, -0.25, 2.0;
  const auto l2 = FinDimBanachSpace::lp(2, 2.0);
  const auto l1 = FinDimBanachSpace::lp(2, 1.0);
  const auto linf = FinDimBanachSpace::lp(2, INFINITY);
  const double sigma = Eigen::JacobiSVD<RealMatrix>(t).singularValues()(0);
  auto r = banach_operator_norm({l2, l2, t});
  EXPECT_NEAR(r.lower, sigma, 1e-12);
  EXPECT_NEAR(r.upper, sigma, 1e-12);
  // l1 -> l1: max column sum; linf -> linf: max row sum.
  r = banach_operator_norm({l1, l1, t});
  EXPECT_NEAR(r.upper, 2.5, 1e-12);
  EXPECT_NEAR(r.lower, 2.5, 1e-12);
  r = banach_operator_norm({linf, linf, t});
  EXPECT_NEAR(r.upper, 2.25, 1e-12);
  EXPECT_NEAR(r.lower, 2.25, 1e-12);
}

TEST(BanachOperatorNorm, SampledRouteBracketsTruth) {
  // l3 -> l3 on a diagonal map has norm max |d_i|.
  RealMatrix t = RealMatrix::Zero(2, 2);
  t(0, 0) = 3.0;
  t(1, 1) = -1.0;
  const auto l3 = FinDimBanachSpace::lp(2, 3.0);
  const auto r = banach_operator_norm({l3, l3, t});
  EXPECT_LE(r.lower, 3.0 + 1e-12);
  EXPECT_GE(r.upper, 3.0 - 1e-12);
  EXPECT_NEAR(r.lower, 3.0, 1e-6);
}

TEST(RescaleToContraction, Examples) {
  const auto l2 = FinDimBanachSpace::lp(2, 2.0);
  RealMatrix small(2, 2);
  small << 0.5, 0.1, 0.0, 0.3;
  auto r = rescale_to_contraction({l2, l2, small});
  EXPECT_EQ(r.scale, 1.0);
  EXPECT_EQ(r.map.matrix, small);

  r = rescale_to_contraction({l2, l2, 1.25 * identity(2)});
  EXPECT_NEAR(r.scale, 0.8, 1e-15);
  EXPECT_LE(r.norm.upper, 1.0 + 1e-15);

  RealMatrix l(2, 2);
  l << 0.0, 0.1, 0.0, 0.0;
  r = rescale_to_contraction({l2, l2, identity(2) + l});
  EXPECT_GE(r.scale, 1.0 / 1.1);
  EXPECT_LE(r.norm.upper, 1.0 + 1e-15);
}

TEST(RescaleToContraction, ScaleTendsToOne) {
  const auto l2 = FinDimBanachSpace::lp(2, 2.0);
  double previous = 0.0;
  for (double excess : {0.5, 0.1, 0.01, 0.001}) {
    const double s = rescale_to_contraction({l2, l2, (1 + excess) * identity(2)}).scale;
    EXPECT_GT(s, previous);
    previous = s;
  }
  EXPECT_NEAR(previous, 1.0 / 1.001, 1e-15);
}

TEST(GraphApproximate, SameSubspaceGivesZero) {
  const auto g = graph_approximate(tilted_plane(0.0), tilted_plane(0.0));
  EXPECT_LE(g.map.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(GraphApproximate, LineOverTheAxis) {
  RealMatrix f(2, 1), fi(2, 1);
  f << 1, 0;
  fi << 1, 0.3;
  const auto g = graph_approximate(f, fi);
  EXPECT_NEAR(std::abs(g.map(0, 0)), 0.3, 1e-14);
  // The recovered graph spans fi.
  const RealMatrix basis = g.graph_basis();
  EXPECT_NEAR(basis(0, 0) * fi(1, 0) - basis(1, 0) * fi(0, 0), 0.0, 1e-14);
}

TEST(GraphApproximate, TiltedPlaneHasTangentNorm) {
  for (double theta : {0.05, 0.2, 0.6, 1.0}) {
    const auto g = graph_approximate(tilted_plane(0.0), tilted_plane(theta));
    EXPECT_NEAR(g.map_norm(), std::tan(theta), 1e-12) << theta;
  }
}

TEST(GraphApproximate, RecoversConstructedGraphs) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (int k = 0; k < 50; ++k) {
    RealMatrix f(4, 2);
    for (Index i = 0; i < f.size(); ++i) f(i) = normal(rng);
    auto frame = complement_frame(f);
    RealMatrix l(2, 2);
    for (Index i = 0; i < l.size(); ++i) l(i) = 0.3 * normal(rng);
    frame.map = l;
    const auto recovered = graph_approximate(f, frame.graph_basis());
    EXPECT_LE((recovered.map - l).cwiseAbs().maxCoeff(), 1e-10);
    // Full rank of the concatenated frames.
    RealMatrix both(4, 4);
    both << recovered.base, recovered.complement;
    EXPECT_NEAR(std::abs(both.determinant()), 1.0, 1e-12);
  }
}

TEST(GraphApproximate, MapNormIsMonotoneInHausdorffDistance) {
  const auto disk = FinDimBanachSpace::lp(2, 2.0);
  const auto ambient = FinDimBanachSpace::lp(3, 2.0);
  double last_norm = -1.0, last_distance = -1.0;
  for (double theta : {0.05, 0.15, 0.3}) {
    const double norm = graph_approximate(tilted_plane(0.0), tilted_plane(theta)).map_norm();
    const double distance =
        hausdorff_distance_balls({disk, tilted_plane(0.0)}, {disk, tilted_plane(theta)}, ambient, {.tol = 1e-4}).value;
    EXPECT_GT(norm, last_norm);
    EXPECT_GT(distance, last_distance);
    last_norm = norm;
    last_distance = distance;
  }
}

TEST(GraphApproximate, OrthogonalSubspaceIsSingular) {
  RealMatrix f(2, 1), fi(2, 1);
  f << 1, 0;
  fi << 0, 1;
  EXPECT_THROW(graph_approximate(f, fi), SingularError);
}

}  // namespace
}  // namespace stabilize
