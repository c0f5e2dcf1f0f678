#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

namespace stabilize {
namespace {

using testing::random_element;

const Block kC1{Field::Complex, 1};
const Block kC2{Field::Complex, 2};
const Block kC3{Field::Complex, 3};

/// M2 -> M4 -> M8 by a -> diag(a, a).
Tower doubling_tower() { return build_af_tower({kC2}, {{{{2}}, {}}, {{{2}}, {}}}); }

double max_entry_gap(const LinearMap& a, const LinearMap& b) {
  return (a.coefficients() - b.coefficients()).cwiseAbs().maxCoeff();
}

TEST(BuildAfTower, ConstantScalarTower) {
  const auto t = build_af_tower({kC1}, {{{{1}}, {}}, {{{1}}, {}}});
  EXPECT_EQ(t.size(), 3u);
  EXPECT_EQ(t.map(0, 2).coefficients(), Matrix::Identity(1, 1));
}

TEST(BuildAfTower, DoublingTowerMatchesExplicitBlocks) {
  const auto t = doubling_tower();
  EXPECT_EQ(t.stage(2)->blocks()[0].n, 8);
  std::mt19937_64 rng(1);
  const auto a = random_element(t.stage(0), rng);
  Matrix expected = Matrix::Zero(8, 8);
  for (int k = 0; k < 4; ++k) expected.block(2 * k, 2 * k, 2, 2) = a.block(0);
  EXPECT_LE((t.to_colimit(0).apply(a.coords()).block(0) - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE(max_entry_gap(t.steps()[0].then(t.steps()[1]), t.map(0, 2)), 1e-12);
  for (const auto& step : t.steps()) {
    EXPECT_LE(basis_defect(step), 1e-12);
    EXPECT_LE(operator_norm(step.apply(step.source()->unit()) - AlgebraElement::identity(step.target())), 1e-15);
  }
}

TEST(BuildAfTower, MixedBlocksAreIsometric) {
  // C + M2 -> M3 + M2 with C + M2 -> M3 and 2 C -> M2.
  const auto t = build_af_tower({kC1, kC2}, {{{{1, 1}, {2, 0}}, {3, 2}}});
  EXPECT_EQ(t.stage(1)->blocks(), (std::vector<Block>{kC3, kC2}));
  std::mt19937_64 rng(2);
  for (int k = 0; k < 20; ++k) {
    const auto a = random_element(t.stage(0), rng);
    EXPECT_NEAR(operator_norm(t.to_colimit(0).apply(a.coords())), operator_norm(a), 1e-12);
  }
}

TEST(BuildAfTower, RejectsInconsistentPatterns) {
  EXPECT_THROW(build_af_tower({kC2}, {{{{1}}, {3}}}), PreconditionError);
  EXPECT_THROW(build_af_tower({kC2}, {{{{0}}, {}}}), PreconditionError);
  EXPECT_THROW(build_af_tower({kC1, kC2}, {{{{1, 0}}, {}}}), PreconditionError);
  EXPECT_THROW(build_af_tower({kC2}, {{{{-1}}, {}}}), PreconditionError);
}

TEST(Tower, RejectsNonMultiplicativeSteps) {
  auto c = construct_algebra({kC1});
  auto m2 = construct_algebra({kC2});
  // a -> a E11 is unital only up to the missing E22.
  std::vector<AlgebraElement> images{AlgebraElement::matrix_unit(m2, 0, 0, 0)};
  EXPECT_THROW(Tower({c, m2}, {LinearMap::from_images(c, images)}, TowerKind::Isometric), PreconditionError);
}

TEST(BuildSurjectiveTower, ConstantAndProjection) {
  const auto constant = build_surjective_tower({kC2}, {{{0}}, {{0}}});
  EXPECT_EQ(constant.map(0, 2).coefficients(), Matrix::Identity(4, 4));
  const auto t = build_surjective_tower({kC2, kC2}, {{{0}}});
  auto x = AlgebraElement::identity(t.stage(0));
  EXPECT_LE(operator_norm(t.to_colimit(0).apply(x.coords()) - AlgebraElement::identity(t.stage(1))), 0.0);
}

TEST(BuildSurjectiveTower, CompositeIsFunctorial) {
  const auto t = build_surjective_tower({kC2, kC3}, {{{1}}, {{0}}});
  EXPECT_LE(max_entry_gap(t.steps()[0].then(t.steps()[1]), t.map(0, 2)), 1e-12);
  EXPECT_EQ(t.stage(2)->blocks()[0], kC3);
  EXPECT_THROW(build_surjective_tower({kC2}, {{{0, 0}}}), PreconditionError);
  EXPECT_THROW(build_surjective_tower({kC2}, {{{1}}}), PreconditionError);
}

TEST(FactorThroughStage, AlreadyFactoredRepresentation) {
  const auto t = doubling_tower();
  const auto rho = rotation_representation(3);
  const auto phi = pushforward(rho, t.to_colimit(0));
  const auto r = factor_through_stage(phi, t, 1e-3);
  EXPECT_EQ(r.stage, 0u);
  EXPECT_LE(r.distance, 1e-12);
  EXPECT_EQ(r.iterations, 0);
}

TEST(FactorThroughStage, PerturbedAtTheTop) {
  const auto t = doubling_tower();
  const auto phi = perturb(pushforward(rotation_representation(3), t.to_colimit(0)), 0.005, 11);
  const auto r = factor_through_stage(phi, t, 0.1);
  EXPECT_EQ(r.stage, 0u);
  EXPECT_LE(r.distance, 0.1);
  EXPECT_LE(r.defect_after, 1e-10);
  EXPECT_LE(rep_defect(r.representation), 1e-10);
  EXPECT_LE(r.residual, 0.05);
  EXPECT_NEAR(r.distance, rep_distance(pushforward(r.representation, t.to_colimit(0)), phi), 1e-15);
}

TEST(FactorThroughStage, MinimalStageIsReturned) {
  // A representation genuinely living at stage 1 has residual > eps/2 at stage 0.
  const auto t = doubling_tower();
  const auto rho = regular_representation(make_group(FiniteGroup::cyclic(4)));
  const auto phi = pushforward(rho, t.map(1, 2));
  const auto r = factor_through_stage(phi, t, 0.1);
  EXPECT_EQ(r.stage, 1u);
  EXPECT_LE(r.distance, 1e-12);
}

TEST(FactorThroughStage, EpsilonTooSmallForTheTower) {
  const auto t = doubling_tower();
  const auto phi = perturb(pushforward(rotation_representation(3), t.to_colimit(0)), 0.01, 5);
  EXPECT_THROW(factor_through_stage(phi, t, 1e-6), NotFoundError);
  EXPECT_THROW(factor_through_stage(phi, build_surjective_tower({Block{Field::Complex, 8}}, {}), 0.1),
               PreconditionError);
}

TEST(FactorThroughStage, DistanceMayBePositive) {
  const auto t = doubling_tower();
  const auto phi = perturb(pushforward(rotation_representation(3), t.to_colimit(0)), 0.005, 11);
  EXPECT_GT(factor_through_stage(phi, t, 0.1).distance, 0.0);
}

TEST(FactorThroughStage, HomSpaceEmbeddingIsIsometric) {
  const auto t = doubling_tower();
  std::mt19937_64 rng(3);
  const auto rho = rotation_representation(5);
  for (int k = 0; k < 20; ++k) {
    const auto a = perturb(rho, 0.1, rng());
    const auto b = perturb(rho, 0.1, rng());
    EXPECT_NEAR(rep_distance(a, b), rep_distance(pushforward(a, t.to_colimit(0)), pushforward(b, t.to_colimit(0))),
                1e-10);
  }
}

TEST(LiftAlongSurjections, ConstantTowerReturnsPhi) {
  const auto t = build_surjective_tower({kC2}, {{{0}}});
  const auto phi = rotation_representation(4);
  const auto r = lift_along_surjections(phi, t);
  EXPECT_EQ(r.stage, 0u);
  EXPECT_LE(rep_distance(r.representation, phi), 1e-12);
}

TEST(LiftAlongSurjections, FirstCoordinateProjection) {
  const auto t = build_surjective_tower({kC2, kC2}, {{{0}}});
  const auto phi = rotation_representation(6);
  const auto r = lift_along_surjections(phi, t);
  EXPECT_EQ(r.stage, 0u);
  EXPECT_LE(r.residual, 1e-8);
  EXPECT_LE(rep_defect(r.representation), 1e-10);
  // Explicit section: the lift is (phi, 1).
  for (int g = 0; g < 6; ++g) {
    EXPECT_LE((r.representation(g).block(0) - phi(g).block(0)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((r.representation(g).block(1) - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(LiftAlongSurjections, ThreeStageTower) {
  const auto t = build_surjective_tower({kC2, kC3}, {{{1}}, {{0}}});
  const auto phi = standard_representation(make_group(FiniteGroup::symmetric4()));
  ASSERT_EQ(phi.target()->blocks()[0].n, 3);
  const auto r = lift_along_surjections(phi, t);
  EXPECT_LE(r.residual, 1e-8);
  EXPECT_LE(rep_distance(pushforward(r.representation, t.to_colimit(r.stage)), phi), 1e-8);
}

TEST(LiftWithApproximant, ConjugatesTheApproximantOntoPhi) {
  const auto t = build_surjective_tower({kC2, kC2}, {{{0}}});
  const auto rho = standard_representation(make_group(FiniteGroup::symmetric3()));
  std::mt19937_64 rng(4);
  const auto v = testing::random_unitary_near_one(rho.target(), 0.1, rng);
  const auto phi = conjugate(rho, v);
  std::vector<AlgebraElement> values;
  for (const auto& x : rho.values())
    values.emplace_back(t.stage(0), std::vector<Matrix>{x.block(0), x.block(0)});
  const Representation approximant(rho.group(), t.stage(0), values);
  const auto r = lift_with_approximant(phi, t, 0, approximant);
  EXPECT_LE(r.residual, 1e-10);
  EXPECT_GT(r.conjugator_distance, 0.0);
  EXPECT_LT(r.conjugator_distance, 0.5);
  EXPECT_TRUE(r.representation.unitary());
}

TEST(LiftWithApproximant, GuardRejectsDistantConjugator) {
  // For an irreducible rho, averaging rho(t) R^-1 rho(t)^-1 gives tr(R^-1)/2, so u = cos(a) R and ||u - 1|| = sin(a).
  const auto t = build_surjective_tower({kC2, kC2}, {{{0}}});
  const auto rho = standard_representation(make_group(FiniteGroup::symmetric3()));
  const double a = std::asin(0.7);
  Matrix r(2, 2);
  r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  const auto phi = conjugate(rho, AlgebraElement(rho.target(), {r}));
  std::vector<AlgebraElement> values;
  for (const auto& x : rho.values()) values.emplace_back(t.stage(0), std::vector<Matrix>{x.block(0), x.block(0)});
  const Representation approximant(rho.group(), t.stage(0), values);
  const auto u = average_intertwiner(pushforward(approximant, t.to_colimit(0)), phi);
  EXPECT_NEAR(operator_norm(u - AlgebraElement::identity(phi.target())), 0.7, 1e-12);
  EXPECT_THROW(lift_with_approximant(phi, t, 0, approximant), PreconditionError);
}

TEST(SupMetric, EqualMapsGiveZero) {
  const auto t = doubling_tower();
  std::mt19937_64 rng(5);
  std::vector<AlgebraElement> f;
  for (int p = 0; p < 3; ++p) f.push_back(random_element(t.stage(0), rng));
  const auto r = check_sup_metric_equality(FiniteMetricSpace::on_line({0, 1, 2}), t, 0, f, f);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
  EXPECT_EQ(r.gap, 0.0);
}

TEST(SupMetric, ConstantTowerIsPointwiseMax) {
  const auto t = build_af_tower({kC2}, {{{{1}}, {}}});
  std::mt19937_64 rng(6);
  std::vector<AlgebraElement> f, g;
  for (int p = 0; p < 2; ++p) {
    f.push_back(random_element(t.stage(0), rng));
    g.push_back(random_element(t.stage(0), rng));
  }
  const double expected = std::max(operator_norm(f[0] - g[0]), operator_norm(f[1] - g[1]));
  const auto r = check_sup_metric_equality(FiniteMetricSpace::on_line({0, 1}), t, 0, f, g);
  EXPECT_NEAR(r.lhs, expected, 1e-14);
  EXPECT_NEAR(r.rhs, expected, 1e-14);
}

TEST(SupMetric, GapVanishesOnIsometricTowers) {
  const auto t = doubling_tower();
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    std::vector<AlgebraElement> f, g;
    for (int p = 0; p < 3; ++p) {
      f.push_back(random_element(t.stage(0), rng));
      g.push_back(random_element(t.stage(0), rng));
    }
    EXPECT_LE(check_sup_metric_equality(FiniteMetricSpace::on_line({0, 1, 2}), t, 0, f, g).gap, 1e-10);
  }
  EXPECT_THROW(check_sup_metric_equality(FiniteMetricSpace::on_line({0}), build_surjective_tower({kC2}, {}), 0,
                                         {AlgebraElement::identity(t.stage(0))}, {AlgebraElement::identity(t.stage(0))}),
               PreconditionError);
}

}  // namespace
}  // namespace stabilize
