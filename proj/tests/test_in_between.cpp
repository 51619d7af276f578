#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "extell/errors.hpp"
#include "extell/in_between.hpp"
#include "extell/instances.hpp"
#include "extell/lemma_checks.hpp"
#include "extell/size_function.hpp"

using namespace extell;

namespace {

double det_volume(const QuadricEllipsoid& e) {
  return unit_ball_volume(e.dim()) / std::sqrt(e.shape().matrix().determinant());
}

}  // namespace

TEST(InBetween, EndpointsAreReturnedUnchanged) {
  Rng rng(50);
  const auto q0 = random_ellipsoid(rng, 3);
  const auto q1 = random_ellipsoid(rng, 3);
  for (auto mode : {AffineMode::Image, AffineMode::PreImage}) {
    const AffineMap a = mode == AffineMode::Image ? quadric_to_affine(q0) : quadric_to_preimage(q0);
    const AffineMap b = mode == AffineMode::Image ? quadric_to_affine(q1) : quadric_to_preimage(q1);
    const InBetweenFamily fam(a, b);
    const auto at0 = std::get<AffineMap>(fam.at(0.0));
    const auto at1 = std::get<AffineMap>(fam.at(1.0));
    EXPECT_EQ(at0.P().matrix(), a.P().matrix());
    EXPECT_EQ(at0.t(), a.t());
    EXPECT_EQ(at1.P().matrix(), b.P().matrix());
    EXPECT_EQ(at1.t(), b.t());
  }
}

TEST(InBetween, LambdaOutsideUnitIntervalThrows) {
  const auto a = quadric_to_affine(QuadricEllipsoid(Vector::Zero(2), SymMatrix::identity(2)));
  EXPECT_THROW(between_image(a, a, -0.1), std::out_of_range);
  EXPECT_THROW(between_image(a, a, 1.5), std::out_of_range);
  EXPECT_THROW(between_image(a, a, std::nan("")), std::out_of_range);
}

TEST(InBetween, ModeAndDimensionMismatchThrow) {
  const QuadricEllipsoid q(Vector::Zero(2), SymMatrix::identity(2));
  const QuadricEllipsoid q3(Vector::Zero(3), SymMatrix::identity(3));
  EXPECT_THROW(between_image(quadric_to_affine(q), quadric_to_preimage(q), 0.5), std::invalid_argument);
  EXPECT_THROW(between_image(quadric_to_affine(q), quadric_to_affine(q3), 0.5), std::invalid_argument);
  EXPECT_THROW(InBetweenFamily(quadric_to_affine(q), quadric_to_preimage(q)), std::invalid_argument);
}

TEST(InBetween, ImageMembersAreMinkowskiCombinations) {
  // P_l y + t_l = (1 - l)(P0 y + t0) + l (P1 y + t1) with both summands on the endpoints
  Rng rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 2;
    const auto a = quadric_to_affine(random_ellipsoid(rng, d));
    const auto b = quadric_to_affine(random_ellipsoid(rng, d));
    const double lambda = rng.uniform();
    const auto m = between_image(a, b, lambda);
    const Vector y = rng.unit_vector(d);
    const Vector x0 = boundary_point(a, y);
    const Vector x1 = boundary_point(b, y);
    EXPECT_GT(membership_slack(a, x0), -1e-9);
    EXPECT_GT(membership_slack(b, x1), -1e-9);
    EXPECT_LT((boundary_point(m, y) - ((1.0 - lambda) * x0 + lambda * x1)).norm(), 1e-12);
  }
}

TEST(InBetween, PreImageMembersContainSampledIntersection) {
  Rng rng(52);
  for (int trial = 0; trial < 50; ++trial) {
    const auto q0 = random_ellipsoid(rng, 2, 0.5, 2.0, 0.3);
    const auto q1 = random_ellipsoid(rng, 2, 0.5, 2.0, 0.3);
    const auto a = quadric_to_preimage(q0);
    const auto b = quadric_to_preimage(q1);
    for (int s = 0; s < 200; ++s) {
      const Vector x{{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)}};
      if (!contains_point(q0, x) || !contains_point(q1, x)) continue;
      for (double lambda : standard_lambda_grid()) {
        const auto m = between_preimage(a, b, lambda);
        EXPECT_LE((m.P().matrix() * x + m.t()).norm(), 1.0 + 1e-12);
      }
    }
  }
}

TEST(InBetween, HomogeneousMidpointIsAnEllipsoidContainingIntersection) {
  Rng rng(53);
  for (int trial = 0; trial < 50; ++trial) {
    const auto q0 = random_ellipsoid(rng, 2, 1.0, 2.0, 0.2);
    const auto q1 = random_ellipsoid(rng, 2, 1.0, 2.0, 0.2);
    const auto m = between_homogeneous(quadric_to_homogeneous(q0), quadric_to_homogeneous(q1), 0.5);
    ASSERT_TRUE(m.is_ellipsoid);
    for (int s = 0; s < 100; ++s) {
      const Vector x = rng.normal_vector(2);
      if (contains_point(q0, x) && contains_point(q1, x)) EXPECT_GT(membership_slack(*m.ellipsoid, x), -1e-9);
    }
  }
}

TEST(InBetween, DualFamilyOfDisjointCirclesLeavesEllipsoidsEarly) {
  // Q(l) = diag(4 (1 - 2l)^2 - 3, 1) is PD only for l < (2 - sqrt 3) / 4 or l > (2 + sqrt 3) / 4
  const QuadricEllipsoid c0(Vector{{2.0, 0.0}}, SymMatrix::identity(2));
  const QuadricEllipsoid c1(Vector{{-2.0, 0.0}}, SymMatrix::identity(2));
  const auto n0 = quadric_to_dual_homogeneous(c0);
  const auto n1 = quadric_to_dual_homogeneous(c1);
  const double edge = (2.0 - std::sqrt(3.0)) / 4.0;
  for (int i = 0; i <= 1000; ++i) {
    const double lambda = i / 1000.0;
    if (std::abs(lambda - edge) < 1e-3 || std::abs(lambda - (1.0 - edge)) < 1e-3) continue;
    const auto m = between_dual(n0, n1, lambda);
    EXPECT_EQ(m.is_ellipsoid, lambda < edge || lambda > 1.0 - edge) << lambda;
  }
  const auto near0 = between_dual(n0, n1, 0.05);
  ASSERT_TRUE(near0.is_ellipsoid);
  const double qx = 4.0 * std::pow(1.0 - 0.1, 2) - 3.0;
  const Vector expected_axes{{std::min(1.0, std::sqrt(qx)), std::max(1.0, std::sqrt(qx))}};
  EXPECT_LT((semi_axes(*near0.ellipsoid).a - expected_axes).norm(), 1e-12);
}

TEST(InBetween, DualRoutesThroughBlocksAndConicAgree) {
  Rng rng(54);
  for (int trial = 0; trial < 100; ++trial) {
    const auto q0 = random_ellipsoid(rng, 2, 0.5, 2.0, 1.0);
    const auto q1 = random_ellipsoid(rng, 2, 0.5, 2.0, 1.0);
    const auto m = between_dual(quadric_to_dual_homogeneous(q0), quadric_to_dual_homogeneous(q1), 0.02);
    if (!m.is_ellipsoid) continue;
    const auto conic = dual_to_point_conic(m.quadric);
    ASSERT_TRUE(conic.has_value());
    const auto viaconic = homogeneous_to_quadric(*conic);
    ASSERT_TRUE(viaconic.has_value());
    EXPECT_LT((semi_axes(*viaconic).a - semi_axes(*m.ellipsoid).a).norm(), 1e-8);
    EXPECT_LT((viaconic->center() - m.ellipsoid->center()).norm(), 1e-8);
  }
}

TEST(ContainmentChecks, ContainmentHoldsOnSmallBatches) {
  for (int d : {2, 3}) {
    const auto l1 = verify_lemma1_batch(d, 50, 7, 2);
    EXPECT_EQ(l1.violations, 0);
    EXPECT_EQ(l1.trials, 50);
    const auto l2 = verify_lemma2_batch(d, 50, 7, 2);
    EXPECT_EQ(l2.violations, 0);
    EXPECT_LT(l2.vacuous, 5);
  }
  const auto l4 = verify_lemma4_batch(50, 7, 2);
  EXPECT_EQ(l4.violations, 0);
  EXPECT_GT(l4.mean_lambda_star, 0.0);
}

TEST(ContainmentChecks, BatchesAreDeterministicAcrossJobCounts) {
  const auto a = verify_lemma1_batch(2, 30, 11, 1);
  const auto b = verify_lemma1_batch(2, 30, 11, 4);
  EXPECT_EQ(a.worst_margin, b.worst_margin);
  EXPECT_EQ(to_json_value(a).dump(), to_json_value(b).dump());
}

TEST(ContainmentChecks, HullCheckDetectsAnOutsideEllipsoid) {
  const auto e0 = quadric_to_affine(QuadricEllipsoid(Vector{{-1.0, 0.0}}, SymMatrix::identity(2)));
  const auto e1 = quadric_to_affine(QuadricEllipsoid(Vector{{1.0, 0.0}}, SymMatrix::identity(2)));
  // a tall ellipse pokes out of the stadium
  const auto tall = quadric_to_affine(QuadricEllipsoid(Vector::Zero(2), SymMatrix::diagonal(Vector{{1.0, 0.25}})));
  EXPECT_FALSE(ellipsoid_in_convex_hull(tall, e0, e1, 256).inside);
  EXPECT_TRUE(ellipsoid_in_convex_hull(between_image(e0, e1, 0.3), e0, e1, 256).inside);
}

TEST(ContainmentChecks, DualGridPrefixStopsAtFirstNonEllipsoid) {
  const QuadricEllipsoid c0(Vector{{2.0, 0.0}}, SymMatrix::identity(2));
  const QuadricEllipsoid c1(Vector{{-2.0, 0.0}}, SymMatrix::identity(2));
  const auto r = check_lemma4(c0, c1, default_lambda_grid(), 256, 1);
  EXPECT_DOUBLE_EQ(r.lambda_star_low, 0.01);
  EXPECT_DOUBLE_EQ(r.lambda_star_high, 0.99);
  EXPECT_EQ(r.violations, 0);
}

TEST(StrictBetweenness, MidpointIsStrictlySmaller) {
  const auto r = check_strict_betweenness(40, 2, 30, 5);
  EXPECT_EQ(r.pairs, 40);
  EXPECT_EQ(r.failures, 0);
  EXPECT_GT(r.smallest_gap, 1e-12);
  EXPECT_EQ(r.midpoint_not_enclosing, 0);
}

TEST(StrictBetweenness, VolumeOracleOnExplicitPair) {
  // two equal-area ellipses through the square corners; determinant oracle for the midpoint
  const double alpha = 0.3;
  const QuadricEllipsoid e0(Vector::Zero(2), SymMatrix::diagonal(Vector{{alpha, 1.0 - alpha}}));
  const QuadricEllipsoid e1(Vector::Zero(2), SymMatrix::diagonal(Vector{{1.0 - alpha, alpha}}));
  const auto mid = between_preimage(quadric_to_preimage(e0), quadric_to_preimage(e1), 0.5);
  const auto q = affine_to_quadric(mid);
  const double root = 0.5 * (std::sqrt(alpha) + std::sqrt(1.0 - alpha));
  EXPECT_NEAR(det_volume(q), std::numbers::pi / (root * root), 1e-12);
  EXPECT_LT(det_volume(q), det_volume(e0) - 1e-3);
  for (const auto& c : {Vector{{1.0, 1.0}}, Vector{{-1.0, 1.0}}})
    EXPECT_GT(membership_slack(q, c), -1e-12);
}

TEST(InBetween, ConcentricBallExamples) {
  const QuadricEllipsoid b1(Vector::Zero(2), SymMatrix::identity(2));
  const QuadricEllipsoid b3(Vector::Zero(2), SymMatrix::identity(2) * (1.0 / 9.0));
  const auto img = between_image(quadric_to_affine(b1), quadric_to_affine(b3), 0.5);
  EXPECT_LT((img.P().matrix() - 2.0 * Matrix::Identity(2, 2)).norm(), 1e-14);
  const auto pre = between_preimage(quadric_to_preimage(b1), quadric_to_preimage(b3), 0.5);
  EXPECT_LT((pre.P().matrix() - (2.0 / 3.0) * Matrix::Identity(2, 2)).norm(), 1e-14);
  const QuadricEllipsoid b2(Vector::Zero(2), SymMatrix::identity(2) * 0.25);
  const auto hom = between_homogeneous(quadric_to_homogeneous(b1), quadric_to_homogeneous(b2), 0.5);
  ASSERT_TRUE(hom.is_ellipsoid);
  EXPECT_LT((hom.ellipsoid->shape().matrix() - 0.625 * Matrix::Identity(2, 2)).norm(), 1e-14);
  const auto same = between_preimage(quadric_to_preimage(b3), quadric_to_preimage(b3), 0.37);
  EXPECT_LT((same.P().matrix() - quadric_to_preimage(b3).P().matrix()).norm(), 1e-15);
}

TEST(InBetween, OverlappingDiscsDualNearEndpointIsEllipsoid) {
  const QuadricEllipsoid c0(Vector{{0.5, 0.0}}, SymMatrix::identity(2));
  const QuadricEllipsoid c1(Vector{{-0.5, 0.0}}, SymMatrix::identity(2));
  const auto m = between_dual(quadric_to_dual(c0), quadric_to_dual(c1), 0.05);
  EXPECT_TRUE(m.is_ellipsoid);
  const auto endpoint = between_dual(quadric_to_dual(c0), quadric_to_dual(c1), 0.0);
  ASSERT_TRUE(endpoint.is_ellipsoid);
  EXPECT_LT((endpoint.ellipsoid->center() - c0.center()).norm(), 1e-12);
}
