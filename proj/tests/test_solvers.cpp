#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "extell/errors.hpp"
#include "extell/instances.hpp"
#include "extell/solvers.hpp"

using namespace extell;

namespace {

double quadric_volume(const QuadricEllipsoid& q) {
  return unit_ball_volume(q.dim()) / std::sqrt(q.shape().matrix().determinant());
}

SolverConfig quiet() {
  SolverConfig cfg;
  cfg.probe_trials = 0;
  return cfg;
}

HPolytope square_box() { return HPolytope::box(2, 1.0); }

void expect_encloses(const SolveResult& r, const std::vector<Vector>& pts) {
  ASSERT_TRUE(r.quadric.has_value());
  for (const auto& x : pts) EXPECT_GE(membership_slack(*r.quadric, x), -1e-9);
}

}  // namespace

TEST(SolverConfig, ValidateRejectsBadValues) {
  SolverConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.objective_tol = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.multistart = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.penalty_growth = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Khachiyan, DiamondGivesUnitCircle) {
  const std::vector<Vector> pts{Vector{{1.0, 0.0}}, Vector{{-1.0, 0.0}}, Vector{{0.0, 1.0}}, Vector{{0.0, -1.0}}};
  const auto r = khachiyan_mvee(pts, 1e-9);
  ASSERT_TRUE(r.quadric.has_value());
  EXPECT_LT((r.quadric->shape().matrix() - Matrix::Identity(2, 2)).norm(), 1e-6);
  EXPECT_LT(r.quadric->center().norm(), 1e-9);
}

TEST(Khachiyan, SquareCornersGiveCircleOfRadiusRootTwo) {
  const auto r = khachiyan_mvee(square_corners(), 1e-9);
  ASSERT_TRUE(r.quadric.has_value());
  EXPECT_LT((r.quadric->shape().matrix() - 0.5 * Matrix::Identity(2, 2)).norm(), 1e-6);
  EXPECT_NEAR(quadric_volume(*r.quadric), 2.0 * std::numbers::pi, 1e-5);
}

TEST(Khachiyan, CollinearPointsReportRank) {
  const std::vector<Vector> pts{Vector{{0.0, 0.0}}, Vector{{1.0, 1.0}}, Vector{{2.0, 2.0}}, Vector{{-1.0, -1.0}}};
  const auto r = khachiyan_mvee(pts);
  ASSERT_TRUE(r.rank.has_value());
  EXPECT_EQ(*r.rank, 1);
  // the flat image spans the segment from (-1,-1) to (2,2)
  const auto img = to_image(r.ellipsoid);
  EXPECT_LT((img.t() - Vector{{0.5, 0.5}}).norm(), 1e-5);
  EXPECT_NEAR(semi_axes(img).a[1], 1.5 * std::sqrt(2.0), 1e-5);
  EXPECT_NEAR(semi_axes(img).a[0], 0.0, 1e-9);
}

TEST(SolveMinEnclosing, SquareVolumeIsCircle) {
  const auto pts = square_corners();
  const auto r = solve_min_enclosing(pts, builtin("volume"), quiet());
  EXPECT_TRUE(r.converged) << r.message;
  expect_encloses(r, pts);
  EXPECT_LT((r.quadric->shape().matrix() - 0.5 * Matrix::Identity(2, 2)).norm(), 1e-7);
  EXPECT_NEAR(r.objective, 2.0 * std::numbers::pi, 1e-8);
}

TEST(SolveMinEnclosing, MatchesKhachiyanOnClouds) {
  Rng rng(70);
  for (int trial = 0; trial < 6; ++trial) {
    const int d = 2 + trial % 2;
    const auto pts = random_cloud(rng, d, 40);
    const auto g = solve_min_enclosing(pts, builtin("volume"), quiet());
    const auto k = khachiyan_mvee(pts, 1e-6);
    ASSERT_TRUE(g.converged) << g.message;
    expect_encloses(g, pts);
    const double vg = quadric_volume(*g.quadric);
    const double vk = quadric_volume(*k.quadric);
    EXPECT_LE(std::abs(vg - vk), 1e-4 * vk);
    EXPECT_LE(vg, vk * (1.0 + 1e-9));
  }
}

TEST(SolveMinEnclosing, InactivePointsDoNotMatter) {
  Rng rng(71);
  const auto pts = random_cloud(rng, 2, 60);
  const auto full = solve_min_enclosing(pts, builtin("volume"), quiet());
  ASSERT_TRUE(full.converged);
  std::vector<Vector> contact;
  for (const auto& x : pts)
    if (membership_slack(*full.quadric, x) < 1e-6) contact.push_back(x);
  EXPECT_GE(static_cast<int>(contact.size()), 3);
  const auto reduced = solve_min_enclosing(contact, builtin("volume"), quiet());
  ASSERT_TRUE(reduced.converged);
  EXPECT_LT((reduced.quadric->shape().matrix() - full.quadric->shape().matrix()).norm(), 1e-6);
  EXPECT_LT((reduced.quadric->center() - full.quadric->center()).norm(), 1e-6);
}

TEST(SolveMinEnclosing, MeritTraceMonotoneWithinRounds) {
  Rng rng(72);
  const auto r = solve_min_enclosing(random_cloud(rng, 3, 50), builtin("sqrt_sum"), quiet());
  ASSERT_FALSE(r.trace.empty());
  for (std::size_t i = 1; i < r.trace.size(); ++i)
    if (r.trace[i].round == r.trace[i - 1].round) EXPECT_LE(r.trace[i].merit, r.trace[i - 1].merit);
}

TEST(SolveMinEnclosing, DuplicatedPointDoesNotConverge) {
  const std::vector<Vector> pts(5, Vector{{0.3, -0.2}});
  const auto r = solve_min_enclosing(pts, builtin("volume"), quiet());
  EXPECT_FALSE(r.converged);
  ASSERT_TRUE(r.rank.has_value());
  EXPECT_EQ(*r.rank, 0);
}

TEST(SolveMinEnclosing, ProbeGateWarnsForNonConvexSize) {
  SolverConfig cfg;
  cfg.probe_trials = 200;
  const auto r = solve_min_enclosing(square_corners(), builtin("square_counterexample"), cfg);
  EXPECT_FALSE(r.warnings.empty());
  const auto ok = solve_min_enclosing(square_corners(), builtin("volume"), cfg);
  EXPECT_TRUE(ok.warnings.empty());
}

TEST(SolveMaxInscribed, BoxVolumeIsUnitDisc) {
  const auto r = solve_max_inscribed(square_box(), builtin("volume"), quiet());
  EXPECT_TRUE(r.converged) << r.message;
  EXPECT_LT((r.ellipsoid.P().matrix() - Matrix::Identity(2, 2)).norm(), 1e-7);
  EXPECT_LT(r.ellipsoid.t().norm(), 1e-7);
  EXPECT_GE(r.feasibility_slack, -1e-9);
  EXPECT_TRUE(ellipsoid_in_polytope(r.ellipsoid, square_box()).inside);
}

TEST(SolveMaxInscribed, TriangleVolumeIsIncircle) {
  const auto tri = HPolytope::equilateral_triangle(1.0);
  const auto r = solve_max_inscribed(tri, builtin("volume"), quiet());
  EXPECT_TRUE(r.converged) << r.message;
  const Vector axes = semi_axes(r.ellipsoid).a;
  EXPECT_NEAR(axes[0], std::sqrt(3.0) / 6.0, 1e-7);
  EXPECT_NEAR(axes[1], std::sqrt(3.0) / 6.0, 1e-7);
  EXPECT_LT((r.ellipsoid.t() - Vector{{0.5, std::sqrt(3.0) / 6.0}}).norm(), 1e-7);
}

TEST(SolveMaxInscribed, FixedCenterSqrtSumOnBox) {
  const auto r = solve_max_inscribed(square_box(), builtin("sqrt_sum"), quiet(), Vector::Zero(2));
  EXPECT_TRUE(r.converged);
  EXPECT_LT((r.ellipsoid.P().matrix() - Matrix::Identity(2, 2)).norm(), 1e-7);
  EXPECT_EQ(r.ellipsoid.t(), Vector::Zero(2));
}

TEST(SolveMaxInscribed, PreflightRejectsUnboundedAndEmpty) {
  const HPolytope half({HalfSpace{Vector{{1.0, 0.0}}, 1.0}, HalfSpace{Vector{{-1.0, 0.0}}, 1.0},
                        HalfSpace{Vector{{0.0, 1.0}}, 1.0}});
  try {
    solve_max_inscribed(half, builtin("volume"), quiet());
    FAIL() << "unbounded polytope accepted";
  } catch (const PreflightError& e) {
    ASSERT_EQ(e.certificate().size(), 2u);
    EXPECT_LT(e.certificate()[1], -0.99);
  }
  const HPolytope slab({HalfSpace{Vector{{1.0, 0.0}}, 0.0}, HalfSpace{Vector{{-1.0, 0.0}}, 0.0},
                        HalfSpace{Vector{{0.0, 1.0}}, 1.0}, HalfSpace{Vector{{0.0, -1.0}}, 1.0}});
  EXPECT_THROW(solve_max_inscribed(slab, builtin("volume"), quiet()), PreflightError);
}

TEST(SolveMaxInscribed, CenterOutsideReportsRow) {
  try {
    solve_max_inscribed_fixed_center_dual(square_box(), Vector{{1.5, 0.0}}, builtin("sqrt_sum"), quiet());
    FAIL() << "exterior center accepted";
  } catch (const PreflightError& e) {
    EXPECT_GE(e.row(), 0);
    EXPECT_NEAR(square_box().rows()[static_cast<std::size_t>(e.row())].a[0], 1.0, 1e-15);
  }
}

TEST(SolveDual, BoxCenteredGivesIdentity) {
  const auto r = solve_max_inscribed_fixed_center_dual(square_box(), Vector::Zero(2), builtin("sqrt_sum"), quiet());
  EXPECT_TRUE(r.converged) << r.message;
  ASSERT_TRUE(r.dual_block.has_value());
  EXPECT_LT((r.dual_block->matrix() - Matrix::Identity(2, 2)).norm(), 1e-7);
}

TEST(SolveDual, AgreesWithAffineFixedCenter) {
  const Vector m{{0.5, 0.0}};
  const auto dual = solve_max_inscribed_fixed_center_dual(square_box(), m, builtin("sqrt_sum"), quiet());
  const auto affine = solve_max_inscribed(square_box(), builtin("sqrt_sum"), quiet(), m);
  ASSERT_TRUE(dual.converged);
  ASSERT_TRUE(affine.converged);
  const Matrix q_affine = affine.ellipsoid.P().matrix() * affine.ellipsoid.P().matrix();
  EXPECT_LT((dual.dual_block->matrix() - q_affine).norm(), 1e-6);
  EXPECT_NEAR(dual.objective, affine.objective, 1e-6);
}

TEST(SolveDual, BlockSatisfiesLinearConstraints) {
  const auto tri = HPolytope::equilateral_triangle(1.0);
  const Vector m{{0.45, 0.3}};
  const auto r = solve_max_inscribed_fixed_center_dual(tri, m, builtin("sqrt_sum"), quiet());
  ASSERT_TRUE(r.dual_block.has_value());
  for (const auto& row : tri.rows()) {
    const double s = row.b - row.a.dot(m);
    EXPECT_LE(row.a.dot(r.dual_block->matrix() * row.a), s * s + 1e-9);
  }
}

TEST(ProblemJson, ParsesPointsAndHalfspaces) {
  const auto pj = nlohmann::json::parse(R"({"points": [[1, 1], [-1, 1], [1, -1], [-1, -1]]})");
  const auto p = problem_from_json(pj, ProblemMode::Enclose);
  EXPECT_EQ(p.points.size(), 4u);
  EXPECT_EQ(p.dim(), 2);
  const auto hj = nlohmann::json::parse(R"({"halfspaces": [{"a": [1, 0], "b": 1}, {"a": [-1, 0], "b": 1},
                                             {"a": [0, 2], "b": 2}, {"a": [0, -1], "b": 1}], "center": [0, 0]})");
  const auto h = problem_from_json(hj, ProblemMode::InscribeDual);
  ASSERT_TRUE(h.polytope.has_value());
  EXPECT_NEAR(h.polytope->rows()[2].b, 1.0, 1e-15);
  ASSERT_TRUE(h.center.has_value());
  EXPECT_THROW(problem_from_json(hj, ProblemMode::Enclose), std::invalid_argument);
}

TEST(Uniqueness, SquareVolumeSingleCluster) {
  Problem p;
  p.points = square_corners();
  const auto r = multistart_uniqueness(p, builtin("volume"), 8, 3, quiet());
  EXPECT_EQ(r.cluster_count(), 1);
  EXPECT_EQ(r.failed_starts, 0);
  EXPECT_FALSE(r.spread_flagged);
}

TEST(Uniqueness, SquareCounterexampleTwoAxisSwappedClusters) {
  Problem p;
  p.points = square_corners();
  SolverConfig cfg = quiet();
  cfg.jobs = 4;
  const auto r = multistart_uniqueness(p, builtin("square_counterexample"), 12, 3, cfg);
  ASSERT_EQ(r.cluster_count(), 2);
  EXPECT_EQ(r.candidate_count(), 2);
  EXPECT_LE(r.objective_spread, 1e-6);
  for (const auto& c : r.clusters) EXPECT_NEAR(c.objective, 19.9248, 1e-3);
  const Vector a0 = semi_axes(r.clusters[0].representative.ellipsoid).a;
  const Vector a1 = semi_axes(r.clusters[1].representative.ellipsoid).a;
  EXPECT_LT((a0 - a1).norm(), 1e-5);
  const Matrix s0 = r.clusters[0].representative.quadric->shape().matrix();
  const Matrix s1 = r.clusters[1].representative.quadric->shape().matrix();
  EXPECT_NEAR(s0(0, 0), s1(1, 1), 1e-5);
  EXPECT_GT(r.min_inter_distance, kClusterThreshold);
}

TEST(Uniqueness, TriangleArcLengthHasSeveralCandidatesAtTwo) {
  Problem p;
  p.mode = ProblemMode::Inscribe;
  p.polytope = HPolytope::equilateral_triangle(1.0);
  SolverConfig cfg = quiet();
  cfg.jobs = 4;
  const auto r = multistart_uniqueness(p, builtin("arc_length"), 8, 5, cfg);
  EXPECT_GE(r.candidate_count(), 2);
  const auto best = std::max_element(r.clusters.begin(), r.clusters.end(),
                                     [](const Cluster& a, const Cluster& b) { return a.objective < b.objective; });
  ASSERT_NE(best, r.clusters.end());
  EXPECT_NEAR(best->objective, 2.0, 1e-4);
  EXPECT_GT(best->objective, std::numbers::pi / std::sqrt(3.0));
}

TEST(SolveResultJson, CarriesBothViews) {
  const auto r = solve_min_enclosing(square_corners(), builtin("volume"), quiet());
  const auto j = to_json_value(r);
  EXPECT_TRUE(j.contains("ellipsoid"));
  EXPECT_TRUE(j.contains("quadric"));
  EXPECT_TRUE(j.contains("objective"));
  EXPECT_TRUE(j.contains("converged"));
}
