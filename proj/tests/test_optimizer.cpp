#include <gtest/gtest.h>

#include <cmath>

#include "extell/optimizer.hpp"

using namespace extell;

namespace {

Objective rosenbrock() {
  return [](const Vector& x, Vector* g) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    if (g) {
      g->resize(2);
      (*g)[0] = -2.0 * a - 400.0 * x[0] * b;
      (*g)[1] = 200.0 * b;
    }
    return a * a + 100.0 * b * b;
  };
}

}  // namespace

TEST(Lbfgs, MinimizesRosenbrock) {
  std::vector<double> trace;
  const auto r = lbfgs_minimize(rosenbrock(), Vector{{-1.2, 1.0}}, LbfgsOptions{}, &trace);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-7);
  EXPECT_NEAR(r.x[1], 1.0, 1e-7);
  ASSERT_GT(trace.size(), 2u);
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1]);
}

TEST(Lbfgs, QuadraticInFewSteps) {
  const Objective q = [](const Vector& x, Vector* g) {
    const Vector w{{1.0, 10.0, 100.0}};
    if (g) *g = w.cwiseProduct(x - Vector::Ones(3));
    return 0.5 * (x - Vector::Ones(3)).cwiseProduct(w).dot(x - Vector::Ones(3));
  };
  const auto r = lbfgs_minimize(q, Vector::Zero(3), LbfgsOptions{});
  EXPECT_TRUE(r.converged);
  EXPECT_LT((r.x - Vector::Ones(3)).norm(), 1e-8);
  EXPECT_LT(r.iterations, 60);
}

TEST(AugmentedLagrangian, ProjectsOntoDisc) {
  // min |x - (2, 1)|^2 subject to |x|^2 <= 1: solution (2, 1) / sqrt 5, multiplier sqrt 5 - 1
  ConstrainedProblem p;
  p.n = 2;
  p.m = 1;
  const Vector target{{2.0, 1.0}};
  p.objective = [target](const Vector& x, Vector* g) {
    if (g) *g = 2.0 * (x - target);
    return (x - target).squaredNorm();
  };
  p.constraints = [](const Vector& x, Vector& g, Matrix* jac) {
    g.resize(1);
    g[0] = x.squaredNorm() - 1.0;
    if (jac) *jac = 2.0 * x.transpose();
  };
  const auto r = minimize_augmented_lagrangian(p, Vector::Zero(2), AugmentedLagrangianOptions{});
  EXPECT_TRUE(r.converged) << r.message;
  EXPECT_LT((r.x - target / std::sqrt(5.0)).norm(), 1e-8);
  EXPECT_NEAR(r.multipliers[0], std::sqrt(5.0) - 1.0, 1e-6);
  EXPECT_LE(r.max_violation, 1e-10);
}

TEST(AugmentedLagrangian, InactiveConstraintLeavesUnconstrainedOptimum) {
  ConstrainedProblem p;
  p.n = 2;
  p.m = 2;
  p.objective = [](const Vector& x, Vector* g) {
    if (g) *g = 2.0 * (x - Vector{{0.1, 0.2}});
    return (x - Vector{{0.1, 0.2}}).squaredNorm();
  };
  p.constraints = [](const Vector& x, Vector& g, Matrix* jac) {
    g = Vector{{x[0] - 1.0, x[1] - 1.0}};
    if (jac) *jac = Matrix::Identity(2, 2);
  };
  const auto r = minimize_augmented_lagrangian(p, Vector{{0.5, 0.5}}, AugmentedLagrangianOptions{});
  EXPECT_TRUE(r.converged);
  EXPECT_LT((r.x - Vector{{0.1, 0.2}}).norm(), 1e-8);
  EXPECT_LT(r.multipliers.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(AugmentedLagrangian, MeritTraceIsMonotoneWithinRounds) {
  ConstrainedProblem p;
  p.n = 3;
  p.m = 1;
  p.objective = [](const Vector& x, Vector* g) {
    if (g) *g = -Vector::Ones(3);
    return -x.sum();
  };
  p.constraints = [](const Vector& x, Vector& g, Matrix* jac) {
    g.resize(1);
    g[0] = x.squaredNorm() - 3.0;
    if (jac) *jac = 2.0 * x.transpose();
  };
  const auto r = minimize_augmented_lagrangian(p, Vector::Zero(3), AugmentedLagrangianOptions{});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.objective, -3.0, 1e-9);
  for (std::size_t i = 1; i < r.trace.size(); ++i)
    if (r.trace[i].round == r.trace[i - 1].round) EXPECT_LE(r.trace[i].merit, r.trace[i - 1].merit);
}
