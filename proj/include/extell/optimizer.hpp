#pragma once

#include <functional>
#include <string>
#include <vector>

#include "extell/sym_matrix.hpp"

namespace extell {

/// Value of a smooth function; fills `grad` when it is non-null. Returning a
/// non-finite value marks x as outside the domain.
using Objective = std::function<double(const Vector& x, Vector* grad)>;

/// min f(x) subject to g(x) <= 0.
struct ConstrainedProblem {
  int n = 0;
  int m = 0;
  Objective objective;
  /// Fills g (size m) and, when non-null, the Jacobian (m x n).
  std::function<void(const Vector& x, Vector& g, Matrix* jac)> constraints;
};

struct LbfgsOptions {
  int max_iterations = 5000;
  double grad_tol = 1e-8;  ///< infinity norm
  int memory = 10;
  double armijo = 1e-4;
  double backtrack = 0.5;
};

struct LbfgsResult {
  Vector x;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Limited-memory BFGS with Armijo backtracking. Every accepted step lowers
/// the value; accepted values are appended to `trace` when given.
LbfgsResult lbfgs_minimize(const Objective& fn, Vector x0, const LbfgsOptions& opt,
                           std::vector<double>* trace = nullptr);

struct AugmentedLagrangianOptions {
  int max_rounds = 60;
  LbfgsOptions inner;
  double initial_penalty = 10.0;
  double penalty_growth = 10.0;
  double max_penalty = 1e14;
  double feasibility_tol = 1e-11;
  double stationarity_tol = 1e-9;  ///< relative to 1 + |f|
  /// Alternative stop: relative objective change between rounds below this
  /// while feasible and stationary to 1e-6.
  double objective_tol = 1e-10;
};

/// Merit value after an accepted inner step, tagged with its outer round.
struct MeritStep {
  int round = 0;
  double merit = 0.0;
};

struct AugmentedLagrangianResult {
  Vector x;
  Vector multipliers;
  double objective = 0.0;
  double max_violation = 0.0;
  double stationarity = 0.0;
  double objective_change = 0.0;  ///< relative change over the last round
  int rounds = 0;
  int iterations = 0;
  bool converged = false;
  std::string message;
  std::vector<MeritStep> trace;
};

/// Powell-Hestenes-Rockafellar augmented Lagrangian with L-BFGS inner solves.
AugmentedLagrangianResult minimize_augmented_lagrangian(const ConstrainedProblem& problem, const Vector& x0,
                                                        const AugmentedLagrangianOptions& opt);

}  // namespace extell
