#include "extell/optimizer.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace extell {

LbfgsResult lbfgs_minimize(const Objective& fn, Vector x0, const LbfgsOptions& opt, std::vector<double>* trace) {
  LbfgsResult r;
  r.x = std::move(x0);
  Vector g(r.x.size());
  r.value = fn(r.x, &g);
  if (!std::isfinite(r.value)) throw std::invalid_argument("lbfgs_minimize: starting point outside the domain");
  r.grad_norm = g.lpNorm<Eigen::Infinity>();

  std::deque<Vector> s_hist, y_hist;
  std::deque<double> rho_hist;
  Vector x_new(r.x.size()), g_new(r.x.size());
  int flat_steps = 0;
  while (r.iterations < opt.max_iterations) {
    if (r.grad_norm <= opt.grad_tol) {
      r.converged = true;
      break;
    }
    // two-loop recursion
    Vector q = g;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    double gamma = 1.0;
    if (!s_hist.empty()) gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    else gamma = 1.0 / std::max(1.0, g.norm());
    q *= gamma;
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    Vector dir = -q;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      dir = -g / std::max(1.0, g.norm());
      slope = g.dot(dir);
    }

    // Armijo, or the approximate Wolfe test of Hager and Zhang once value
    // differences reach rounding level (non-increasing value, slope reduced).
    double step = 1.0;
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int k = 0; k < 80; ++k) {
      x_new = r.x + step * dir;
      f_new = fn(x_new, &g_new);
      if (std::isfinite(f_new)) {
        if (f_new <= r.value + opt.armijo * step * slope) {
          accepted = true;
          break;
        }
        const double slope_new = g_new.dot(dir);
        if (f_new <= r.value && slope_new >= 0.9 * slope && slope_new <= -0.8 * slope) {
          accepted = true;
          break;
        }
      }
      step *= opt.backtrack;
    }
    if (accepted && !(f_new < r.value)) ++flat_steps;
    else flat_steps = 0;
    if (!accepted || flat_steps > 50) {
      if (!s_hist.empty() && accepted == false) {
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
        continue;
      }
      break;
    }
    ++r.iterations;
    const Vector s = x_new - r.x;
    const Vector y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opt.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    r.x = x_new;
    g = g_new;
    r.value = f_new;
    r.grad_norm = g.lpNorm<Eigen::Infinity>();
    if (trace) trace->push_back(r.value);
  }
  if (r.grad_norm <= opt.grad_tol) r.converged = true;
  return r;
}

AugmentedLagrangianResult minimize_augmented_lagrangian(const ConstrainedProblem& problem, const Vector& x0,
                                                        const AugmentedLagrangianOptions& opt) {
  if (x0.size() != problem.n) throw std::invalid_argument("minimize_augmented_lagrangian: x0 has the wrong size");
  AugmentedLagrangianResult r;
  r.x = x0;
  r.multipliers = Vector::Zero(problem.m);
  double rho = opt.initial_penalty;
  Vector g(problem.m);
  Matrix jac(problem.m, problem.n);

  double last_violation = std::numeric_limits<double>::infinity();
  double last_objective = std::numeric_limits<double>::infinity();

  for (r.rounds = 1; r.rounds <= opt.max_rounds; ++r.rounds) {
    const Vector mu = r.multipliers;
    const Objective merit = [&](const Vector& x, Vector* grad) {
      Vector fg;
      const double f = problem.objective(x, grad ? &fg : nullptr);
      if (!std::isfinite(f)) return f;
      Vector gx(problem.m);
      Matrix jx;
      problem.constraints(x, gx, grad ? &jx : nullptr);
      double value = f;
      Vector shifted = (mu + rho * gx).cwiseMax(0.0);
      value += (shifted.squaredNorm() - mu.squaredNorm()) / (2.0 * rho);
      if (grad) *grad = fg + (problem.m > 0 ? Vector(jx.transpose() * shifted) : Vector::Zero(problem.n));
      return value;
    };

    LbfgsOptions inner = opt.inner;
    inner.grad_tol = std::max(opt.inner.grad_tol, 1e-3 * std::pow(0.1, r.rounds - 1));
    std::vector<double> values;
    const LbfgsResult in = lbfgs_minimize(merit, r.x, inner, &values);
    for (double v : values) r.trace.push_back({r.rounds, v});
    r.iterations += in.iterations;
    r.x = in.x;

    problem.constraints(r.x, g, &jac);
    r.multipliers = (mu + rho * g).cwiseMax(0.0);
    const double violation = problem.m > 0 ? std::max(0.0, g.maxCoeff()) : 0.0;
    Vector fg;
    r.objective = problem.objective(r.x, &fg);
    const Vector lag = fg + (problem.m > 0 ? Vector(jac.transpose() * r.multipliers) : Vector::Zero(problem.n));
    r.stationarity = lag.lpNorm<Eigen::Infinity>() / (1.0 + std::abs(r.objective));
    double complementarity = 0.0;
    for (int j = 0; j < problem.m; ++j)
      complementarity = std::max(complementarity, std::abs(std::min(-g[j], r.multipliers[j])));
    r.max_violation = violation;

    const bool feasible = violation <= opt.feasibility_tol && complementarity <= opt.feasibility_tol;
    r.objective_change = std::abs(r.objective - last_objective) / (1.0 + std::abs(r.objective));
    const bool settled = r.objective_change <= opt.objective_tol;
    if (feasible && (r.stationarity <= opt.stationarity_tol || (settled && r.stationarity <= 1e-6))) {
      r.converged = true;
      r.message = "converged";
      return r;
    }
    last_objective = r.objective;
    if (violation > 0.25 * last_violation && violation > opt.feasibility_tol)
      rho = std::min(rho * opt.penalty_growth, opt.max_penalty);
    last_violation = violation;
  }
  r.rounds = opt.max_rounds;
  r.message = "round limit reached";
  return r;
}

}  // namespace extell
