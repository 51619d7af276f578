#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "extell/ellipsoid.hpp"
#include "extell/optimizer.hpp"
#include "extell/polytope.hpp"
#include "extell/size_function.hpp"

namespace extell {

struct SolverConfig {
  int max_iterations = 20000;  ///< L-BFGS iterations per outer round
  int max_rounds = 60;         ///< augmented Lagrangian rounds
  double objective_tol = 1e-10;   ///< relative change of the objective between rounds
  double constraint_tol = 1e-9;
  double stationarity_tol = 1e-9;  ///< relative first-order residual of the Lagrangian
  double initial_penalty = 10.0;
  double penalty_growth = 10.0;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int lbfgs_memory = 10;
  int multistart = 1;
  std::uint64_t seed = 0;
  int probe_trials = 200;  ///< convexity probe before solving; 0 disables
  int jobs = 1;            ///< threads for multistart runs

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct StartRecord {
  int index = 0;
  std::uint64_t seed = 0;
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct SolveResult {
  /// Pre-image form for enclosing problems, image form for inscribed ones.
  AffineMap ellipsoid{SymMatrix::identity(1), Vector::Zero(1), AffineMode::Image};
  /// Quadric view; absent when the ellipsoid is flat.
  std::optional<QuadricEllipsoid> quadric;
  /// Centered block Q = A^{-1} for the dual-parametrized solver.
  std::optional<SymMatrix> dual_block;
  double objective = 0.0;
  double feasibility_slack = 0.0;  ///< min over constraints of the slack; negative means violated
  int iterations = 0;
  int rounds = 0;
  bool converged = false;
  std::string message;
  std::optional<int> rank;  ///< affine rank of the input when it is deficient
  std::vector<MeritStep> trace;
  std::vector<StartRecord> starts;
  std::vector<std::string> warnings;
};

/// Minimum-volume enclosing ellipsoid by barycentric coordinate ascent with
/// away steps. Stops when every kappa_i <= (1 + eps)(d + 1) and every support
/// point has kappa_i >= (1 - eps)(d + 1); the result is scaled to contain all points.
SolveResult khachiyan_mvee(const std::vector<Vector>& points, double eps = 1e-6, int max_iterations = 1'000'000);

/// f-minimal ellipsoid {x : |P x + t| <= 1} containing every point.
SolveResult solve_min_enclosing(const std::vector<Vector>& points, const SizeFunction& f,
                                const SolverConfig& cfg = {});

/// f-maximal ellipsoid {P u + t : |u| <= 1} inside F; `fixed_center` pins t.
SolveResult solve_max_inscribed(const HPolytope& F, const SizeFunction& f, const SolverConfig& cfg = {},
                                const std::optional<Vector>& fixed_center = std::nullopt);

/// Fixed-center inscribed ellipsoid parametrized by Q = A^{-1} with objective
/// f(sqrt(e(Q))) and constraints a_j^T Q a_j <= (b_j - a_j . m)^2.
SolveResult solve_max_inscribed_fixed_center_dual(const HPolytope& F, const Vector& center, const SizeFunction& f,
                                                  const SolverConfig& cfg = {});

/// Largest ball inside F, found with the augmented Lagrangian on the linear program.
struct ChebyshevBall {
  Vector center;
  double radius = 0.0;
};
ChebyshevBall chebyshev_ball(const HPolytope& F);

/// Throws PreflightError when F is unbounded (with a recession direction) or
/// has empty interior (with the best center found).
void preflight_polytope(const HPolytope& F);

enum class ProblemMode { Enclose, Inscribe, InscribeDual };

struct Problem {
  ProblemMode mode = ProblemMode::Enclose;
  std::vector<Vector> points;
  std::optional<HPolytope> polytope;
  std::optional<Vector> center;

  int dim() const;
};

/// Reads {"points": [...]} or {"halfspaces": [...]} with an optional "center".
Problem problem_from_json(const nlohmann::json& j, ProblemMode mode);

SolveResult solve(const Problem& problem, const SizeFunction& f, const SolverConfig& cfg);

struct Cluster {
  SolveResult representative;  ///< lowest objective member (highest for inscribed)
  int size = 0;
  double objective = 0.0;
  bool candidate = false;  ///< objective within 1e-6 relative of the best cluster
};

struct UniquenessReport {
  std::vector<Cluster> clusters;
  int starts = 0;
  int failed_starts = 0;  ///< non-converged starts, left out of the clustering
  double max_intra_distance = 0.0;
  double min_inter_distance = 0.0;  ///< infinity with a single cluster
  double objective_spread = 0.0;    ///< relative spread of cluster objectives
  bool spread_flagged = false;      ///< spread above 1e-6

  int cluster_count() const { return static_cast<int>(clusters.size()); }
  int candidate_count() const;
};

inline constexpr double kClusterThreshold = 1e-4;
inline constexpr double kObjectiveSpreadTol = 1e-6;

/// Parameter vector used for clustering: (A, m) for enclosing results and
/// the image pair (P, t) for inscribed ones, which stays defined for flat ellipsoids.
Vector cluster_parameters(const SolveResult& r, ProblemMode mode);

/// Runs n_starts perturbed solves and clusters the converged outcomes.
UniquenessReport multistart_uniqueness(const Problem& problem, const SizeFunction& f, int n_starts,
                                       std::uint64_t seed, SolverConfig cfg = {});

nlohmann::json to_json_value(const SolveResult& r);
nlohmann::json to_json_value(const UniquenessReport& r);

}  // namespace extell
