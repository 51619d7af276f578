#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"

#include "extell/ellipsoid.hpp"
#include "extell/in_between.hpp"

namespace extell {

/// {0, 0.1, ..., 1}.
std::vector<double> standard_lambda_grid();
/// standard grid plus 0.01 and 0.99 for the behaviour near the endpoints.
std::vector<double> default_lambda_grid();

inline constexpr double kContainmentTol = 1e-9;

struct LambdaMargin {
  double lambda = 0.0;
  double margin = 0.0;  ///< worst slack at this lambda; negative beyond tolerance is a violation
  bool checked = true;
  bool is_ellipsoid = true;
};

/// Image-form in-between ellipsoids stay inside conv(E0, E1).
struct HullReport {
  std::vector<LambdaMargin> per_lambda;
  int violations = 0;
  double worst_margin = 0.0;
};
HullReport check_lemma1(const AffineMap& e0, const AffineMap& e1, const std::vector<double>& grid, int n_dirs,
                        std::uint64_t seed = 0);

/// Points of E0 and E1 rejection-sampled from the bounding box of the
/// smaller-volume endpoint: n_samples accepted or 1e6 proposals, whichever first.
struct IntersectionSample {
  std::vector<Vector> points;
  long proposals = 0;
  bool vacuous() const { return points.size() < 10; }
};
IntersectionSample sample_intersection(const QuadricEllipsoid& e0, const QuadricEllipsoid& e1, int n_samples,
                                       std::uint64_t seed);

/// Pre-image in-between ellipsoids enclose E0 n E1: |P x + t| <= 1 + 1e-12.
struct IntersectionReport {
  bool vacuous = false;
  int samples = 0;
  std::vector<LambdaMargin> per_lambda;  ///< margin = 1 - max |P_l x + t_l|
  int violations = 0;
  double worst_margin = 0.0;
};
IntersectionReport check_lemma2(const AffineMap& e0, const AffineMap& e1, const std::vector<double>& grid,
                                int n_samples, std::uint64_t seed = 0);

/// Same sampling check for the homogeneous (point quadric) in-between family;
/// margin = min over samples of -X^T M_l X.
IntersectionReport check_homogeneous_intersection(const HomogeneousQuadric& m0, const HomogeneousQuadric& m1,
                                                  const std::vector<double>& grid, int n_samples,
                                                  std::uint64_t seed = 0);

/// Dual in-between ellipsoids near the endpoints stay inside conv(E0, E1) (d = 2).
struct DualHullReport {
  double lambda_star_low = 0.0;   ///< longest grid prefix from 0 with ellipsoidal members
  double lambda_star_high = 1.0;  ///< longest grid suffix from 1 with ellipsoidal members
  std::vector<LambdaMargin> per_lambda;
  int violations = 0;
  double worst_margin = 0.0;
  double worst_axis_mismatch = 0.0;  ///< block-formula vs inverted-conic semi-axes
};
DualHullReport check_lemma4(const QuadricEllipsoid& e0, const QuadricEllipsoid& e1, const std::vector<double>& grid,
                            int n_dirs, std::uint64_t seed = 0);

/// Seeded batch of lemma checks; one seeded pair per trial.
struct BatchReport {
  int lemma = 0;
  int dim = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  int violations = 0;
  int vacuous = 0;
  int full_interval = 0;  ///< lemma 4: pairs whose whole grid is ellipsoidal
  double worst_margin = 0.0;
  double mean_lambda_star = 0.0;
  std::optional<nlohmann::json> witness;  ///< first violating pair, for replay
};
BatchReport verify_lemma1_batch(int d, int trials, std::uint64_t seed, int jobs = 1);
BatchReport verify_lemma2_batch(int d, int trials, std::uint64_t seed, int jobs = 1);
BatchReport verify_lemma4_batch(int trials, std::uint64_t seed, int jobs = 1);

/// Equal-volume distinct enclosing pairs of a common point cloud; the
/// pre-image midpoint must be strictly smaller by more than 1e-12.
struct BetweennessReport {
  int pairs = 0;
  int failures = 0;
  double smallest_gap = 0.0;  ///< min over pairs of vol(E0) - vol(E_1/2)
  int midpoint_not_enclosing = 0;
};
BetweennessReport check_strict_betweenness(int pairs, int d, int n_points, std::uint64_t seed);

nlohmann::json to_json_value(const BatchReport& r);

}  // namespace extell
