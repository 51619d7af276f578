#include "extell/lemma_checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "extell/instances.hpp"
#include "extell/parallel.hpp"
#include "extell/random.hpp"
#include "extell/serialization.hpp"
#include "extell/size_function.hpp"

namespace extell {

std::vector<double> standard_lambda_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 10; ++i) g.push_back(i / 10.0);
  return g;
}

std::vector<double> default_lambda_grid() {
  std::vector<double> g = standard_lambda_grid();
  g.push_back(0.01);
  g.push_back(0.99);
  std::sort(g.begin(), g.end());
  return g;
}

HullReport check_lemma1(const AffineMap& e0, const AffineMap& e1, const std::vector<double>& grid, int n_dirs,
                        std::uint64_t seed) {
  if (n_dirs < 64) throw std::invalid_argument("check_lemma1: n_dirs must be at least 64");
  const auto dirs = seeded_directions(e0.dim(), n_dirs, seed);
  HullReport report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    const AffineMap el = between_image(e0, e1, lambda);
    const auto hull = ellipsoid_in_convex_hull(el, e0, e1, dirs);
    report.per_lambda.push_back({lambda, hull.margin, true, true});
    report.worst_margin = std::min(report.worst_margin, hull.margin);
    if (hull.margin < -kContainmentTol) ++report.violations;
  }
  return report;
}

namespace {

double log_det(const SymMatrix& s) {
  const Vector e = e_vec(s);
  return e.array().log().sum();
}

}  // namespace

IntersectionSample sample_intersection(const QuadricEllipsoid& e0, const QuadricEllipsoid& e1, int n_samples,
                                       std::uint64_t seed) {
  constexpr long kMaxProposals = 1'000'000;
  // larger determinant of A means smaller volume
  const QuadricEllipsoid& small = log_det(e0.shape()) >= log_det(e1.shape()) ? e0 : e1;
  const int d = small.dim();
  const Matrix cov = pd_inverse(small.shape()).matrix();
  const Vector half = cov.diagonal().cwiseSqrt();
  const Vector lo = small.center() - half;

  IntersectionSample out;
  Rng rng(seed);
  Vector x(d);
  while (static_cast<int>(out.points.size()) < n_samples && out.proposals < kMaxProposals) {
    ++out.proposals;
    for (int i = 0; i < d; ++i) x[i] = lo[i] + 2.0 * half[i] * rng.uniform();
    if (membership_slack(e0, x) >= 0.0 && membership_slack(e1, x) >= 0.0) out.points.push_back(x);
  }
  return out;
}

IntersectionReport check_lemma2(const AffineMap& e0, const AffineMap& e1, const std::vector<double>& grid,
                                int n_samples, std::uint64_t seed) {
  if (e0.mode() != AffineMode::PreImage || e1.mode() != AffineMode::PreImage)
    throw std::invalid_argument("check_lemma2: pre-image endpoints expected");
  const auto sample = sample_intersection(affine_to_quadric(e0), affine_to_quadric(e1), n_samples, seed);
  IntersectionReport report;
  report.samples = static_cast<int>(sample.points.size());
  report.vacuous = sample.vacuous();
  if (report.vacuous) return report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    const AffineMap el = between_preimage(e0, e1, lambda);
    double worst = 0.0;
    for (const auto& x : sample.points) worst = std::max(worst, (el.P().matrix() * x + el.t()).norm());
    const double margin = 1.0 - worst;
    report.per_lambda.push_back({lambda, margin, true, true});
    report.worst_margin = std::min(report.worst_margin, margin);
    if (margin < -1e-12) ++report.violations;
  }
  return report;
}

IntersectionReport check_homogeneous_intersection(const HomogeneousQuadric& m0, const HomogeneousQuadric& m1,
                                                  const std::vector<double>& grid, int n_samples,
                                                  std::uint64_t seed) {
  const auto q0 = homogeneous_to_quadric(m0);
  const auto q1 = homogeneous_to_quadric(m1);
  if (!q0 || !q1) throw std::invalid_argument("check_homogeneous_intersection: endpoints must be ellipsoids");
  const auto sample = sample_intersection(*q0, *q1, n_samples, seed);
  IntersectionReport report;
  report.samples = static_cast<int>(sample.points.size());
  report.vacuous = sample.vacuous();
  if (report.vacuous) return report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    const auto b = between_homogeneous(m0, m1, lambda);
    const double scale = std::max(1.0, b.quadric.M.max_abs());
    double margin = std::numeric_limits<double>::infinity();
    bool violated = false;
    for (const auto& x : sample.points) {
      const double s = membership_slack(b.quadric, x);
      margin = std::min(margin, s);
      const double r = 1.0 + x.norm();
      if (s < -1e-12 * scale * r * r) violated = true;
    }
    report.per_lambda.push_back({lambda, margin, true, b.is_ellipsoid});
    report.worst_margin = std::min(report.worst_margin, margin);
    if (violated) ++report.violations;
  }
  return report;
}

DualHullReport check_lemma4(const QuadricEllipsoid& e0, const QuadricEllipsoid& e1, const std::vector<double>& grid_in,
                            int n_dirs, std::uint64_t seed) {
  if (e0.dim() != 2 || e1.dim() != 2) throw std::invalid_argument("check_lemma4: only d = 2 is supported");
  if (n_dirs < 64) throw std::invalid_argument("check_lemma4: n_dirs must be at least 64");
  std::vector<double> grid = grid_in;
  std::sort(grid.begin(), grid.end());

  const auto n0 = quadric_to_dual_homogeneous(e0);
  const auto n1 = quadric_to_dual_homogeneous(e1);
  const AffineMap i0 = quadric_to_affine(e0);
  const AffineMap i1 = quadric_to_affine(e1);
  const auto dirs = seeded_directions(2, n_dirs, seed);

  DualHullReport report;
  std::vector<BetweenQuadric> members;
  for (double lambda : grid) members.push_back(between_dual(n0, n1, lambda));

  std::size_t prefix = 0;
  while (prefix < members.size() && members[prefix].is_ellipsoid) ++prefix;
  std::size_t suffix = 0;
  while (suffix < members.size() && members[members.size() - 1 - suffix].is_ellipsoid) ++suffix;
  report.lambda_star_low = prefix > 0 ? grid[prefix - 1] : 0.0;
  report.lambda_star_high = suffix > 0 ? grid[grid.size() - suffix] : 1.0;

  report.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < members.size(); ++k) {
    const auto& b = members[k];
    LambdaMargin cell{grid[k], 0.0, false, b.is_ellipsoid};
    const bool in_vicinity = k < prefix || k >= members.size() - suffix;
    if (b.is_ellipsoid && in_vicinity) {
      const auto hull = ellipsoid_in_convex_hull(quadric_to_affine(*b.ellipsoid), i0, i1, dirs);
      cell.margin = hull.margin;
      cell.checked = true;
      report.worst_margin = std::min(report.worst_margin, hull.margin);
      if (hull.margin < -kContainmentTol) ++report.violations;

      // block formula vs the inverted conic
      const auto conic = dual_to_point_conic(b.quadric);
      const auto point = conic ? homogeneous_to_quadric(*conic) : std::nullopt;
      if (point) {
        const Vector a_block = semi_axes(*b.ellipsoid).a;
        const Vector a_conic = semi_axes(*point).a;
        const double rel = ((a_block - a_conic).cwiseAbs().array() / a_conic.array()).maxCoeff();
        report.worst_axis_mismatch = std::max(report.worst_axis_mismatch, rel);
      } else {
        report.worst_axis_mismatch = std::numeric_limits<double>::infinity();
      }
    }
    report.per_lambda.push_back(cell);
  }
  if (!std::isfinite(report.worst_margin)) report.worst_margin = 0.0;
  return report;
}

namespace {

struct TrialOutcome {
  int violations = 0;
  bool vacuous = false;
  bool full = false;
  double margin = std::numeric_limits<double>::infinity();
  double lambda_star = 0.0;
  nlohmann::json witness;
};

BatchReport merge(int lemma, int d, int trials, std::uint64_t seed, const std::vector<TrialOutcome>& outcomes) {
  BatchReport r;
  r.lemma = lemma;
  r.dim = d;
  r.trials = trials;
  r.seed = seed;
  r.worst_margin = std::numeric_limits<double>::infinity();
  double star_sum = 0.0;
  for (const auto& o : outcomes) {
    r.violations += o.violations;
    r.vacuous += o.vacuous ? 1 : 0;
    r.full_interval += o.full ? 1 : 0;
    r.worst_margin = std::min(r.worst_margin, o.margin);
    star_sum += o.lambda_star;
    if (o.violations > 0 && !r.witness) r.witness = o.witness;
  }
  if (!std::isfinite(r.worst_margin)) r.worst_margin = 0.0;
  r.mean_lambda_star = outcomes.empty() ? 0.0 : star_sum / static_cast<double>(outcomes.size());
  return r;
}

void check_batch_args(int d, int trials) {
  if (d < 1 || d > kMaxDimension) throw std::invalid_argument("verify: unsupported dimension");
  if (trials < 1) throw std::invalid_argument("verify: trials must be >= 1");
}

int directions_for(int d) { return d == 2 ? 256 : 512; }

}  // namespace

BatchReport verify_lemma1_batch(int d, int trials, std::uint64_t seed, int jobs) {
  check_batch_args(d, trials);
  std::vector<TrialOutcome> out(static_cast<std::size_t>(trials));
  const auto grid = standard_lambda_grid();
  parallel_for(out.size(), jobs, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    const AffineMap e0 = quadric_to_affine(random_ellipsoid(rng, d));
    const AffineMap e1 = quadric_to_affine(random_ellipsoid(rng, d));
    const auto rep = check_lemma1(e0, e1, grid, directions_for(d), rng.next_u64());
    auto& o = out[i];
    o.violations = rep.violations;
    o.margin = rep.worst_margin;
    if (rep.violations > 0) o.witness = {{"trial", i}, {"e0", e0}, {"e1", e1}};
  });
  return merge(1, d, trials, seed, out);
}

BatchReport verify_lemma2_batch(int d, int trials, std::uint64_t seed, int jobs) {
  check_batch_args(d, trials);
  std::vector<TrialOutcome> out(static_cast<std::size_t>(trials));
  const auto grid = standard_lambda_grid();
  parallel_for(out.size(), jobs, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    const QuadricEllipsoid q0 = random_ellipsoid(rng, d);
    const QuadricEllipsoid q1(q0.center() + 0.3 * rng.normal_vector(d), random_ellipsoid(rng, d).shape());
    const AffineMap e0 = quadric_to_preimage(q0);
    const AffineMap e1 = quadric_to_preimage(q1);
    const auto rep = check_lemma2(e0, e1, grid, 1000, rng.next_u64());
    auto& o = out[i];
    o.violations = rep.violations;
    o.vacuous = rep.vacuous;
    if (!rep.vacuous) o.margin = rep.worst_margin;
    if (rep.violations > 0) o.witness = {{"trial", i}, {"e0", e0}, {"e1", e1}};
  });
  return merge(2, d, trials, seed, out);
}

BatchReport verify_lemma4_batch(int trials, std::uint64_t seed, int jobs) {
  check_batch_args(2, trials);
  std::vector<TrialOutcome> out(static_cast<std::size_t>(trials));
  const auto grid = default_lambda_grid();
  parallel_for(out.size(), jobs, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    const QuadricEllipsoid e0 = random_ellipsoid(rng, 2, 0.3, 3.0, 1.5);
    const QuadricEllipsoid e1 = random_ellipsoid(rng, 2, 0.3, 3.0, 1.5);
    const auto rep = check_lemma4(e0, e1, grid, 256, rng.next_u64());
    auto& o = out[i];
    o.violations = rep.violations;
    o.margin = rep.worst_margin;
    o.full = rep.lambda_star_low == 1.0;
    o.lambda_star = std::min(rep.lambda_star_low, 1.0 - rep.lambda_star_high);
    if (rep.violations > 0) o.witness = {{"trial", i}, {"e0", e0}, {"e1", e1}};
  });
  return merge(4, 2, trials, seed, out);
}

BetweennessReport check_strict_betweenness(int pairs, int d, int n_points, std::uint64_t seed) {
  BetweennessReport report;
  report.pairs = pairs;
  report.smallest_gap = std::numeric_limits<double>::infinity();
  const double kappa = unit_ball_volume(d);
  for (int k = 0; k < pairs; ++k) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    const auto cloud = random_cloud(rng, d, n_points);
    Vector centroid = Vector::Zero(d);
    for (const auto& x : cloud) centroid += x;
    centroid /= static_cast<double>(cloud.size());

    std::vector<QuadricEllipsoid> ends;
    for (int e = 0; e < 2; ++e) {
      const QuadricEllipsoid shape = random_ellipsoid(rng, d, 0.5, 2.0, 0.0);
      const Vector m = centroid + 0.3 * rng.normal_vector(d);
      double worst = 0.0;
      for (const auto& x : cloud) worst = std::max(worst, (x - m).dot(shape.shape().matrix() * (x - m)));
      ends.emplace_back(m, shape.shape() * (1.0 / worst));
    }
    auto volume = [&](const QuadricEllipsoid& q) { return kappa * std::exp(-0.5 * log_det(q.shape())); };
    const double v0 = volume(ends[0]);
    const double v1 = volume(ends[1]);
    const int small = v0 < v1 ? 0 : 1;
    const double ratio = std::min(v0, v1) / std::max(v0, v1);
    ends[small] = QuadricEllipsoid(ends[small].center(), ends[small].shape() * std::pow(ratio, 2.0 / d));

    const AffineMap p0 = quadric_to_preimage(ends[0]);
    const AffineMap p1 = quadric_to_preimage(ends[1]);
    const AffineMap mid = between_preimage(p0, p1, 0.5);
    const double f0 = kappa * std::exp(-log_det(p0.P()));
    const double f_mid = kappa * std::exp(-log_det(mid.P()));
    const double gap = f0 - f_mid;
    report.smallest_gap = std::min(report.smallest_gap, gap);
    if (!(gap > 1e-12)) ++report.failures;
    for (const auto& x : cloud)
      if ((mid.P().matrix() * x + mid.t()).norm() > 1.0 + 1e-12) {
        ++report.midpoint_not_enclosing;
        break;
      }
  }
  return report;
}

nlohmann::json to_json_value(const BatchReport& r) {
  nlohmann::json j{{"lemma", r.lemma},           {"d", r.dim},
                   {"trials", r.trials},         {"seed", r.seed},
                   {"violations", r.violations}, {"vacuous", r.vacuous},
                   {"worst_margin", r.worst_margin}, {"tolerance", kContainmentTol}};
  if (r.lemma == 4) {
    j["full_interval_pairs"] = r.full_interval;
    j["mean_lambda_star"] = r.mean_lambda_star;
  }
  if (r.witness) j["witness"] = *r.witness;
  return j;
}

}  // namespace extell
