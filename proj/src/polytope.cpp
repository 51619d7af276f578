#include "extell/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace extell {

HPolytope::HPolytope(std::vector<HalfSpace> rows) {
  if (rows.empty()) throw std::invalid_argument("HPolytope: no rows");
  dim_ = static_cast<int>(rows.front().a.size());
  if (dim_ < 1 || dim_ > kMaxDimension) throw std::invalid_argument("HPolytope: unsupported dimension");
  for (auto& row : rows) {
    if (row.a.size() != dim_) throw std::invalid_argument("HPolytope: inconsistent row dimensions");
    const double n = row.a.norm();
    if (!(n > 0.0) || !std::isfinite(n) || !std::isfinite(row.b))
      throw std::invalid_argument("HPolytope: degenerate row");
    row.a /= n;
    row.b /= n;
  }
  rows_ = std::move(rows);
}

HPolytope HPolytope::box(int d, double half_width) {
  std::vector<HalfSpace> rows;
  for (int k = 0; k < d; ++k) {
    Vector e = Vector::Unit(d, k);
    rows.push_back({e, half_width});
    rows.push_back({-e, half_width});
  }
  return HPolytope(std::move(rows));
}

HPolytope HPolytope::equilateral_triangle(double side) {
  const double s3 = std::numbers::sqrt3;
  std::vector<HalfSpace> rows;
  rows.push_back({Vector{{0.0, -1.0}}, 0.0});
  // left side through (0,0) and (side/2, side*sqrt3/2): sqrt3 x - y >= 0
  rows.push_back({Vector{{-s3, 1.0}}, 0.0});
  // right side through (side,0): sqrt3 (x - side) + y <= 0
  rows.push_back({Vector{{s3, 1.0}}, s3 * side});
  return HPolytope(std::move(rows));
}

Vector HPolytope::slacks(const Vector& x) const {
  Vector s(static_cast<Eigen::Index>(rows_.size()));
  for (std::size_t j = 0; j < rows_.size(); ++j) s[j] = rows_[j].b - rows_[j].a.dot(x);
  return s;
}

bool HPolytope::contains(const Vector& x, double tol) const { return slacks(x).minCoeff() >= -tol; }

std::optional<Vector> HPolytope::recession_direction() const {
  std::vector<Vector> normals;
  normals.reserve(rows_.size());
  for (const auto& r : rows_) normals.push_back(r.a);

  const Vector origin = Vector::Zero(dim_);
  const Vector z = nearest_point_in_hull(normals, origin);
  if (z.norm() > 1e-10) return Vector(-z / z.norm());

  // 0 lies in the hull; it must also be interior. Probe a small cross-polytope.
  constexpr double kProbe = 1e-6;
  for (int k = 0; k < dim_; ++k) {
    for (double sign : {1.0, -1.0}) {
      const Vector y = sign * kProbe * Vector::Unit(dim_, k);
      const Vector p = nearest_point_in_hull(normals, y);
      const Vector gap = y - p;
      if (gap.norm() > 1e-13) {
        const Vector v = gap / gap.norm();
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& a : normals) worst = std::max(worst, a.dot(v));
        if (worst <= 1e-6) return v;
      }
    }
  }
  return std::nullopt;
}

Vector nearest_point_in_hull(const std::vector<Vector>& points, const Vector& target) {
  if (points.empty()) throw std::invalid_argument("nearest_point_in_hull: no points");
  const auto n = points.size();
  std::vector<Vector> p(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = points[i] - target;
    scale = std::max(scale, p[i].squaredNorm());
  }
  const double tol = 1e-15 * std::max(scale, 1e-300);

  std::size_t first = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (p[i].squaredNorm() < p[first].squaredNorm()) first = i;

  std::vector<std::size_t> active{first};
  std::vector<double> weight{1.0};
  Vector x = p[first];

  auto combine = [&](const std::vector<double>& w) {
    Vector out = Vector::Zero(x.size());
    for (std::size_t k = 0; k < active.size(); ++k) out += w[k] * p[active[k]];
    return out;
  };

  for (int major = 0; major < 1000; ++major) {
    std::size_t j = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double v = x.dot(p[i]);
      if (v < best) {
        best = v;
        j = i;
      }
    }
    if (x.squaredNorm() - best <= tol) break;
    if (std::find(active.begin(), active.end(), j) != active.end()) break;
    active.push_back(j);
    weight.push_back(0.0);

    for (int minor = 0; minor < 1000; ++minor) {
      const auto k = static_cast<Eigen::Index>(active.size());
      Matrix sys = Matrix::Zero(k + 1, k + 1);
      Vector rhs = Vector::Zero(k + 1);
      for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) sys(a, b) = p[active[a]].dot(p[active[b]]);
        sys(a, k) = sys(k, a) = 1.0;
      }
      rhs[k] = 1.0;
      const Vector sol = sys.completeOrthogonalDecomposition().solve(rhs);
      std::vector<double> alpha(sol.data(), sol.data() + k);

      bool interior = true;
      for (double a : alpha) interior = interior && a > 1e-14;
      if (interior) {
        weight = alpha;
        x = combine(weight);
        break;
      }
      double theta = 1.0;
      for (std::size_t i = 0; i < alpha.size(); ++i)
        if (alpha[i] <= 1e-14) theta = std::min(theta, weight[i] / (weight[i] - alpha[i]));
      for (std::size_t i = 0; i < alpha.size(); ++i) weight[i] = theta * alpha[i] + (1.0 - theta) * weight[i];
      std::vector<std::size_t> keep_idx;
      std::vector<double> keep_w;
      for (std::size_t i = 0; i < weight.size(); ++i)
        if (weight[i] > 1e-14) {
          keep_idx.push_back(active[i]);
          keep_w.push_back(weight[i]);
        }
      double total = 0.0;
      for (double w : keep_w) total += w;
      for (double& w : keep_w) w /= total;
      active = std::move(keep_idx);
      weight = std::move(keep_w);
      x = combine(weight);
    }
  }
  return x + target;
}

}  // namespace extell
