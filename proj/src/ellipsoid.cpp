#include "extell/ellipsoid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "extell/errors.hpp"
#include "extell/random.hpp"

namespace extell {

namespace {

void check_dimension(int d) {
  if (d < 1 || d > kMaxDimension) throw std::invalid_argument("unsupported dimension " + std::to_string(d));
}

Vector sorted(Vector v) {
  std::sort(v.data(), v.data() + v.size());
  return v;
}

}  // namespace

QuadricEllipsoid::QuadricEllipsoid(Vector center, SymMatrix shape)
    : center_(std::move(center)), shape_(std::move(shape)) {
  check_dimension(shape_.dim());
  if (center_.size() != shape_.dim()) throw std::invalid_argument("QuadricEllipsoid: center/shape dimension mismatch");
  const Vector e = e_vec(shape_);
  const double tol = zero_threshold(e);
  if (e[0] < -tol) throw std::invalid_argument("QuadricEllipsoid: shape matrix is not PSD");
  singular_ = e[0] <= tol;
}

AffineMap::AffineMap(SymMatrix p, Vector t, AffineMode mode) : p_(std::move(p)), t_(std::move(t)), mode_(mode) {
  check_dimension(p_.dim());
  if (t_.size() != p_.dim()) throw std::invalid_argument("AffineMap: P/t dimension mismatch");
  const Vector e = e_vec(p_);
  const double tol = zero_threshold(e);
  if (mode_ == AffineMode::Image) {
    if (e[0] < -tol) throw std::invalid_argument("AffineMap: image matrix is not PSD");
  } else if (!(e[0] > tol)) {
    throw SingularRepresentation("AffineMap: pre-image matrix is not positive definite");
  }
}

AffineMap AffineMap::from_general(const Matrix& p, const Vector& t, AffineMode mode) {
  if (mode == AffineMode::Image) return AffineMap(left_polar_factor(p), t, mode);
  // P = U S with S = sqrt(P^T P); |P x + t| = |S x + U^T t|
  const SymMatrix s = psd_sqrt(SymMatrix(p.transpose() * p));
  const Matrix u = p * pd_inverse(s).matrix();
  return AffineMap(s, u.transpose() * t, mode);
}

SymMatrix DualEllipsoid::b_prime() const { return b_ * (1.0 / (1.0 - c_.dot(b_.matrix() * c_))); }

SymMatrix DualEllipsoid::centered_block() const {
  const SymMatrix bp = b_prime();
  const Vector bc = bp.matrix() * c_;
  return SymMatrix(bc * bc.transpose() + bp.matrix());
}

DualEllipsoid::DualEllipsoid(SymMatrix b, Vector c) : b_(std::move(b)), c_(std::move(c)) {
  check_dimension(b_.dim());
  if (c_.size() != b_.dim()) throw std::invalid_argument("DualEllipsoid: B/c dimension mismatch");
  if (!is_positive_semidefinite(b_)) throw std::invalid_argument("DualEllipsoid: B is not PSD");
  if (!(1.0 - c_.dot(b_.matrix() * c_) > 0.0))
    throw OriginNotInterior("DualEllipsoid: c^T B c >= 1, normalization undefined");
  if (!is_positive_semidefinite(centered_block())) throw std::invalid_argument("DualEllipsoid: Q is not PSD");
}

SemiAxes semi_axes(const QuadricEllipsoid& e) {
  const Vector ev = e_vec(e.shape());
  if (!(ev[0] > zero_threshold(ev))) throw SingularRepresentation("semi_axes: quadric shape matrix is singular");
  return {sorted(ev.unaryExpr([](double x) { return 1.0 / std::sqrt(x); }))};
}

SemiAxes semi_axes(const AffineMap& e) {
  const Vector ev = e_vec(e.P());
  if (e.mode() == AffineMode::Image) return {sorted(ev.cwiseAbs())};
  if (!(ev[0] > zero_threshold(ev))) throw SingularRepresentation("semi_axes: pre-image matrix is singular");
  return {sorted(ev.cwiseInverse())};
}

SemiAxes semi_axes(const DualEllipsoid& e) {
  const Vector ev = e_vec(e.centered_block());
  return {sorted(ev.unaryExpr([](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; }))};
}

AffineMap quadric_to_affine(const QuadricEllipsoid& e) {
  return AffineMap(psd_inverse_sqrt(e.shape()), e.center(), AffineMode::Image);
}

QuadricEllipsoid affine_to_quadric(const AffineMap& f) {
  if (f.mode() == AffineMode::Image) {
    const SymMatrix inv = pd_inverse(f.P());
    return QuadricEllipsoid(f.t(), SymMatrix(inv.matrix() * inv.matrix()));
  }
  const SymMatrix inv = pd_inverse(f.P());
  return QuadricEllipsoid(-(inv.matrix() * f.t()), SymMatrix(f.P().matrix() * f.P().matrix()));
}

AffineMap quadric_to_preimage(const QuadricEllipsoid& e) {
  const SymMatrix root = psd_sqrt(e.shape());
  return AffineMap(root, -(root.matrix() * e.center()), AffineMode::PreImage);
}

HomogeneousQuadric quadric_to_homogeneous(const QuadricEllipsoid& e) {
  constexpr double kTol = 1e-12;
  const Matrix& a = e.shape().matrix();
  const Vector& m = e.center();
  const double denom = 1.0 - m.dot(a * m);
  if (!(denom > kTol))
    throw OriginNotInterior("quadric_to_homogeneous: origin is not interior to the ellipsoid; re-center coordinates");
  const int d = e.dim();
  const Matrix ap = a / denom;
  Matrix mm(d + 1, d + 1);
  mm(0, 0) = -1.0;
  const Vector off = -(ap * m);
  mm.block(1, 0, d, 1) = off;
  mm.block(0, 1, 1, d) = off.transpose();
  mm.bottomRightCorner(d, d) = ap;
  return {SymMatrix(mm), QuadricKind::Point};
}

RecenteredQuadric quadric_to_homogeneous_recentered(const QuadricEllipsoid& e) {
  const QuadricEllipsoid centered(Vector::Zero(e.dim()), e.shape());
  return {quadric_to_homogeneous(centered), e.center()};
}

std::optional<QuadricEllipsoid> homogeneous_to_quadric(const HomogeneousQuadric& h) {
  if (h.kind != QuadricKind::Point) throw std::invalid_argument("homogeneous_to_quadric: expected a point quadric");
  double alpha = h.corner();
  Vector beta = h.edge();
  Matrix c = h.block().matrix();
  const Vector ev = e_vec(SymMatrix(c));
  const double tol = zero_threshold(ev);
  if (ev[ev.size() - 1] < -tol && ev[0] < -tol) {
    alpha = -alpha;
    beta = -beta;
    c = -c;
  } else if (!(ev[0] > tol)) {
    return std::nullopt;
  }
  const Eigen::LLT<Matrix> llt(c);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Vector cinv_beta = llt.solve(beta);
  const double r = beta.dot(cinv_beta) - alpha;
  if (!(r > 1e-14 * std::max(1.0, std::abs(alpha)))) return std::nullopt;
  return QuadricEllipsoid(-cinv_beta, SymMatrix(c / r));
}

DualEllipsoid quadric_to_dual(const QuadricEllipsoid& e) {
  const SymMatrix ainv = pd_inverse(e.shape());
  const Vector& m = e.center();
  if (!(m.dot(e.shape().matrix() * m) < 1.0 - 1e-12))
    throw OriginNotInterior("quadric_to_dual: origin is not interior to the ellipsoid; re-center coordinates");
  const SymMatrix bp(ainv.matrix() - m * m.transpose());
  const Vector c = -(pd_inverse(bp).matrix() * m);
  const double s = c.dot(bp.matrix() * c);
  return DualEllipsoid(bp * (1.0 / (1.0 + s)), c);
}

QuadricEllipsoid dual_to_quadric(const DualEllipsoid& d) {
  const SymMatrix q = d.centered_block();
  const Vector m = -(d.b_prime().matrix() * d.c());
  return QuadricEllipsoid(m, pd_inverse(q));
}

namespace {

HomogeneousQuadric assemble(double corner, const Vector& edge, const Matrix& block, QuadricKind kind) {
  const auto d = edge.size();
  Matrix n(d + 1, d + 1);
  n(0, 0) = corner;
  n.block(1, 0, d, 1) = edge;
  n.block(0, 1, 1, d) = edge.transpose();
  n.bottomRightCorner(d, d) = block;
  return {SymMatrix(n), kind};
}

}  // namespace

HomogeneousQuadric dual_to_homogeneous(const DualEllipsoid& d) {
  const SymMatrix bp = d.b_prime();
  return assemble(-1.0, -(bp.matrix() * d.c()), bp.matrix(), QuadricKind::Dual);
}

HomogeneousQuadric quadric_to_dual_homogeneous(const QuadricEllipsoid& e) {
  const SymMatrix ainv = pd_inverse(e.shape());
  const Vector& m = e.center();
  return assemble(-1.0, m, ainv.matrix() - m * m.transpose(), QuadricKind::Dual);
}

std::optional<QuadricEllipsoid> dual_homogeneous_to_quadric(const HomogeneousQuadric& n) {
  if (n.kind != QuadricKind::Dual) throw std::invalid_argument("dual_homogeneous_to_quadric: expected a dual quadric");
  const double corner = n.corner();
  if (!(corner < 0.0)) return std::nullopt;
  const double scale = -1.0 / corner;
  const Vector m = n.edge() * scale;
  const Matrix q = n.block().matrix() * scale + m * m.transpose();
  const SymMatrix qs(q);
  const auto eig = sym_eigen(qs);
  if (!(eig.values[0] > zero_threshold(eig.values))) return std::nullopt;
  return QuadricEllipsoid(m, SymMatrix::from_spectrum(eig.values.cwiseInverse(), eig.vectors));
}

std::optional<HomogeneousQuadric> dual_to_point_conic(const HomogeneousQuadric& n) {
  if (n.kind != QuadricKind::Dual) throw std::invalid_argument("dual_to_point_conic: expected a dual quadric");
  const Eigen::FullPivLU<Matrix> lu(n.M.matrix());
  if (!lu.isInvertible()) return std::nullopt;
  Matrix inv = lu.inverse();
  inv.row(0) = -inv.row(0);
  inv.col(0) = -inv.col(0);
  return HomogeneousQuadric{SymMatrix(0.5 * (inv + inv.transpose())), QuadricKind::Point};
}

double membership_slack(const QuadricEllipsoid& e, const Vector& x) {
  const Vector y = x - e.center();
  return 1.0 - y.dot(e.shape().matrix() * y);
}

double membership_slack(const AffineMap& e, const Vector& x) {
  if (e.mode() == AffineMode::PreImage) return 1.0 - (e.P().matrix() * x + e.t()).squaredNorm();
  const auto eig = sym_eigen(e.P());
  const double tol = zero_threshold(eig.values);
  const Vector comp = eig.vectors.transpose() * (x - e.t());
  double inside = 0.0;
  double null_part = 0.0;
  for (Eigen::Index i = 0; i < comp.size(); ++i) {
    const double lam = std::abs(eig.values[i]);
    if (lam > tol) {
      inside += (comp[i] / lam) * (comp[i] / lam);
    } else {
      null_part += comp[i] * comp[i];
    }
  }
  null_part = std::sqrt(null_part);
  if (null_part > 1e-12 * (1.0 + comp.norm())) return -null_part;
  return 1.0 - inside;
}

double membership_slack(const DualEllipsoid& e, const Vector& x) { return membership_slack(dual_to_quadric(e), x); }

double membership_slack(const HomogeneousQuadric& e, const Vector& x) {
  if (e.kind == QuadricKind::Dual) {
    const auto q = dual_homogeneous_to_quadric(e);
    if (!q) return -std::numeric_limits<double>::infinity();
    return membership_slack(*q, x);
  }
  Vector xh(x.size() + 1);
  xh[0] = 1.0;
  xh.tail(x.size()) = x;
  return -xh.dot(e.M.matrix() * xh);
}

AffineMap to_image(const AffineMap& e) {
  if (e.mode() == AffineMode::Image) return e;
  return quadric_to_affine(affine_to_quadric(e));
}

double support_value(const AffineMap& e, const Vector& u) {
  if (std::abs(u.norm() - 1.0) > 1e-12) throw std::invalid_argument("support_value: direction must be a unit vector");
  if (e.mode() == AffineMode::PreImage) return support_value(to_image(e), u);
  return u.dot(e.t()) + (e.P().matrix() * u).norm();
}

PolytopeContainment ellipsoid_in_polytope(const AffineMap& e, const HPolytope& f) {
  if (e.dim() != f.dim()) throw std::invalid_argument("ellipsoid_in_polytope: dimension mismatch");
  const AffineMap img = to_image(e);
  PolytopeContainment out;
  out.worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < f.size(); ++j) {
    const auto& row = f.rows()[j];
    const double slack = row.b - (img.P().matrix() * row.a).norm() - row.a.dot(img.t());
    if (slack < out.worst_slack) {
      out.worst_slack = slack;
      out.worst_row = j;
    }
  }
  out.inside = out.worst_slack >= -1e-9;
  return out;
}

std::vector<Vector> seeded_directions(int d, int n, std::uint64_t seed) {
  std::vector<Vector> dirs;
  dirs.reserve(static_cast<std::size_t>(n) + 2 * static_cast<std::size_t>(d));
  Rng rng(seed);
  if (d == 2) {
    const double offset = rng.uniform(0.0, 2.0 * std::numbers::pi / n);
    for (int k = 0; k < n; ++k) {
      const double th = offset + 2.0 * std::numbers::pi * k / n;
      dirs.push_back(Vector{{std::cos(th), std::sin(th)}});
    }
  } else {
    for (int k = 0; k < n; ++k) dirs.push_back(rng.unit_vector(d));
  }
  for (int k = 0; k < d; ++k) {
    dirs.push_back(Vector::Unit(d, k));
    dirs.push_back(-Vector::Unit(d, k));
  }
  return dirs;
}

HullContainment ellipsoid_in_convex_hull(const AffineMap& e, const AffineMap& e0, const AffineMap& e1,
                                         const std::vector<Vector>& directions) {
  const AffineMap img = to_image(e);
  const AffineMap img0 = to_image(e0);
  const AffineMap img1 = to_image(e1);
  HullContainment out;
  out.margin = std::numeric_limits<double>::infinity();
  for (const auto& u : directions) {
    const double gap = std::max(support_value(img0, u), support_value(img1, u)) - support_value(img, u);
    if (gap < out.margin) {
      out.margin = gap;
      out.worst_direction = u;
    }
  }
  out.inside = out.margin >= -1e-9;
  return out;
}

HullContainment ellipsoid_in_convex_hull(const AffineMap& e, const AffineMap& e0, const AffineMap& e1, int n_dirs,
                                         std::uint64_t seed) {
  if (n_dirs < 64) throw std::invalid_argument("ellipsoid_in_convex_hull: n_dirs must be at least 64");
  return ellipsoid_in_convex_hull(e, e0, e1, seeded_directions(e.dim(), n_dirs, seed));
}

Vector boundary_point(const AffineMap& image, const Vector& unit) {
  const AffineMap img = to_image(image);
  return img.P().matrix() * unit + img.t();
}

}  // namespace extell
