#pragma once

#include <cstdint>
#include <optional>

#include "extell/polytope.hpp"
#include "extell/sym_matrix.hpp"

namespace extell {

class Rng;

/// {x : (x - m)^T A (x - m) <= 1} with A symmetric PSD.
class QuadricEllipsoid {
 public:
  QuadricEllipsoid(Vector center, SymMatrix shape);

  int dim() const { return shape_.dim(); }
  const Vector& center() const { return center_; }
  const SymMatrix& shape() const { return shape_; }
  /// Smallest eigenvalue of the shape matrix is numerically zero.
  bool singular() const { return singular_; }

 private:
  Vector center_;
  SymMatrix shape_;
  bool singular_ = false;
};

enum class AffineMode {
  Image,    ///< {P x + t : |x| <= 1}
  PreImage  ///< {x : |P x + t| <= 1}
};

/// Ellipsoid as affine image or pre-image of the unit ball. P is symmetric
/// PSD for Image mode and PD for PreImage mode.
class AffineMap {
 public:
  AffineMap(SymMatrix p, Vector t, AffineMode mode);

  /// Accepts an arbitrary square map and replaces it by its symmetric polar
  /// factor (left factor for images, right factor for pre-images).
  static AffineMap from_general(const Matrix& p, const Vector& t, AffineMode mode);

  int dim() const { return p_.dim(); }
  const SymMatrix& P() const { return p_; }
  const Vector& t() const { return t_; }
  AffineMode mode() const { return mode_; }

 private:
  SymMatrix p_;
  Vector t_;
  AffineMode mode_;
};

enum class QuadricKind { Point, Dual };

/// (d+1)x(d+1) symmetric matrix M; the set is {X = (1, x) : X^T M X <= 0}.
/// For kind Dual the coordinates are hyperplane coordinates u of u . x = 1.
struct HomogeneousQuadric {
  SymMatrix M;
  QuadricKind kind = QuadricKind::Point;

  int dim() const { return M.dim() - 1; }
  /// Top-left scalar, off-diagonal column and lower-right block.
  double corner() const { return M(0, 0); }
  Vector edge() const { return M.matrix().col(0).tail(dim()); }
  SymMatrix block() const { return SymMatrix(M.matrix().bottomRightCorner(dim(), dim())); }
};

/// Set of hyperplanes u . x = 1 missing the ellipsoid, {u : (u - c)^T B (u - c) <= 1}.
/// Restricted to ellipsoids that contain the origin in their interior.
class DualEllipsoid {
 public:
  DualEllipsoid(SymMatrix b, Vector c);

  int dim() const { return b_.dim(); }
  const SymMatrix& B() const { return b_; }
  const Vector& c() const { return c_; }
  /// B' = B / (1 - c^T B c).
  SymMatrix b_prime() const;
  /// Q = B' c c^T B' + B', the centered lower-right block.
  SymMatrix centered_block() const;

 private:
  SymMatrix b_;
  Vector c_;
};

/// Ordered (ascending) semi-axis lengths.
struct SemiAxes {
  Vector a;
};

SemiAxes semi_axes(const QuadricEllipsoid& e);
SemiAxes semi_axes(const AffineMap& e);
SemiAxes semi_axes(const DualEllipsoid& e);

AffineMap quadric_to_affine(const QuadricEllipsoid& e);
QuadricEllipsoid affine_to_quadric(const AffineMap& f);

/// Pre-image form of a regular quadric: P = A^{1/2}, t = -A^{1/2} m.
AffineMap quadric_to_preimage(const QuadricEllipsoid& e);

/// Normalized homogeneous matrix with top-left entry -1. Throws
/// OriginNotInterior when 1 - m^T A m is not positive.
HomogeneousQuadric quadric_to_homogeneous(const QuadricEllipsoid& e);

struct RecenteredQuadric {
  HomogeneousQuadric quadric;  ///< in coordinates x' = x - shift
  Vector shift;
};
/// Homogeneous form after moving the ellipsoid center to the origin.
RecenteredQuadric quadric_to_homogeneous_recentered(const QuadricEllipsoid& e);

/// Point ellipsoid described by a homogeneous point quadric, if the quadric
/// is a nonempty bounded ellipsoid (either overall sign accepted).
std::optional<QuadricEllipsoid> homogeneous_to_quadric(const HomogeneousQuadric& h);

DualEllipsoid quadric_to_dual(const QuadricEllipsoid& e);
QuadricEllipsoid dual_to_quadric(const DualEllipsoid& d);

/// N = [[-1, -c^T B'], [-B' c, B']].
HomogeneousQuadric dual_to_homogeneous(const DualEllipsoid& d);
/// Dual homogeneous matrix of any regular ellipsoid, N = [[-1, m^T], [m, A^-1 - m m^T]];
/// unlike quadric_to_dual no interior-origin condition is needed.
HomogeneousQuadric quadric_to_dual_homogeneous(const QuadricEllipsoid& e);
/// Point ellipsoid of a dual homogeneous matrix read through its blocks:
/// A^-1 = Q = B' + m m^T with m the normalized edge column. Empty when Q is not PD.
std::optional<QuadricEllipsoid> dual_homogeneous_to_quadric(const HomogeneousQuadric& n);
/// Point conic J N^-1 J (J = diag(-1, I)) of a dual homogeneous matrix.
std::optional<HomogeneousQuadric> dual_to_point_conic(const HomogeneousQuadric& n);

/// Slack of the defining inequality; >= 0 inside, 0 on the boundary.
double membership_slack(const QuadricEllipsoid& e, const Vector& x);
double membership_slack(const AffineMap& e, const Vector& x);
double membership_slack(const DualEllipsoid& e, const Vector& x);
double membership_slack(const HomogeneousQuadric& e, const Vector& x);

inline constexpr double kMembershipTol = 1e-12;

template <class Rep>
bool contains_point(const Rep& e, const Vector& x) {
  return membership_slack(e, x) >= -kMembershipTol;
}

/// h_E(u) = u . t + |P u| for an Image-mode map; |u| must be 1.
double support_value(const AffineMap& e, const Vector& u);

struct PolytopeContainment {
  bool inside = false;
  double worst_slack = 0.0;
  std::size_t worst_row = 0;
};
/// Row-wise test |P a_j| + a_j . t <= b_j with tolerance 1e-9.
PolytopeContainment ellipsoid_in_polytope(const AffineMap& e, const HPolytope& f);

struct HullContainment {
  bool inside = false;
  double margin = 0.0;  ///< min over directions of max(h0, h1) - h
  Vector worst_direction;
};
/// Support-function dominance h_E <= max(h_E0, h_E1) over n_dirs seeded
/// directions plus the coordinate axes (n_dirs >= 64).
HullContainment ellipsoid_in_convex_hull(const AffineMap& e, const AffineMap& e0, const AffineMap& e1,
                                         int n_dirs, std::uint64_t seed = 0);
/// Same test over an explicit set of unit directions.
HullContainment ellipsoid_in_convex_hull(const AffineMap& e, const AffineMap& e0, const AffineMap& e1,
                                         const std::vector<Vector>& directions);

/// Seeded unit directions; in 2D evenly spaced angles with a seeded offset.
std::vector<Vector> seeded_directions(int d, int n, std::uint64_t seed);

/// Image-mode map from any representation via the quadric form.
AffineMap to_image(const AffineMap& e);

/// Boundary point P y + t for unit y.
Vector boundary_point(const AffineMap& image, const Vector& unit);

}  // namespace extell
