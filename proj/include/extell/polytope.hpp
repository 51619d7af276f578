#pragma once

#include <optional>
#include <vector>

#include "extell/sym_matrix.hpp"

namespace extell {

/// One half-space a . x <= b with unit normal a.
struct HalfSpace {
  Vector a;
  double b = 0.0;
};

/// Convex body given as an intersection of half-spaces. Normals are scaled to
/// unit length at construction so that slacks are Euclidean distances.
class HPolytope {
 public:
  explicit HPolytope(std::vector<HalfSpace> rows);

  /// Axis-aligned box [-half_width, half_width]^d.
  static HPolytope box(int d, double half_width = 1.0);
  /// Equilateral triangle with base (0,0)-(side,0) and apex above the base.
  static HPolytope equilateral_triangle(double side = 1.0);

  int dim() const { return dim_; }
  const std::vector<HalfSpace>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  /// b_j - a_j . x for every row.
  Vector slacks(const Vector& x) const;
  bool contains(const Vector& x, double tol = 1e-9) const;

  /// A unit direction v with a_j . v <= 1e-6 for all rows, if one exists.
  /// Absence certifies boundedness.
  std::optional<Vector> recession_direction() const;

 private:
  int dim_ = 0;
  std::vector<HalfSpace> rows_;
};

/// Nearest point of conv{points} to `target` (Wolfe's minimum-norm-point method).
Vector nearest_point_in_hull(const std::vector<Vector>& points, const Vector& target);

}  // namespace extell
