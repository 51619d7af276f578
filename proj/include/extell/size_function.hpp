#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "extell/sym_matrix.hpp"

namespace extell {

/// Size of an ellipsoid as a function of its semi-axis lengths.
///
/// `eval` receives the semi-axes in ascending order. `gradient`, when present,
/// returns the partial derivatives in the same order; otherwise callers fall
/// back to central differences (see size_gradient).
struct SizeFunction {
  std::string name;
  std::function<double(std::span<const double>)> eval;
  std::function<Vector(std::span<const double>)> gradient;
  std::optional<int> dimension;  ///< fixed input dimension, nullopt for any
  bool strictly_monotone = true;
  bool symmetric = true;

  double operator()(std::span<const double> a) const;
  double operator()(const Vector& a) const { return (*this)(std::span<const double>(a.data(), a.size())); }
};

/// Volume of the unit ball in R^d via kappa_d = kappa_{d-2} * 2 pi / d.
double unit_ball_volume(int d);

/// Modulus convention for the ellipse arc length.
enum class Modulus {
  Eccentric,  ///< E(sqrt(1 - (min/max)^2)), the classical perimeter
  Literal     ///< E(1 - min/max), kept for scan comparison
};

/// Built-in size functions by name: volume, sum, sqrt_sum, pnorm:<q>,
/// square_counterexample, arc_length, arc_length:literal. Throws
/// std::invalid_argument for unknown names.
SizeFunction builtin(const std::string& spec);

/// w^p(x) = (|x_1|^p, ..., |x_d|^p); DomainError for zero entries when p < 0.
Vector w_pow(double p, const Vector& x);

/// f o w^p o e(S): the size function applied to the sorted transformed spectrum.
double eval_on_matrix(const SizeFunction& f, double p, const SymMatrix& s);

/// Gradient of f at ascending `a`, analytic when provided, else central differences.
Vector size_gradient(const SizeFunction& f, const Vector& a);

/// Value and symmetric-matrix gradient of S -> f(sort(w^p(e(S)))).
struct SpectralValue {
  double value = 0.0;
  SymMatrix gradient;
};
SpectralValue spectral_size(const SizeFunction& f, double p, const SymMatrix& s);

/// Complete elliptic integral E(k) = int_0^1 sqrt(1 - k^2 t^2) / sqrt(1 - t^2) dt,
/// 0 <= k <= 1, via the arithmetic-geometric mean.
double elliptic_E(double k);
/// E given both k and the complementary modulus k' = sqrt(1 - k^2).
double elliptic_E(double k, double k_complement);

/// Ellipse arc length 4 max(a, b) E(modulus).
double arc_length(double a, double b, Modulus modulus = Modulus::Eccentric);

}  // namespace extell
