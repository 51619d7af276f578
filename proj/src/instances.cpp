#include "extell/instances.hpp"

namespace extell {

QuadricEllipsoid random_ellipsoid(Rng& rng, int d, double axis_lo, double axis_hi, double center_sigma) {
  Vector nu(d);
  for (int i = 0; i < d; ++i) {
    const double a = rng.log_uniform(axis_lo, axis_hi);
    nu[i] = 1.0 / (a * a);
  }
  const Matrix v = rng.orthogonal(d);
  return QuadricEllipsoid(center_sigma * rng.normal_vector(d), SymMatrix::from_spectrum(nu, v));
}

std::vector<Vector> random_cloud(Rng& rng, int d, int n) {
  Vector scale(d);
  for (int i = 0; i < d; ++i) scale[i] = rng.log_uniform(0.5, 2.0);
  const Matrix map = rng.orthogonal(d) * scale.asDiagonal();
  const Vector shift = rng.normal_vector(d);
  std::vector<Vector> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) pts.push_back(map * rng.normal_vector(d) + shift);
  return pts;
}

std::vector<Vector> square_corners() {
  return {Vector{{1.0, 1.0}}, Vector{{-1.0, 1.0}}, Vector{{-1.0, -1.0}}, Vector{{1.0, -1.0}}};
}

}  // namespace extell
