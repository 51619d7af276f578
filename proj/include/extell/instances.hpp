#pragma once

#include <vector>

#include "extell/ellipsoid.hpp"
#include "extell/random.hpp"

namespace extell {

/// Regular ellipsoid with semi-axes log-uniform in [axis_lo, axis_hi], Haar
/// orientation and center ~ N(0, center_sigma^2 I).
QuadricEllipsoid random_ellipsoid(Rng& rng, int d, double axis_lo = 0.3, double axis_hi = 3.0,
                                  double center_sigma = 1.0);

/// Gaussian point cloud with a random anisotropic linear map applied.
std::vector<Vector> random_cloud(Rng& rng, int d, int n);

/// Four corners (+-1, +-1).
std::vector<Vector> square_corners();

}  // namespace extell
