#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace extell {

/// Seeded generator with portable uniform/normal draws.
///
/// std::*_distribution output is implementation defined, so draws are built
/// directly on the 64-bit Mersenne twister to keep seeded runs reproducible
/// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Log-uniform in [lo, hi], lo > 0.
  double log_uniform(double lo, double hi);
  double normal();
  std::uint64_t next_u64() { return engine_(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

  Eigen::VectorXd normal_vector(int d);
  Eigen::VectorXd unit_vector(int d);
  /// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign fixed).
  Eigen::MatrixXd orthogonal(int d);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Seed for cell `index` of a batch seeded by `base` (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace extell
