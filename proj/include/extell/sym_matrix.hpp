#pragma once

#include <functional>

#include <Eigen/Dense>

namespace extell {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Maximum supported dimension for ellipsoid problems.
inline constexpr int kMaxDimension = 16;

/// Dense symmetric matrix. Storage is exactly symmetric: the constructor
/// rejects inputs that are not symmetric up to rounding and averages the two
/// triangles of the rest.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);

  static SymMatrix identity(int d);
  static SymMatrix zero(int d);
  static SymMatrix diagonal(const Vector& diag);
  /// V * diag(values) * V^T.
  static SymMatrix from_spectrum(const Vector& values, const Matrix& vectors);

  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const Matrix& matrix() const { return m_; }

  /// Largest absolute entry.
  double max_abs() const { return m_.cwiseAbs().maxCoeff(); }

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix operator*(double s) const;
  friend SymMatrix operator*(double s, const SymMatrix& a) { return a * s; }

  /// (1 - lambda) * a + lambda * b, computed entrywise.
  static SymMatrix lerp(const SymMatrix& a, const SymMatrix& b, double lambda);

 private:
  Matrix m_;
};

struct EigenDecomposition {
  Vector values;   ///< ascending
  Matrix vectors;  ///< orthonormal columns matching `values`
  int sweeps = 0;
};

/// Cyclic Jacobi eigendecomposition. Stops when the off-diagonal Frobenius
/// norm drops below 1e-14 times the Frobenius norm of the input; throws
/// ConvergenceError after 100 sweeps.
EigenDecomposition sym_eigen(const SymMatrix& s);

/// Ascending eigenvalues.
Vector e_vec(const SymMatrix& s);

/// V * diag(fn(values)) * V^T.
SymMatrix spectral_apply(const SymMatrix& s, const std::function<double(double)>& fn);

/// Eigenvalues at or below this fraction of the largest magnitude count as zero.
inline constexpr double kPsdRelTol = 1e-10;

/// Absolute zero threshold for the spectrum `values` (ascending).
double zero_threshold(const Vector& values);

bool is_positive_definite(const SymMatrix& s);
bool is_positive_semidefinite(const SymMatrix& s);

/// Symmetric matrix square root / inverse square root of a PSD matrix. The
/// inverse root acts as a pseudo-inverse on the numerical null space.
SymMatrix psd_sqrt(const SymMatrix& s);
SymMatrix psd_inverse_sqrt(const SymMatrix& s);
/// Inverse of a PD matrix; throws SingularRepresentation otherwise.
SymMatrix pd_inverse(const SymMatrix& s);

/// Symmetric part of P for the left polar decomposition P = S U: S = sqrt(P P^T).
SymMatrix left_polar_factor(const Matrix& p);

/// Isometric half-vectorization (off-diagonals scaled by sqrt 2).
Vector svec(const SymMatrix& s);
SymMatrix smat(const Eigen::Ref<const Vector>& v, int d);
inline int svec_size(int d) { return d * (d + 1) / 2; }

}  // namespace extell
