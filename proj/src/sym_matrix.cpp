#include "extell/sym_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "extell/errors.hpp"

namespace extell {

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw std::invalid_argument("SymMatrix: matrix must be square with dimension >= 1");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw std::invalid_argument("SymMatrix: matrix is not symmetric");
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(int d) { return SymMatrix(Matrix::Identity(d, d)); }
SymMatrix SymMatrix::zero(int d) { return SymMatrix(Matrix::Zero(d, d)); }
SymMatrix SymMatrix::diagonal(const Vector& diag) { return SymMatrix(Matrix(diag.asDiagonal())); }

SymMatrix SymMatrix::from_spectrum(const Vector& values, const Matrix& vectors) {
  return SymMatrix(vectors * values.asDiagonal() * vectors.transpose());
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const { return SymMatrix(m_ + o.m_); }
SymMatrix SymMatrix::operator-(const SymMatrix& o) const { return SymMatrix(m_ - o.m_); }
SymMatrix SymMatrix::operator*(double s) const { return SymMatrix(m_ * s); }

SymMatrix SymMatrix::lerp(const SymMatrix& a, const SymMatrix& b, double lambda) {
  if (lambda == 0.0) return a;
  if (lambda == 1.0) return b;
  return SymMatrix((1.0 - lambda) * a.m_ + lambda * b.m_);
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  const auto n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < j; ++i) sum += 2.0 * a(i, j) * a(i, j);
  return std::sqrt(sum);
}

}  // namespace

EigenDecomposition sym_eigen(const SymMatrix& s) {
  constexpr int kMaxSweeps = 100;
  constexpr double kOffTol = 1e-14;

  const int n = s.dim();
  Matrix a = s.matrix();
  Matrix v = Matrix::Identity(n, n);
  const double norm = a.norm();

  int sweep = 0;
  for (;; ++sweep) {
    const double off = off_diagonal_norm(a);
    if (off <= kOffTol * norm || norm == 0.0) break;
    if (sweep == kMaxSweeps)
      throw ConvergenceError("sym_eigen: Jacobi iteration did not converge", off / norm);

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rutishauser's stable rotation
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        const double tau = sn / (1.0 + c);

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = a(p, r) = arp - sn * (arq + tau * arp);
          a(r, q) = a(q, r) = arq + sn * (arp - tau * arq);
        }
        for (int r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = vrp - sn * (vrq + tau * vrp);
          v(r, q) = vrq + sn * (vrp - tau * vrq);
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  out.sweeps = sweep;
  for (int k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

Vector e_vec(const SymMatrix& s) { return sym_eigen(s).values; }

SymMatrix spectral_apply(const SymMatrix& s, const std::function<double(double)>& fn) {
  const auto eig = sym_eigen(s);
  Vector mapped = eig.values.unaryExpr(fn);
  return SymMatrix::from_spectrum(mapped, eig.vectors);
}

double zero_threshold(const Vector& values) {
  const double largest = values.cwiseAbs().maxCoeff();
  return kPsdRelTol * largest;
}

bool is_positive_definite(const SymMatrix& s) {
  const Vector e = e_vec(s);
  return e[0] > zero_threshold(e);
}

bool is_positive_semidefinite(const SymMatrix& s) {
  const Vector e = e_vec(s);
  return e[0] >= -zero_threshold(e);
}

SymMatrix psd_sqrt(const SymMatrix& s) {
  return spectral_apply(s, [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
}

SymMatrix psd_inverse_sqrt(const SymMatrix& s) {
  const auto eig = sym_eigen(s);
  const double tol = zero_threshold(eig.values);
  Vector mapped = eig.values.unaryExpr([tol](double x) { return x > tol ? 1.0 / std::sqrt(x) : 0.0; });
  return SymMatrix::from_spectrum(mapped, eig.vectors);
}

SymMatrix pd_inverse(const SymMatrix& s) {
  const auto eig = sym_eigen(s);
  if (!(eig.values[0] > zero_threshold(eig.values)))
    throw SingularRepresentation("matrix is not positive definite");
  return SymMatrix::from_spectrum(eig.values.cwiseInverse(), eig.vectors);
}

SymMatrix left_polar_factor(const Matrix& p) {
  return psd_sqrt(SymMatrix(p * p.transpose()));
}

Vector svec(const SymMatrix& s) {
  const int d = s.dim();
  Vector v(svec_size(d));
  int k = 0;
  for (int j = 0; j < d; ++j)
    for (int i = 0; i <= j; ++i) v[k++] = (i == j) ? s(i, j) : std::numbers::sqrt2 * s(i, j);
  return v;
}

SymMatrix smat(const Eigen::Ref<const Vector>& v, int d) {
  Matrix m(d, d);
  int k = 0;
  for (int j = 0; j < d; ++j)
    for (int i = 0; i <= j; ++i) {
      const double x = (i == j) ? v[k] : v[k] / std::numbers::sqrt2;
      m(i, j) = m(j, i) = x;
      ++k;
    }
  return SymMatrix(m);
}

}  // namespace extell
