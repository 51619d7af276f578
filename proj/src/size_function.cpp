#include "extell/size_function.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "extell/errors.hpp"

namespace extell {

double SizeFunction::operator()(std::span<const double> a) const {
  if (dimension && static_cast<int>(a.size()) != *dimension)
    throw DomainError(name + ": expects " + std::to_string(*dimension) + " semi-axes, got " +
                      std::to_string(a.size()));
  std::vector<double> sorted(a.begin(), a.end());
  for (double x : sorted)
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError(name + ": semi-axes must be finite and non-negative");
  std::sort(sorted.begin(), sorted.end());
  return eval(sorted);
}

double unit_ball_volume(int d) {
  if (d < 0) throw std::invalid_argument("unit_ball_volume: negative dimension");
  double k = (d % 2 == 0) ? 1.0 : 2.0;
  for (int n = (d % 2 == 0) ? 2 : 3; n <= d; n += 2) k *= 2.0 * std::numbers::pi / n;
  return k;
}

double elliptic_E(double k, double k_complement) {
  if (!(k >= 0.0 && k <= 1.0)) throw DomainError("elliptic_E: modulus outside [0, 1]");
  if (k_complement == 0.0) return 1.0;
  double a = 1.0;
  double b = k_complement;
  double c = k;
  double weight = 0.5;
  double sum = weight * c * c;
  for (int n = 0; n < 64 && std::abs(c) > 1e-17 * a; ++n) {
    const double an = 0.5 * (a + b);
    c = 0.5 * (a - b);
    b = std::sqrt(a * b);
    a = an;
    weight *= 2.0;
    sum += weight * c * c;
  }
  return std::numbers::pi / (2.0 * a) * (1.0 - sum);
}

double elliptic_E(double k) {
  if (!(k >= 0.0 && k <= 1.0)) throw DomainError("elliptic_E: modulus outside [0, 1]");
  return elliptic_E(k, std::sqrt((1.0 - k) * (1.0 + k)));
}

double arc_length(double a, double b, Modulus modulus) {
  if (!(a >= 0.0) || !(b >= 0.0)) throw DomainError("arc_length: negative semi-axis");
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  if (hi == 0.0) return 0.0;
  const double r = lo / hi;
  if (modulus == Modulus::Eccentric) return 4.0 * hi * elliptic_E(std::sqrt((1.0 - r) * (1.0 + r)), r);
  const double k = 1.0 - r;
  return 4.0 * hi * elliptic_E(k, std::sqrt(r * (2.0 - r)));
}

namespace {

double product(std::span<const double> a) { return std::accumulate(a.begin(), a.end(), 1.0, std::multiplies<>()); }

SizeFunction make_volume() {
  SizeFunction f;
  f.name = "volume";
  f.eval = [](std::span<const double> a) { return unit_ball_volume(static_cast<int>(a.size())) * product(a); };
  f.gradient = [](std::span<const double> a) {
    const double kappa = unit_ball_volume(static_cast<int>(a.size()));
    Vector g(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
      double p = kappa;
      for (std::size_t j = 0; j < a.size(); ++j)
        if (j != i) p *= a[j];
      g[static_cast<Eigen::Index>(i)] = p;
    }
    return g;
  };
  return f;
}

SizeFunction make_sum() {
  SizeFunction f;
  f.name = "sum";
  f.eval = [](std::span<const double> a) { return std::accumulate(a.begin(), a.end(), 0.0); };
  f.gradient = [](std::span<const double> a) { return Vector(Vector::Ones(static_cast<Eigen::Index>(a.size()))); };
  return f;
}

SizeFunction make_sqrt_sum() {
  SizeFunction f;
  f.name = "sqrt_sum";
  f.eval = [](std::span<const double> a) {
    double s = 0.0;
    for (double x : a) s += std::sqrt(x);
    return s;
  };
  f.gradient = [](std::span<const double> a) {
    Vector g(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) g[static_cast<Eigen::Index>(i)] = 0.5 / std::sqrt(a[i]);
    return g;
  };
  return f;
}

SizeFunction make_pnorm(double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw std::invalid_argument("pnorm: exponent must be >= 1");
  SizeFunction f;
  f.name = "pnorm:" + std::to_string(q);
  f.eval = [q](std::span<const double> a) {
    double s = 0.0;
    for (double x : a) s += std::pow(x, q);
    return std::pow(s, 1.0 / q);
  };
  f.gradient = [q](std::span<const double> a) {
    double s = 0.0;
    for (double x : a) s += std::pow(x, q);
    const double norm = std::pow(s, 1.0 / q);
    Vector g(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
      g[static_cast<Eigen::Index>(i)] = norm > 0.0 ? std::pow(a[i] / norm, q - 1.0) : 0.0;
    return g;
  };
  return f;
}

SizeFunction make_square_counterexample() {
  SizeFunction f;
  f.name = "square_counterexample";
  f.dimension = 2;
  f.eval = [](std::span<const double> a) { return std::max(a[0], a[1]) + 16.0 * std::min(a[0], a[1]); };
  f.gradient = [](std::span<const double> a) {
    if (a[0] < a[1]) return Vector{{16.0, 1.0}};
    if (a[0] > a[1]) return Vector{{1.0, 16.0}};
    return Vector{{8.5, 8.5}};
  };
  return f;
}

SizeFunction make_arc_length(Modulus modulus) {
  SizeFunction f;
  f.name = modulus == Modulus::Eccentric ? "arc_length" : "arc_length:literal";
  f.dimension = 2;
  f.eval = [modulus](std::span<const double> a) { return arc_length(a[0], a[1], modulus); };
  return f;
}

}  // namespace

SizeFunction builtin(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string{} : spec.substr(colon + 1);
  auto no_arg = [&] {
    if (!arg.empty()) throw std::invalid_argument("size function '" + name + "' takes no parameter");
  };
  if (name == "volume") return no_arg(), make_volume();
  if (name == "sum") return no_arg(), make_sum();
  if (name == "sqrt_sum") return no_arg(), make_sqrt_sum();
  if (name == "square_counterexample") return no_arg(), make_square_counterexample();
  if (name == "pnorm") {
    if (arg.empty()) throw std::invalid_argument("pnorm needs an exponent, e.g. pnorm:2");
    std::size_t used = 0;
    const double q = std::stod(arg, &used);
    if (used != arg.size()) throw std::invalid_argument("pnorm: bad exponent '" + arg + "'");
    return make_pnorm(q);
  }
  if (name == "arc_length") {
    if (arg.empty() || arg == "eccentric") return make_arc_length(Modulus::Eccentric);
    if (arg == "literal") return make_arc_length(Modulus::Literal);
    throw std::invalid_argument("arc_length: unknown modulus '" + arg + "'");
  }
  throw std::invalid_argument("unknown size function '" + spec + "'");
}

Vector w_pow(double p, const Vector& x) {
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double ax = std::abs(x[i]);
    if (p < 0.0 && ax == 0.0) throw DomainError("w_pow: zero entry with negative exponent");
    out[i] = p == 1.0 ? ax : std::pow(ax, p);
  }
  return out;
}

double eval_on_matrix(const SizeFunction& f, double p, const SymMatrix& s) { return f(w_pow(p, e_vec(s))); }

Vector size_gradient(const SizeFunction& f, const Vector& a) {
  const std::span<const double> view(a.data(), static_cast<std::size_t>(a.size()));
  if (f.gradient) return f.gradient(view);
  Vector g(a.size());
  Vector probe = a;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double h = 1e-6 * std::max(std::abs(a[i]), 1e-3);
    const double x = a[i];
    if (x - h < 0.0) {
      probe[i] = x + h;
      const double up = f(probe);
      probe[i] = x;
      g[i] = (up - f(probe)) / h;
    } else {
      probe[i] = x + h;
      const double up = f(probe);
      probe[i] = x - h;
      const double down = f(probe);
      g[i] = (up - down) / (2.0 * h);
    }
    probe[i] = x;
  }
  return g;
}

SpectralValue spectral_size(const SizeFunction& f, double p, const SymMatrix& s) {
  const auto eig = sym_eigen(s);
  const auto n = eig.values.size();
  const Vector sigma = w_pow(p, eig.values);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return sigma[i] < sigma[j]; });
  Vector a(n);
  for (Eigen::Index k = 0; k < n; ++k) a[k] = sigma[order[static_cast<std::size_t>(k)]];

  SpectralValue out;
  out.value = f(a);
  const Vector ga = size_gradient(f, a);
  Vector dlam(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index i = order[static_cast<std::size_t>(k)];
    const double lam = eig.values[i];
    const double sgn = lam > 0.0 ? 1.0 : (lam < 0.0 ? -1.0 : 0.0);
    const double dsigma = p == 1.0 ? sgn : p * std::pow(std::abs(lam), p - 1.0) * sgn;
    dlam[i] = ga[k] * dsigma;
  }
  out.gradient = SymMatrix::from_spectrum(dlam, eig.vectors);
  return out;
}

}  // namespace extell
