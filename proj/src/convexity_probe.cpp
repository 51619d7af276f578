#include "extell/convexity_probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "extell/errors.hpp"
#include "extell/random.hpp"

namespace extell {

std::string to_string(Curvature c) { return c == Curvature::Convex ? "convex" : "concave"; }

std::string to_string(ProbeDomain d) {
  switch (d) {
    case ProbeDomain::Positive:
      return "positive";
    case ProbeDomain::Nonnegative:
      return "nonnegative";
    case ProbeDomain::Matrices:
      return "matrices";
  }
  return "?";
}

namespace {

Vector draw_vector(Rng& rng, int d, ProbeDomain domain) {
  Vector v(d);
  for (int i = 0; i < d; ++i) {
    v[i] = rng.log_uniform(1e-2, 1e2);
    if (domain == ProbeDomain::Nonnegative && rng.uniform() < 0.1) v[i] = 0.0;
  }
  return v;
}

}  // namespace

ProbeReport convexity_probe(const SizeFunction& f, double p, Curvature property, ProbeDomain domain, int trials,
                            std::uint64_t seed, int dim, ProbeDomain spectrum_domain) {
  if (trials < 1) throw std::invalid_argument("convexity_probe: trials must be >= 1");
  if (spectrum_domain == ProbeDomain::Matrices)
    throw std::invalid_argument("convexity_probe: spectrum domain must be a vector domain");
  const int d = dim > 0 ? dim : f.dimension.value_or(2);

  ProbeReport report;
  report.property = property;
  report.p = p;
  report.domain = domain;
  report.spectrum_domain = domain == ProbeDomain::Matrices ? spectrum_domain : domain;
  report.dim = d;
  report.trials = trials;
  report.worst_gap = -std::numeric_limits<double>::infinity();

  Rng rng(seed);
  const ProbeDomain draw_domain = report.spectrum_domain;
  const double sign = property == Curvature::Convex ? 1.0 : -1.0;

  for (int trial = 0; trial < trials;) {
    Vector x = draw_vector(rng, d, draw_domain);
    Vector y = draw_vector(rng, d, draw_domain);
    Vector xs = x, ys = y;
    std::sort(xs.data(), xs.data() + d);
    std::sort(ys.data(), ys.data() + d);
    if ((xs - ys).cwiseAbs().maxCoeff() == 0.0) {
      ++report.resampled;
      continue;
    }
    double f_x = 0.0, f_y = 0.0, f_mid = 0.0;
    Matrix first, second;
    try {
      if (domain == ProbeDomain::Matrices) {
        const SymMatrix s0 = SymMatrix::from_spectrum(x, rng.orthogonal(d));
        const SymMatrix s1 = SymMatrix::from_spectrum(y, rng.orthogonal(d));
        f_x = eval_on_matrix(f, p, s0);
        f_y = eval_on_matrix(f, p, s1);
        f_mid = eval_on_matrix(f, p, SymMatrix::lerp(s0, s1, 0.5));
        first = s0.matrix();
        second = s1.matrix();
      } else {
        f_x = f(w_pow(p, x));
        f_y = f(w_pow(p, y));
        f_mid = f(w_pow(p, 0.5 * (x + y)));
        first = x;
        second = y;
      }
    } catch (const DomainError&) {
      ++report.resampled;
      continue;
    }
    ++trial;
    const double average = 0.5 * (f_x + f_y);
    const double gap = sign * (f_mid - average) / std::max(1.0, std::abs(average));
    if (gap > report.worst_gap) report.worst_gap = gap;
    if (gap > kProbeTol) {
      if (!report.witness || gap >= report.worst_gap)
        report.witness = ProbeWitness{first, second, f_mid, average};
      ++report.violations;
    }
  }
  return report;
}

DavisAgreement davis_agreement(const SizeFunction& f, double p, Curvature property, ProbeDomain vector_domain,
                               int trials, std::uint64_t seed, int dim) {
  if (vector_domain == ProbeDomain::Matrices)
    throw std::invalid_argument("davis_agreement: vector domain expected");
  DavisAgreement out{convexity_probe(f, p, property, vector_domain, trials, seed, dim),
                     convexity_probe(f, p, property, ProbeDomain::Matrices, trials, derive_seed(seed, 1), dim,
                                     vector_domain)};
  return out;
}

}  // namespace extell
