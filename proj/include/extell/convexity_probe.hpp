#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "extell/size_function.hpp"

namespace extell {

enum class Curvature { Convex, Concave };

enum class ProbeDomain {
  Positive,     ///< entries log-uniform in [1e-2, 1e2]
  Nonnegative,  ///< as Positive, each entry zero with probability 1/10
  Matrices      ///< V diag(spectrum) V^T with Haar V, spectrum from `spectrum_domain`
};

std::string to_string(Curvature c);
std::string to_string(ProbeDomain d);

/// Segment on which the midpoint inequality failed.
struct ProbeWitness {
  Matrix first;   ///< endpoint (column vector for vector domains)
  Matrix second;
  double f_mid = 0.0;
  double f_average = 0.0;
};

struct ProbeReport {
  Curvature property = Curvature::Convex;
  double p = 1.0;
  ProbeDomain domain = ProbeDomain::Positive;
  ProbeDomain spectrum_domain = ProbeDomain::Positive;
  int dim = 2;
  int trials = 0;
  int violations = 0;
  int resampled = 0;  ///< draws rejected for equal spectra or pole hits
  double worst_gap = 0.0;  ///< largest midpoint-inequality excess, scaled
  std::optional<ProbeWitness> witness;

  bool holds() const { return violations == 0; }
};

inline constexpr double kProbeTol = 1e-9;

/// Midpoint test of f o w^p (vector domains) or f o w^p o e (matrix domain).
/// A trial is a violation when the midpoint excess exceeds 1e-9 * max(1, |average|).
ProbeReport convexity_probe(const SizeFunction& f, double p, Curvature property, ProbeDomain domain, int trials,
                            std::uint64_t seed, int dim = 0,
                            ProbeDomain spectrum_domain = ProbeDomain::Positive);

/// Vector-domain probe and the matrix probe over spectra from the same domain.
struct DavisAgreement {
  ProbeReport vector;
  ProbeReport matrix;
  bool agree() const { return vector.holds() == matrix.holds(); }
};
DavisAgreement davis_agreement(const SizeFunction& f, double p, Curvature property, ProbeDomain vector_domain,
                               int trials, std::uint64_t seed, int dim = 0);

}  // namespace extell
