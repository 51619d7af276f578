#pragma once

#include <optional>
#include <variant>

#include "extell/ellipsoid.hpp"

namespace extell {

/// Convex combination of representation parameters; lambda in [0, 1].
/// lambda = 0 and lambda = 1 return the endpoints unchanged.
AffineMap between_image(const AffineMap& e0, const AffineMap& e1, double lambda);
AffineMap between_preimage(const AffineMap& e0, const AffineMap& e1, double lambda);

/// In-between homogeneous quadric together with its point ellipsoid, when it is one.
struct BetweenQuadric {
  HomogeneousQuadric quadric;
  bool is_ellipsoid = false;
  std::optional<QuadricEllipsoid> ellipsoid;
};

/// M = (1 - lambda) M0 + lambda M1 for normalized point quadrics.
BetweenQuadric between_homogeneous(const HomogeneousQuadric& m0, const HomogeneousQuadric& m1, double lambda);

/// N = (1 - lambda) N0 + lambda N1 for dual quadrics. Not every member of the
/// family is an ellipsoid; the flag reports it, nothing throws.
BetweenQuadric between_dual(const HomogeneousQuadric& n0, const HomogeneousQuadric& n1, double lambda);
BetweenQuadric between_dual(const DualEllipsoid& e0, const DualEllipsoid& e1, double lambda);

enum class Representation { Image, PreImage, Homogeneous, Dual };

/// Two endpoints in one representation and the lambda -> E_lambda map.
class InBetweenFamily {
 public:
  using Member = std::variant<AffineMap, BetweenQuadric>;

  InBetweenFamily(AffineMap e0, AffineMap e1);
  InBetweenFamily(HomogeneousQuadric e0, HomogeneousQuadric e1);

  Representation representation() const { return rep_; }
  Member at(double lambda) const;

 private:
  Representation rep_;
  std::variant<std::pair<AffineMap, AffineMap>, std::pair<HomogeneousQuadric, HomogeneousQuadric>> ends_;
};

}  // namespace extell
