#include "extell/in_between.hpp"

#include <stdexcept>

namespace extell {

namespace {

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::out_of_range("in-between: lambda outside [0, 1]");
}

Vector lerp(const Vector& a, const Vector& b, double lambda) {
  if (lambda == 0.0) return a;
  if (lambda == 1.0) return b;
  return (1.0 - lambda) * a + lambda * b;
}

AffineMap between_affine(const AffineMap& e0, const AffineMap& e1, double lambda, AffineMode mode) {
  check_lambda(lambda);
  if (e0.mode() != mode || e1.mode() != mode) throw std::invalid_argument("in-between: endpoint mode mismatch");
  if (e0.dim() != e1.dim()) throw std::invalid_argument("in-between: dimension mismatch");
  if (lambda == 0.0) return e0;
  if (lambda == 1.0) return e1;
  return AffineMap(SymMatrix::lerp(e0.P(), e1.P(), lambda), lerp(e0.t(), e1.t(), lambda), mode);
}

HomogeneousQuadric combine(const HomogeneousQuadric& a, const HomogeneousQuadric& b, double lambda, QuadricKind kind) {
  check_lambda(lambda);
  if (a.kind != kind || b.kind != kind) throw std::invalid_argument("in-between: quadric kind mismatch");
  if (a.dim() != b.dim()) throw std::invalid_argument("in-between: dimension mismatch");
  return {SymMatrix::lerp(a.M, b.M, lambda), kind};
}

}  // namespace

AffineMap between_image(const AffineMap& e0, const AffineMap& e1, double lambda) {
  return between_affine(e0, e1, lambda, AffineMode::Image);
}

AffineMap between_preimage(const AffineMap& e0, const AffineMap& e1, double lambda) {
  return between_affine(e0, e1, lambda, AffineMode::PreImage);
}

BetweenQuadric between_homogeneous(const HomogeneousQuadric& m0, const HomogeneousQuadric& m1, double lambda) {
  BetweenQuadric out{combine(m0, m1, lambda, QuadricKind::Point), false, std::nullopt};
  out.ellipsoid = homogeneous_to_quadric(out.quadric);
  out.is_ellipsoid = out.ellipsoid.has_value();
  return out;
}

BetweenQuadric between_dual(const HomogeneousQuadric& n0, const HomogeneousQuadric& n1, double lambda) {
  BetweenQuadric out{combine(n0, n1, lambda, QuadricKind::Dual), false, std::nullopt};
  out.ellipsoid = dual_homogeneous_to_quadric(out.quadric);
  out.is_ellipsoid = out.ellipsoid.has_value();
  return out;
}

BetweenQuadric between_dual(const DualEllipsoid& e0, const DualEllipsoid& e1, double lambda) {
  return between_dual(dual_to_homogeneous(e0), dual_to_homogeneous(e1), lambda);
}

InBetweenFamily::InBetweenFamily(AffineMap e0, AffineMap e1)
    : rep_(e0.mode() == AffineMode::Image ? Representation::Image : Representation::PreImage),
      ends_(std::pair{std::move(e0), std::move(e1)}) {
  const auto& [a, b] = std::get<0>(ends_);
  if (a.mode() != b.mode()) throw std::invalid_argument("InBetweenFamily: endpoint mode mismatch");
}

InBetweenFamily::InBetweenFamily(HomogeneousQuadric e0, HomogeneousQuadric e1)
    : rep_(e0.kind == QuadricKind::Point ? Representation::Homogeneous : Representation::Dual),
      ends_(std::pair{std::move(e0), std::move(e1)}) {
  const auto& [a, b] = std::get<1>(ends_);
  if (a.kind != b.kind) throw std::invalid_argument("InBetweenFamily: endpoint kind mismatch");
}

InBetweenFamily::Member InBetweenFamily::at(double lambda) const {
  switch (rep_) {
    case Representation::Image: {
      const auto& [a, b] = std::get<0>(ends_);
      return between_image(a, b, lambda);
    }
    case Representation::PreImage: {
      const auto& [a, b] = std::get<0>(ends_);
      return between_preimage(a, b, lambda);
    }
    case Representation::Homogeneous: {
      const auto& [a, b] = std::get<1>(ends_);
      return between_homogeneous(a, b, lambda);
    }
    case Representation::Dual: {
      const auto& [a, b] = std::get<1>(ends_);
      return between_dual(a, b, lambda);
    }
  }
  throw std::logic_error("InBetweenFamily: bad representation");
}

}  // namespace extell
