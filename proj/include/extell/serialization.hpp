#pragma once

#include "json.hpp"

#include "extell/ellipsoid.hpp"
#include "extell/polytope.hpp"

namespace extell {

using json = nlohmann::json;

json to_json_value(const Vector& v);
json to_json_value(const Matrix& m);
Vector vector_from_json(const json& j);
Matrix matrix_from_json(const json& j);

void to_json(json& j, const SymMatrix& s);
void to_json(json& j, const QuadricEllipsoid& e);  // {"center", "shape"}
void to_json(json& j, const AffineMap& e);         // {"P", "t", "mode"}
void to_json(json& j, const DualEllipsoid& e);     // {"B", "c"}
void to_json(json& j, const HomogeneousQuadric& e);  // {"M", "kind"}
void to_json(json& j, const HPolytope& f);         // {"rows": [{"a", "b"}]}
void to_json(json& j, const SemiAxes& a);

}  // namespace extell

namespace nlohmann {

template <>
struct adl_serializer<extell::SymMatrix> {
  static extell::SymMatrix from_json(const json& j);
  static void to_json(json& j, const extell::SymMatrix& s) { extell::to_json(j, s); }
};
template <>
struct adl_serializer<extell::QuadricEllipsoid> {
  static extell::QuadricEllipsoid from_json(const json& j);
  static void to_json(json& j, const extell::QuadricEllipsoid& e) { extell::to_json(j, e); }
};
template <>
struct adl_serializer<extell::AffineMap> {
  static extell::AffineMap from_json(const json& j);
  static void to_json(json& j, const extell::AffineMap& e) { extell::to_json(j, e); }
};
template <>
struct adl_serializer<extell::DualEllipsoid> {
  static extell::DualEllipsoid from_json(const json& j);
  static void to_json(json& j, const extell::DualEllipsoid& e) { extell::to_json(j, e); }
};
template <>
struct adl_serializer<extell::HomogeneousQuadric> {
  static extell::HomogeneousQuadric from_json(const json& j);
  static void to_json(json& j, const extell::HomogeneousQuadric& e) { extell::to_json(j, e); }
};
template <>
struct adl_serializer<extell::HPolytope> {
  static extell::HPolytope from_json(const json& j);
  static void to_json(json& j, const extell::HPolytope& f) { extell::to_json(j, f); }
};

}  // namespace nlohmann
