#include "extell/serialization.hpp"

#include <stdexcept>

namespace extell {

json to_json_value(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i] + 0.0);  // drops negative zero
  return out;
}

json to_json_value(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j) + 0.0);
    out.push_back(std::move(row));
  }
  return out;
}

Vector vector_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected a JSON array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a non-empty JSON array of rows");
  const auto rows = j.size();
  const auto cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw std::invalid_argument("ragged matrix in JSON");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
  }
  return m;
}

void to_json(json& j, const SymMatrix& s) { j = to_json_value(s.matrix()); }

void to_json(json& j, const QuadricEllipsoid& e) {
  j = json{{"center", to_json_value(e.center())}, {"shape", to_json_value(e.shape().matrix())}};
}

void to_json(json& j, const AffineMap& e) {
  j = json{{"P", to_json_value(e.P().matrix())},
           {"t", to_json_value(e.t())},
           {"mode", e.mode() == AffineMode::Image ? "image" : "preimage"}};
}

void to_json(json& j, const DualEllipsoid& e) {
  j = json{{"B", to_json_value(e.B().matrix())}, {"c", to_json_value(e.c())}};
}

void to_json(json& j, const HomogeneousQuadric& e) {
  j = json{{"M", to_json_value(e.M.matrix())}, {"kind", e.kind == QuadricKind::Point ? "point" : "dual"}};
}

void to_json(json& j, const HPolytope& f) {
  json rows = json::array();
  for (const auto& r : f.rows()) rows.push_back(json{{"a", to_json_value(r.a)}, {"b", r.b}});
  j = json{{"rows", std::move(rows)}};
}

void to_json(json& j, const SemiAxes& a) { j = to_json_value(a.a); }

}  // namespace extell

namespace nlohmann {

extell::SymMatrix adl_serializer<extell::SymMatrix>::from_json(const json& j) {
  return extell::SymMatrix(extell::matrix_from_json(j));
}

extell::QuadricEllipsoid adl_serializer<extell::QuadricEllipsoid>::from_json(const json& j) {
  return extell::QuadricEllipsoid(extell::vector_from_json(j.at("center")),
                                  extell::SymMatrix(extell::matrix_from_json(j.at("shape"))));
}

extell::AffineMap adl_serializer<extell::AffineMap>::from_json(const json& j) {
  const std::string mode = j.value("mode", std::string("image"));
  extell::AffineMode m;
  if (mode == "image") {
    m = extell::AffineMode::Image;
  } else if (mode == "preimage") {
    m = extell::AffineMode::PreImage;
  } else {
    throw std::invalid_argument("unknown affine mode '" + mode + "'");
  }
  return extell::AffineMap(extell::SymMatrix(extell::matrix_from_json(j.at("P"))),
                           extell::vector_from_json(j.at("t")), m);
}

extell::DualEllipsoid adl_serializer<extell::DualEllipsoid>::from_json(const json& j) {
  return extell::DualEllipsoid(extell::SymMatrix(extell::matrix_from_json(j.at("B"))),
                               extell::vector_from_json(j.at("c")));
}

extell::HomogeneousQuadric adl_serializer<extell::HomogeneousQuadric>::from_json(const json& j) {
  const std::string kind = j.value("kind", std::string("point"));
  if (kind != "point" && kind != "dual") throw std::invalid_argument("unknown quadric kind '" + kind + "'");
  return {extell::SymMatrix(extell::matrix_from_json(j.at("M"))),
          kind == "point" ? extell::QuadricKind::Point : extell::QuadricKind::Dual};
}

extell::HPolytope adl_serializer<extell::HPolytope>::from_json(const json& j) {
  const json& rows = j.contains("rows") ? j.at("rows") : j.at("halfspaces");
  std::vector<extell::HalfSpace> out;
  for (const auto& r : rows) out.push_back({extell::vector_from_json(r.at("a")), r.at("b").get<double>()});
  return extell::HPolytope(std::move(out));
}

}  // namespace nlohmann
