#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "extell/experiments.hpp"

using namespace extell;

namespace {

double square_f(double alpha) {
  const double a = 1.0 / std::sqrt(alpha), b = 1.0 / std::sqrt(1.0 - alpha);
  return std::max(a, b) + 16.0 * std::min(a, b);
}

// Stationary point of alpha^{-1/2} + 16 (1 - alpha)^{-1/2}: (1 - alpha) / alpha = 16^{2/3}.
double square_oracle_alpha() { return 1.0 / (1.0 + std::cbrt(256.0)); }

// Support value of an axis-aligned ellipse in direction n.
double support(double cx, double cy, double a, double b, double nx, double ny) {
  return nx * cx + ny * cy + std::hypot(a * nx, b * ny);
}

}  // namespace

TEST(SquarePencil, PassesThroughCorners) {
  for (double alpha : {0.1, 0.3, 0.5, 0.77}) {
    const auto r = square_pencil_point(alpha);
    EXPECT_NEAR(1.0 / (r.a * r.a) + 1.0 / (r.b * r.b), 1.0, 1e-14);
    EXPECT_NEAR(r.f, square_f(alpha), 1e-13);
  }
}

TEST(SquarePencil, ClosedFormMatchesStationaryPoint) {
  EXPECT_NEAR(square_closed_form_alpha(), square_oracle_alpha(), 1e-15);
}

TEST(ReproSquare, CircleAndMinimizers) {
  const auto r = repro_square();
  ASSERT_EQ(r.rows.size(), 2001u);
  EXPECT_NEAR(r.rows.front().alpha, 1.0 / 2002.0, 1e-17);
  EXPECT_NEAR(r.circle.f, 17.0 * std::sqrt(2.0), 1e-12);
  const double alpha = square_oracle_alpha();
  EXPECT_NEAR(r.minimizers[0].alpha, alpha, 1e-6);
  EXPECT_NEAR(r.minimizers[1].alpha, 1.0 - alpha, 1e-6);
  EXPECT_NEAR(r.minimizers[0].f, square_f(alpha), 1e-10);
  EXPECT_NEAR(r.minimizers[0].f, 19.9248, 1e-3);
  EXPECT_NEAR(r.minimizers[0].f, r.minimizers[1].f, 1e-10);
  EXPECT_LT(r.symmetry_max_diff, 1e-9);
  for (const auto& row : r.rows) EXPECT_GE(row.f, r.minimizers[0].f - 1e-9);
}

TEST(ReproSquare, CsvAndSummary) {
  const auto r = repro_square(2);
  std::ostringstream os;
  write_csv(os, r);
  const std::string csv = os.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "alpha,a,b,f");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2002);
  const auto j = summary_json(r);
  EXPECT_DOUBLE_EQ(j["circle"]["target"].get<double>(), 17.0 * std::sqrt(2.0));
  EXPECT_LT(j["circle"]["abs_diff"].get<double>(), 1e-9);
  EXPECT_TRUE(j["circle_exceeds_minimum"].get<bool>());
  EXPECT_EQ(j["minimizers"].size(), 2u);
}

TEST(ReproSquare, DeterministicAcrossJobCounts) {
  std::ostringstream a, b;
  write_csv(a, repro_square(1));
  write_csv(b, repro_square(4));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(summary_json(repro_square(1)).dump(), summary_json(repro_square(3)).dump());
}

TEST(TriangleFamily, EllipsesTouchAllThreeSides) {
  const double r3 = std::sqrt(3.0);
  for (double k : {1e-6, 0.01, 0.1, 0.2, r3 / 6.0, 0.35, 0.42}) {
    const auto row = triangle_family_point(k);
    // sides y >= 0, sqrt3 x - y >= 0, sqrt3 (1 - x) - y >= 0 with unit outward normals
    EXPECT_NEAR(support(0.5, k, row.a, row.b, 0.0, -1.0), 0.0, 1e-12);
    EXPECT_NEAR(support(0.5, k, row.a, row.b, -r3 / 2.0, 0.5), 0.0, 1e-12);
    EXPECT_NEAR(support(0.5, k, row.a, row.b, r3 / 2.0, 0.5), r3 / 2.0, 1e-12);
  }
}

TEST(TriangleFamily, IncircleAndLimitValues) {
  const auto in = triangle_family_point(std::sqrt(3.0) / 6.0);
  EXPECT_NEAR(in.a, in.b, 1e-15);
  EXPECT_NEAR(in.f_eccentric, std::numbers::pi / std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(in.f_literal, std::numbers::pi / std::sqrt(3.0), 1e-12);
  const auto lim = triangle_family_point(kTriangleLimitK);
  EXPECT_NEAR(lim.f_eccentric, 2.0, 1e-6);
  EXPECT_NEAR(lim.f_literal, 2.0, 1e-6);
}

TEST(ReproTriangle, BothConventions) {
  const auto r = repro_triangle();
  ASSERT_EQ(static_cast<int>(r.rows.size()), kTriangleScanPoints);
  EXPECT_GT(r.scan_max_eccentric.f_eccentric, r.incircle.f_eccentric);
  EXPECT_GT(r.scan_max_literal.f_literal, r.incircle.f_literal);
  EXPECT_FALSE(r.kink_eccentric.kink);
  EXPECT_TRUE(r.kink_literal.kink);
  EXPECT_NEAR(r.kink_literal.left_slope, -r.kink_literal.right_slope, 1e-2);
  const auto j = summary_json(r);
  for (const char* c : {"eccentric", "literal"}) {
    EXPECT_LT(j["conventions"][c]["incircle"]["abs_diff"].get<double>(), 1e-9) << c;
    EXPECT_LT(j["conventions"][c]["limit"]["abs_diff"].get<double>(), 1e-6) << c;
    EXPECT_TRUE(j["conventions"][c]["scan_max_exceeds_incircle"].get<bool>()) << c;
  }
}

TEST(ReproTriangle, CsvHeaderAndPrimaryModulus) {
  const auto r = repro_triangle(Modulus::Literal, 2);
  EXPECT_EQ(r.primary, Modulus::Literal);
  std::ostringstream os;
  write_csv(os, r);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "k,a,b,f_eccentric,f_literal");
  EXPECT_EQ(summary_json(r)["primary_modulus"], "literal");
}
