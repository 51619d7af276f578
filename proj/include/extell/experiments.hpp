#pragma once

#include <ostream>
#include <vector>

#include "json.hpp"

#include "extell/size_function.hpp"

namespace extell {

/// One point of the pencil alpha x^2 + (1 - alpha) y^2 = 1 through (+-1, +-1).
struct SquareScanRow {
  double alpha = 0.0;
  double a = 0.0;  ///< x semi-axis, alpha^{-1/2}
  double b = 0.0;  ///< y semi-axis, (1 - alpha)^{-1/2}
  double f = 0.0;  ///< max + 16 min
};

SquareScanRow square_pencil_point(double alpha);

/// Closed-form minimizing coefficient 32/257 2^{1/3} - 4/257 2^{2/3} + 1/257.
double square_closed_form_alpha();

struct SquareRepro {
  std::vector<SquareScanRow> rows;  ///< alpha_i = i / 2002, i = 1..2001
  SquareScanRow circle;
  SquareScanRow minimizers[2];  ///< alpha < 1/2 first
  double symmetry_max_diff = 0.0;  ///< max |f(alpha_i) - f(alpha_{2002-i})|
};

SquareRepro repro_square(int jobs = 1);

/// Symmetric ellipse inscribed in the unit equilateral triangle: center
/// (1/2, k), vertical semi-axis b = k, horizontal a = sqrt(1/4 - k / sqrt 3).
struct TriangleScanRow {
  double k = 0.0;
  double a = 0.0;
  double b = 0.0;
  double f_eccentric = 0.0;
  double f_literal = 0.0;
};

TriangleScanRow triangle_family_point(double k);
inline constexpr int kTriangleScanPoints = 2001;
/// Parameter used for the degenerate-side limit.
inline constexpr double kTriangleLimitK = 1e-12;

/// Left/right difference slopes of f(k) at the incircle.
struct KinkReport {
  double left_slope = 0.0;
  double right_slope = 0.0;
  double jump = 0.0;  ///< |right - left|
  bool kink = false;  ///< jump above 1e-3 of the slope scale
};

struct TriangleRepro {
  std::vector<TriangleScanRow> rows;  ///< k_i = (sqrt 3 / 4) i / 2001, i = 1..2001
  TriangleScanRow incircle;
  TriangleScanRow limit;
  TriangleScanRow scan_max_eccentric;
  TriangleScanRow scan_max_literal;
  KinkReport kink_eccentric;
  KinkReport kink_literal;
  Modulus primary = Modulus::Eccentric;
};

TriangleRepro repro_triangle(Modulus primary = Modulus::Eccentric, int jobs = 1);

/// CSV with a fixed header and 17 significant digits.
void write_csv(std::ostream& os, const SquareRepro& r);
void write_csv(std::ostream& os, const TriangleRepro& r);

/// Summary with target constants and absolute differences.
nlohmann::json summary_json(const SquareRepro& r);
nlohmann::json summary_json(const TriangleRepro& r);

}  // namespace extell
