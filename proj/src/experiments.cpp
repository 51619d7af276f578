#include "extell/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "extell/parallel.hpp"

namespace extell {

namespace {

constexpr int kSquareScanPoints = 2001;
constexpr double kSquareTarget = 19.9248;

double square_f(double a, double b) {
  static const SizeFunction f = builtin("square_counterexample");
  return f(Vector{{a, b}});
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Golden-section minimization of fn on [lo, hi].
template <class Fn>
double golden_min(Fn&& fn, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = fn(x1), f2 = fn(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = fn(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = fn(x2);
    }
  }
  return 0.5 * (lo + hi);
}

nlohmann::json row_json(const SquareScanRow& r) {
  return {{"alpha", r.alpha},
          {"a", r.a},
          {"b", r.b},
          {"f", r.f},
          {"coefficients", {r.alpha, 0.0, 1.0 - r.alpha, 0.0, 0.0, -1.0}}};
}

nlohmann::json row_json(const TriangleScanRow& r) {
  return {{"k", r.k}, {"a", r.a}, {"b", r.b}, {"f_eccentric", r.f_eccentric}, {"f_literal", r.f_literal}};
}

KinkReport kink_at(double k0, Modulus m) {
  constexpr double h = 1e-4;
  auto f = [m](double k) {
    const auto r = triangle_family_point(k);
    return m == Modulus::Eccentric ? r.f_eccentric : r.f_literal;
  };
  KinkReport out;
  const double mid = f(k0);
  out.left_slope = (mid - f(k0 - h)) / h;
  out.right_slope = (f(k0 + h) - mid) / h;
  out.jump = std::abs(out.right_slope - out.left_slope);
  const double scale = std::max({1.0, std::abs(out.left_slope), std::abs(out.right_slope)});
  out.kink = out.jump > 1e-3 * scale;
  return out;
}

}  // namespace

SquareScanRow square_pencil_point(double alpha) {
  SquareScanRow r;
  r.alpha = alpha;
  r.a = 1.0 / std::sqrt(alpha);
  r.b = 1.0 / std::sqrt(1.0 - alpha);
  r.f = square_f(r.a, r.b);
  return r;
}

double square_closed_form_alpha() {
  return 32.0 / 257.0 * std::cbrt(2.0) - 4.0 / 257.0 * std::cbrt(4.0) + 1.0 / 257.0;
}

SquareRepro repro_square(int jobs) {
  SquareRepro out;
  out.rows.resize(kSquareScanPoints);
  parallel_for(out.rows.size(), jobs, [&](std::size_t i) {
    out.rows[i] = square_pencil_point(static_cast<double>(i + 1) / (kSquareScanPoints + 1));
  });
  out.circle = square_pencil_point(0.5);
  for (int i = 0; i < kSquareScanPoints; ++i)
    out.symmetry_max_diff =
        std::max(out.symmetry_max_diff, std::abs(out.rows[i].f - out.rows[kSquareScanPoints - 1 - i].f));

  const int mid = kSquareScanPoints / 2;  // alpha = 1/2
  for (int side = 0; side < 2; ++side) {
    const int lo = side == 0 ? 0 : mid + 1;
    const int hi = side == 0 ? mid : kSquareScanPoints;
    int best = lo;
    for (int i = lo; i < hi; ++i)
      if (out.rows[i].f < out.rows[best].f) best = i;
    const double a_lo = best > 0 ? out.rows[best - 1].alpha : out.rows[best].alpha / 2.0;
    const double a_hi = best + 1 < kSquareScanPoints ? out.rows[best + 1].alpha : (1.0 + out.rows[best].alpha) / 2.0;
    const double alpha = golden_min([](double x) { return square_pencil_point(x).f; }, a_lo, a_hi);
    out.minimizers[side] = square_pencil_point(alpha);
  }
  return out;
}

TriangleScanRow triangle_family_point(double k) {
  TriangleScanRow r;
  r.k = k;
  r.b = k;
  r.a = std::sqrt(std::max(0.0, 0.25 - k / std::numbers::sqrt3));
  r.f_eccentric = arc_length(r.a, r.b, Modulus::Eccentric);
  r.f_literal = arc_length(r.a, r.b, Modulus::Literal);
  return r;
}

TriangleRepro repro_triangle(Modulus primary, int jobs) {
  TriangleRepro out;
  out.primary = primary;
  const double k_max = std::numbers::sqrt3 / 4.0;
  out.rows.resize(kTriangleScanPoints);
  parallel_for(out.rows.size(), jobs, [&](std::size_t i) {
    out.rows[i] = triangle_family_point(k_max * static_cast<double>(i + 1) / kTriangleScanPoints);
  });
  const double k_circle = std::numbers::sqrt3 / 6.0;
  out.incircle = triangle_family_point(k_circle);
  out.limit = triangle_family_point(kTriangleLimitK);
  out.scan_max_eccentric = out.rows.front();
  out.scan_max_literal = out.rows.front();
  for (const auto& r : out.rows) {
    if (r.f_eccentric > out.scan_max_eccentric.f_eccentric) out.scan_max_eccentric = r;
    if (r.f_literal > out.scan_max_literal.f_literal) out.scan_max_literal = r;
  }
  out.kink_eccentric = kink_at(k_circle, Modulus::Eccentric);
  out.kink_literal = kink_at(k_circle, Modulus::Literal);
  return out;
}

void write_csv(std::ostream& os, const SquareRepro& r) {
  os << "alpha,a,b,f\n";
  for (const auto& row : r.rows) os << g17(row.alpha) << ',' << g17(row.a) << ',' << g17(row.b) << ',' << g17(row.f) << '\n';
}

void write_csv(std::ostream& os, const TriangleRepro& r) {
  os << "k,a,b,f_eccentric,f_literal\n";
  for (const auto& row : r.rows)
    os << g17(row.k) << ',' << g17(row.a) << ',' << g17(row.b) << ',' << g17(row.f_eccentric) << ','
       << g17(row.f_literal) << '\n';
}

nlohmann::json summary_json(const SquareRepro& r) {
  const double circle_target = 17.0 * std::numbers::sqrt2;
  const double alpha_star = square_closed_form_alpha();
  nlohmann::json j;
  j["experiment"] = "square";
  j["scan_points"] = r.rows.size();
  j["circle"] = row_json(r.circle);
  j["circle"]["target"] = circle_target;
  j["circle"]["abs_diff"] = std::abs(r.circle.f - circle_target);
  auto& mins = j["minimizers"] = nlohmann::json::array();
  for (const auto& m : r.minimizers) {
    const double target_alpha = m.alpha < 0.5 ? alpha_star : 1.0 - alpha_star;
    nlohmann::json e = row_json(m);
    e["closed_form_alpha"] = target_alpha;
    e["alpha_abs_diff"] = std::abs(m.alpha - target_alpha);
    e["target_f"] = kSquareTarget;
    e["f_abs_diff"] = std::abs(m.f - kSquareTarget);
    mins.push_back(e);
  }
  j["minimizer_gap"] = std::abs(r.minimizers[0].f - r.minimizers[1].f);
  j["circle_exceeds_minimum"] = r.circle.f > std::max(r.minimizers[0].f, r.minimizers[1].f);
  j["symmetry_max_diff"] = r.symmetry_max_diff;
  return j;
}

nlohmann::json summary_json(const TriangleRepro& r) {
  const double circle_target = std::numbers::pi / std::numbers::sqrt3;
  const double limit_target = 2.0;
  nlohmann::json j;
  j["experiment"] = "triangle";
  j["primary_modulus"] = r.primary == Modulus::Eccentric ? "eccentric" : "literal";
  j["scan_points"] = r.rows.size();
  const auto conv = [&](const char* name, double TriangleScanRow::*field, const TriangleScanRow& smax,
                        const KinkReport& kink) {
    nlohmann::json c;
    c["incircle"] = {{"value", r.incircle.*field},
                     {"target", circle_target},
                     {"abs_diff", std::abs(r.incircle.*field - circle_target)}};
    c["limit"] = {{"k", r.limit.k},
                  {"value", r.limit.*field},
                  {"target", limit_target},
                  {"abs_diff", std::abs(r.limit.*field - limit_target)}};
    c["scan_max"] = {{"k", smax.k}, {"value", smax.*field}};
    c["scan_max_exceeds_incircle"] = smax.*field > r.incircle.*field;
    c["kink_at_incircle"] = {{"left_slope", kink.left_slope},
                             {"right_slope", kink.right_slope},
                             {"jump", kink.jump},
                             {"detected", kink.kink}};
    j["conventions"][name] = c;
  };
  conv("eccentric", &TriangleScanRow::f_eccentric, r.scan_max_eccentric, r.kink_eccentric);
  conv("literal", &TriangleScanRow::f_literal, r.scan_max_literal, r.kink_literal);
  j["incircle"] = row_json(r.incircle);
  j["limit"] = row_json(r.limit);
  const auto& primary = j["conventions"][r.primary == Modulus::Eccentric ? "eccentric" : "literal"];
  j["incircle_value"] = primary["incircle"]["value"];
  j["limit_value"] = primary["limit"]["value"];
  return j;
}

}  // namespace extell
