#include "extell/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "extell/convexity_probe.hpp"
#include "extell/errors.hpp"
#include "extell/parallel.hpp"
#include "extell/random.hpp"
#include "extell/serialization.hpp"

namespace extell {

void SolverConfig::validate() const {
  if (max_iterations < 1 || max_rounds < 1) throw std::invalid_argument("SolverConfig: iteration limits must be >= 1");
  if (!(objective_tol > 0.0) || !(constraint_tol > 0.0) || !(stationarity_tol > 0.0))
    throw std::invalid_argument("SolverConfig: tolerances must be > 0");
  if (!(penalty_growth > 1.0) || !(initial_penalty > 0.0))
    throw std::invalid_argument("SolverConfig: penalty must be > 0 and grow by a factor > 1");
  if (!(armijo > 0.0 && armijo < 1.0) || !(backtrack > 0.0 && backtrack < 1.0))
    throw std::invalid_argument("SolverConfig: line-search parameters must lie in (0, 1)");
  if (lbfgs_memory < 1) throw std::invalid_argument("SolverConfig: lbfgs_memory must be >= 1");
  if (multistart < 1) throw std::invalid_argument("SolverConfig: multistart must be >= 1");
  if (probe_trials < 0) throw std::invalid_argument("SolverConfig: probe_trials must be >= 0");
}

int UniquenessReport::candidate_count() const {
  return static_cast<int>(std::count_if(clusters.begin(), clusters.end(), [](const Cluster& c) { return c.candidate; }));
}

int Problem::dim() const {
  if (polytope) return polytope->dim();
  if (points.empty()) throw std::invalid_argument("Problem: no points");
  return static_cast<int>(points.front().size());
}

namespace {

enum class AxisMap { InverseAbs, Abs, Sqrt };

/// log f(sorted semi-axes) for semi-axes scale * map(e(S)); gradient w.r.t. S.
double log_size(const SizeFunction& f, const SymMatrix& s, AxisMap map, double scale, Matrix* grad) {
  const auto eig = sym_eigen(s);
  const int d = s.dim();
  Vector sigma(d), dsig(d);
  for (int i = 0; i < d; ++i) {
    const double lam = eig.values[i];
    const double sgn = lam >= 0.0 ? 1.0 : -1.0;
    switch (map) {
      case AxisMap::InverseAbs:
        if (lam == 0.0) return std::numeric_limits<double>::infinity();
        sigma[i] = scale / std::abs(lam);
        dsig[i] = -scale * sgn / (lam * lam);
        break;
      case AxisMap::Abs:
        sigma[i] = scale * std::abs(lam);
        dsig[i] = scale * sgn;
        break;
      case AxisMap::Sqrt: {
        const double l = std::max(lam, 0.0);
        sigma[i] = scale * std::sqrt(l);
        dsig[i] = scale / (2.0 * std::sqrt(std::max(l, 1e-300)));
        break;
      }
    }
  }
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return sigma[a] < sigma[b]; });
  Vector a(d);
  for (int k = 0; k < d; ++k) a[k] = sigma[order[k]];
  if (!a.allFinite()) return std::numeric_limits<double>::infinity();
  const double value = f.eval(std::span<const double>(a.data(), a.size()));
  if (!(value > 0.0) || !std::isfinite(value))
    return value == 0.0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  if (grad) {
    const Vector gs = size_gradient(f, a);
    Vector h(d);
    for (int k = 0; k < d; ++k) h[order[k]] = gs[k] * dsig[order[k]] / value;
    *grad = eig.vectors * h.asDiagonal() * eig.vectors.transpose();
  }
  return std::log(value);
}

/// svec of (u v^T + v u^T) / 2.
Vector svec_sym_outer(const Vector& u, const Vector& v) {
  const int d = static_cast<int>(u.size());
  Vector out(svec_size(d));
  int k = 0;
  for (int j = 0; j < d; ++j)
    for (int i = 0; i <= j; ++i)
      out[k++] = (i == j) ? u[i] * v[i] : std::numbers::sqrt2 * 0.5 * (u[i] * v[j] + u[j] * v[i]);
  return out;
}

/// svec of a symmetric Eigen matrix without the symmetry check.
Vector svec_raw(const Matrix& m) {
  const int d = static_cast<int>(m.rows());
  Vector out(svec_size(d));
  int k = 0;
  for (int j = 0; j < d; ++j)
    for (int i = 0; i <= j; ++i) out[k++] = (i == j) ? m(i, i) : std::numbers::sqrt2 * 0.5 * (m(i, j) + m(j, i));
  return out;
}

Matrix smat_raw(const Eigen::Ref<const Vector>& v, int d) {
  Matrix m(d, d);
  int k = 0;
  for (int j = 0; j < d; ++j)
    for (int i = 0; i <= j; ++i) {
      m(i, j) = m(j, i) = (i == j) ? v[k] : v[k] / std::numbers::sqrt2;
      ++k;
    }
  return m;
}

Vector lower_entries(const Matrix& m) {
  const int d = static_cast<int>(m.rows());
  Vector out(svec_size(d));
  int k = 0;
  for (int j = 0; j < d; ++j)
    for (int i = j; i < d; ++i) out[k++] = m(i, j);
  return out;
}

Matrix lower_from(const Eigen::Ref<const Vector>& v, int d) {
  Matrix l = Matrix::Zero(d, d);
  int k = 0;
  for (int j = 0; j < d; ++j)
    for (int i = j; i < d; ++i) l(i, j) = v[k++];
  return l;
}

/// |S| and the sign matrix V sgn(L) V^T for S = V L V^T.
std::pair<Matrix, Matrix> abs_and_sign(const Matrix& s) {
  const auto eig = sym_eigen(SymMatrix(0.5 * (s + s.transpose())));
  Vector a = eig.values.cwiseAbs();
  Vector sg = eig.values.unaryExpr([](double x) { return x >= 0.0 ? 1.0 : -1.0; });
  return {eig.vectors * a.asDiagonal() * eig.vectors.transpose(),
          eig.vectors * sg.asDiagonal() * eig.vectors.transpose()};
}

Matrix random_shape(Rng& rng, int d) {
  const Matrix r = rng.orthogonal(d);
  Vector diag(d);
  for (int i = 0; i < d; ++i) diag[i] = std::exp(0.5 * rng.normal());
  return r * diag.asDiagonal() * r.transpose();
}

AugmentedLagrangianOptions al_options(const SolverConfig& cfg) {
  AugmentedLagrangianOptions o;
  o.max_rounds = cfg.max_rounds;
  o.inner.max_iterations = cfg.max_iterations;
  o.inner.memory = cfg.lbfgs_memory;
  o.inner.armijo = cfg.armijo;
  o.inner.backtrack = cfg.backtrack;
  o.inner.grad_tol = 1e-12;
  o.initial_penalty = cfg.initial_penalty;
  o.penalty_growth = cfg.penalty_growth;
  o.stationarity_tol = cfg.stationarity_tol;
  o.objective_tol = cfg.objective_tol;
  o.feasibility_tol = std::min(1e-11, cfg.constraint_tol);
  return o;
}

void copy_run_info(SolveResult& out, const AugmentedLagrangianResult& al) {
  out.iterations = al.iterations;
  out.rounds = al.rounds;
  out.converged = al.converged;
  out.message = al.message;
  out.trace = al.trace;
}

/// Inscribed optima may sit on a flat ellipsoid, where the constraints are
/// not differentiable; accept a settled feasible run there.
void accept_flat_optimum(SolveResult& out, const AugmentedLagrangianResult& al, const SolverConfig& cfg) {
  if (out.converged) return;
  const Vector axes = semi_axes(out.ellipsoid).a;
  const bool flat = axes[0] <= 1e-8 * axes[axes.size() - 1];
  if (flat && al.max_violation <= cfg.constraint_tol && al.objective_change <= cfg.objective_tol &&
      out.feasibility_slack >= -cfg.constraint_tol) {
    out.converged = true;
    out.message = "converged to a flat ellipsoid on the boundary of the feasible set";
  }
}

std::string vec_text(const Vector& v) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << "]";
  return os.str();
}

std::vector<double> to_std(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

void probe_gate(SolveResult& r, const SizeFunction& f, double p, Curvature c, ProbeDomain domain, int d,
                const SolverConfig& cfg) {
  if (cfg.probe_trials == 0) return;
  if (f.dimension && *f.dimension != d) return;
  const auto rep = convexity_probe(f, p, c, domain, cfg.probe_trials, cfg.seed, d);
  if (!rep.holds()) {
    std::ostringstream os;
    os << "convexity probe: " << f.name << " o w^" << p << " is not " << to_string(c) << " on " << to_string(domain)
       << " vectors (" << rep.violations << "/" << rep.trials << " violations); the optimum may not be unique";
    r.warnings.push_back(os.str());
  }
}

int affine_rank(const std::vector<Vector>& pts) {
  const int d = static_cast<int>(pts.front().size());
  Vector c = Vector::Zero(d);
  for (const auto& x : pts) c += x;
  c /= static_cast<double>(pts.size());
  Matrix scatter = Matrix::Zero(d, d);
  for (const auto& x : pts) scatter += (x - c) * (x - c).transpose();
  const Vector e = e_vec(SymMatrix(scatter));
  const double top = e.cwiseAbs().maxCoeff();
  if (top == 0.0) return 0;
  return static_cast<int>((e.array() > 1e-20 * std::max(1.0, top) && e.array() > 1e-12 * top).count());
}

// ---------------------------------------------------------------- enclosing

struct EncloseSetup {
  std::vector<Vector> points;
  std::vector<Vector> y;  // normalized
  Vector shift;
  double scale = 1.0;
  int d = 0;
  int rank = 0;
};

EncloseSetup prepare_enclose(const std::vector<Vector>& points) {
  if (points.empty()) throw std::invalid_argument("solve_min_enclosing: no points");
  EncloseSetup s;
  s.points = points;
  s.d = static_cast<int>(points.front().size());
  if (s.d < 1 || s.d > kMaxDimension) throw std::invalid_argument("solve_min_enclosing: unsupported dimension");
  for (const auto& x : points) {
    if (x.size() != s.d) throw std::invalid_argument("solve_min_enclosing: points of mixed dimension");
    if (!x.allFinite()) throw std::invalid_argument("solve_min_enclosing: non-finite coordinate");
  }
  s.shift = Vector::Zero(s.d);
  for (const auto& x : points) s.shift += x;
  s.shift /= static_cast<double>(points.size());
  double r = 0.0;
  for (const auto& x : points) r = std::max(r, (x - s.shift).norm());
  s.scale = r > 0.0 ? r : 1.0;
  for (const auto& x : points) s.y.push_back((x - s.shift) / s.scale);
  s.rank = affine_rank(points);
  return s;
}

SolveResult run_enclose(const EncloseSetup& s, const SizeFunction& f, SolverConfig cfg,
                        std::optional<std::uint64_t> perturb) {
  const int d = s.d;
  const int k = svec_size(d);
  const int n = static_cast<int>(s.y.size());
  const bool degenerate = s.rank < d;
  if (degenerate) {
    cfg.max_rounds = std::min(cfg.max_rounds, 2);
    cfg.max_iterations = std::min(cfg.max_iterations, 200);
  }

  Matrix p0 = Matrix::Identity(d, d) / 1.1;
  Vector t0 = Vector::Zero(d);
  if (perturb) {
    Rng rng(*perturb);
    p0 = random_shape(rng, d);
    t0 = -(p0 * (0.2 * rng.normal_vector(d)));
    double reach = 0.0;
    for (const auto& y : s.y) reach = std::max(reach, (p0 * y + t0).norm());
    p0 /= 1.05 * reach;
    t0 /= 1.05 * reach;
  }
  Vector theta0(k + d);
  theta0 << svec_raw(p0), t0;

  ConstrainedProblem prob;
  prob.n = k + d;
  prob.m = n;
  prob.objective = [&](const Vector& th, Vector* grad) {
    Matrix g;
    const double v = log_size(f, SymMatrix(smat_raw(th.head(k), d)), AxisMap::InverseAbs, s.scale, grad ? &g : nullptr);
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    if (grad) {
      grad->resize(k + d);
      *grad << svec_raw(g), Vector::Zero(d);
    }
    return v;
  };
  prob.constraints = [&](const Vector& th, Vector& g, Matrix* jac) {
    const Matrix p = smat_raw(th.head(k), d);
    const Vector t = th.tail(d);
    g.resize(n);
    if (jac) jac->resize(n, k + d);
    for (int i = 0; i < n; ++i) {
      const Vector v = p * s.y[i] + t;
      const double nv = v.norm();
      g[i] = nv - 1.0;
      if (jac) {
        const Vector u = nv > 0.0 ? Vector(v / nv) : Vector::Zero(d);
        jac->row(i) << svec_sym_outer(u, s.y[i]).transpose(), u.transpose();
      }
    }
  };

  const auto al = minimize_augmented_lagrangian(prob, theta0, al_options(cfg));
  SolveResult out;
  copy_run_info(out, al);

  const auto [pabs, sign] = abs_and_sign(smat_raw(al.x.head(k), d));
  const Vector tn = sign * al.x.tail(d);
  Matrix p = pabs / s.scale;
  Vector t = tn - p * s.shift;
  double reach = 0.0;
  for (const auto& x : s.points) reach = std::max(reach, (p * x + t).norm());
  if (reach > 1.0) {
    p /= reach;
    t /= reach;
    reach = 1.0;
  }
  out.feasibility_slack = 1.0 - reach;
  if (degenerate) {
    out.converged = false;
    out.rank = s.rank;
    out.message = "points do not span the space affinely (rank " + std::to_string(s.rank) +
                  "); minimizing sequence degenerates toward a flat ellipsoid";
  }
  try {
    out.ellipsoid = AffineMap(SymMatrix(p), t, AffineMode::PreImage);
    out.quadric = affine_to_quadric(out.ellipsoid);
    out.objective = f(semi_axes(out.ellipsoid).a);
  } catch (const Error& e) {
    out.ellipsoid = AffineMap(SymMatrix(p), t, AffineMode::Image);
    out.quadric.reset();
    out.objective = std::numeric_limits<double>::quiet_NaN();
    out.converged = false;
    out.message = std::string("result is not a regular ellipsoid: ") + e.what();
  }
  return out;
}

// ---------------------------------------------------------------- inscribed

struct InscribeSetup {
  HPolytope polytope{std::vector<HalfSpace>{{Vector::Ones(1), 1.0}, {-Vector::Ones(1), 1.0}}};
  std::vector<HalfSpace> rows;  // normalized
  Vector shift;
  double scale = 1.0;
  int d = 0;
  std::optional<Vector> center;  // normalized
};

double min_slack(const HPolytope& F, const Vector& x, int* row) {
  const Vector s = F.slacks(x);
  Eigen::Index j = 0;
  const double v = s.minCoeff(&j);
  if (row) *row = static_cast<int>(j);
  return v;
}

InscribeSetup prepare_inscribe(const HPolytope& F, const std::optional<Vector>& fixed_center) {
  preflight_polytope(F);
  InscribeSetup s;
  s.polytope = F;
  s.d = F.dim();
  if (s.d > kMaxDimension) throw std::invalid_argument("solve_max_inscribed: unsupported dimension");
  if (fixed_center) {
    if (fixed_center->size() != s.d) throw std::invalid_argument("solve_max_inscribed: center has the wrong dimension");
    int row = -1;
    const double slack = min_slack(F, *fixed_center, &row);
    if (!(slack > 0.0))
      throw PreflightError("center is not interior: row " + std::to_string(row) + " has slack " + std::to_string(slack),
                           to_std(*fixed_center), row);
  }
  const auto ball = chebyshev_ball(F);
  s.shift = ball.center;
  s.scale = ball.radius;
  for (const auto& h : F.rows()) s.rows.push_back({h.a, (h.b - h.a.dot(s.shift)) / s.scale});
  if (fixed_center) s.center = (*fixed_center - s.shift) / s.scale;
  return s;
}

SolveResult finish_inscribed(const InscribeSetup& s, Matrix p, const Vector& t) {
  SolveResult out;
  double factor = 1.0;
  for (const auto& h : s.polytope.rows()) {
    const double room = h.b - h.a.dot(t);
    const double need = (p * h.a).norm();
    if (need > room && need > 0.0 && room > 0.0) factor = std::min(factor, room / need);
  }
  p *= factor;
  double slack = std::numeric_limits<double>::infinity();
  for (const auto& h : s.polytope.rows()) slack = std::min(slack, h.b - h.a.dot(t) - (p * h.a).norm());
  out.feasibility_slack = slack;
  out.ellipsoid = AffineMap(SymMatrix(p), t, AffineMode::Image);
  if (is_positive_definite(out.ellipsoid.P())) out.quadric = affine_to_quadric(out.ellipsoid);
  return out;
}

SolveResult run_inscribe(const InscribeSetup& s, const SizeFunction& f, const SolverConfig& cfg,
                         std::optional<std::uint64_t> perturb) {
  const int d = s.d;
  const int k = svec_size(d);
  const int m = static_cast<int>(s.rows.size());
  const bool fixed = s.center.has_value();
  const int nt = fixed ? 0 : d;

  Vector t0 = fixed ? *s.center : Vector::Zero(d);
  Matrix p0 = Matrix::Identity(d, d);
  Rng rng(perturb.value_or(0));
  if (perturb) {
    p0 = random_shape(rng, d);
    if (!fixed) t0 = 0.5 * rng.unit_vector(d) * std::pow(rng.uniform(), 1.0 / d);
  }
  double factor = std::numeric_limits<double>::infinity();
  for (const auto& h : s.rows) factor = std::min(factor, (h.b - h.a.dot(t0)) / (p0 * h.a).norm());
  p0 *= 0.9 * factor;

  Vector theta0(k + nt);
  if (fixed) theta0 = svec_raw(p0);
  else theta0 << svec_raw(p0), t0;

  ConstrainedProblem prob;
  prob.n = k + nt;
  prob.m = m;
  prob.objective = [&](const Vector& th, Vector* grad) {
    Matrix g;
    const double v = log_size(f, SymMatrix(smat_raw(th.head(k), d)), AxisMap::Abs, s.scale, grad ? &g : nullptr);
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    if (grad) {
      grad->resize(k + nt);
      grad->head(k) = -svec_raw(g);
      if (nt) grad->tail(nt).setZero();
    }
    return -v;
  };
  prob.constraints = [&](const Vector& th, Vector& g, Matrix* jac) {
    const Matrix p = smat_raw(th.head(k), d);
    const Vector t = fixed ? *s.center : Vector(th.tail(d));
    g.resize(m);
    if (jac) jac->resize(m, k + nt);
    for (int j = 0; j < m; ++j) {
      const auto& h = s.rows[j];
      const Vector v = p * h.a;
      const double nv = v.norm();
      g[j] = nv + h.a.dot(t) - h.b;
      if (jac) {
        const Vector u = nv > 0.0 ? Vector(v / nv) : Vector::Zero(d);
        jac->row(j).head(k) = svec_sym_outer(u, h.a).transpose();
        if (nt) jac->row(j).tail(nt) = h.a.transpose();
      }
    }
  };

  const auto al = minimize_augmented_lagrangian(prob, theta0, al_options(cfg));
  const Matrix pabs = abs_and_sign(smat_raw(al.x.head(k), d)).first;
  const Vector tn = fixed ? *s.center : Vector(al.x.tail(d));
  SolveResult out = finish_inscribed(s, s.scale * pabs, s.shift + s.scale * tn);
  copy_run_info(out, al);
  out.objective = f(semi_axes(out.ellipsoid).a);
  accept_flat_optimum(out, al, cfg);
  return out;
}

SolveResult run_inscribe_dual(const InscribeSetup& s, const SizeFunction& f, const SolverConfig& cfg,
                              std::optional<std::uint64_t> perturb) {
  const int d = s.d;
  const int k = svec_size(d);
  const int m = static_cast<int>(s.rows.size());
  // re-normalize around the requested center
  const Vector& c = *s.center;
  std::vector<double> room(m);
  double r = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m; ++j) {
    room[j] = s.rows[j].b - s.rows[j].a.dot(c);
    r = std::min(r, room[j]);
  }
  for (auto& v : room) v /= r;

  Matrix q0 = Matrix::Identity(d, d);
  if (perturb) {
    Rng rng(*perturb);
    q0 = random_shape(rng, d);
  }
  double factor = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m; ++j) factor = std::min(factor, room[j] * room[j] / s.rows[j].a.dot(q0 * s.rows[j].a));
  q0 *= 0.81 * factor;
  const Matrix l0 = Eigen::LLT<Matrix>(q0).matrixL();

  ConstrainedProblem prob;
  prob.n = k;
  prob.m = m;
  prob.objective = [&](const Vector& th, Vector* grad) {
    const Matrix l = lower_from(th, d);
    Matrix g;
    const double v =
        log_size(f, SymMatrix(l * l.transpose()), AxisMap::Sqrt, s.scale * r, grad ? &g : nullptr);
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    if (grad) *grad = -lower_entries(2.0 * g * l);
    return -v;
  };
  prob.constraints = [&](const Vector& th, Vector& g, Matrix* jac) {
    const Matrix l = lower_from(th, d);
    g.resize(m);
    if (jac) jac->resize(m, k);
    for (int j = 0; j < m; ++j) {
      const Vector& a = s.rows[j].a;
      const Vector v = l.transpose() * a;
      const double s2 = room[j] * room[j];
      g[j] = v.squaredNorm() / s2 - 1.0;
      if (jac) jac->row(j) = lower_entries(2.0 * a * v.transpose() / s2).transpose();
    }
  };

  const auto al = minimize_augmented_lagrangian(prob, lower_entries(l0), al_options(cfg));
  const Matrix l = lower_from(al.x, d);
  const double unit = s.scale * r;
  Matrix q = unit * unit * (l * l.transpose());
  q = 0.5 * (q + q.transpose());
  const Vector center = s.shift + s.scale * c;
  double shrink = 1.0;
  for (const auto& h : s.polytope.rows()) {
    const double slack = h.b - h.a.dot(center);
    const double need = h.a.dot(q * h.a);
    if (need > slack * slack) shrink = std::min(shrink, slack * slack / need);
  }
  q *= shrink;
  const SymMatrix qs(q);
  SolveResult out = finish_inscribed(s, psd_sqrt(qs).matrix(), center);
  out.dual_block = qs;
  copy_run_info(out, al);
  out.objective = f(semi_axes(out.ellipsoid).a);
  accept_flat_optimum(out, al, cfg);
  return out;
}

// ---------------------------------------------------------------- starts

/// One prepared problem; `run` performs a single start.
struct Prepared {
  ProblemMode mode = ProblemMode::Enclose;
  std::optional<EncloseSetup> enclose;
  std::optional<InscribeSetup> inscribe;
  std::vector<std::string> warnings;

  SolveResult run(const SizeFunction& f, const SolverConfig& cfg, std::optional<std::uint64_t> perturb) const {
    switch (mode) {
      case ProblemMode::Enclose: return run_enclose(*enclose, f, cfg, perturb);
      case ProblemMode::Inscribe: return run_inscribe(*inscribe, f, cfg, perturb);
      case ProblemMode::InscribeDual: return run_inscribe_dual(*inscribe, f, cfg, perturb);
    }
    throw std::logic_error("unreachable");
  }
};

Prepared prepare(const Problem& problem, const SizeFunction& f, const SolverConfig& cfg) {
  cfg.validate();
  Prepared p;
  p.mode = problem.mode;
  SolveResult probe;
  if (problem.mode == ProblemMode::Enclose) {
    p.enclose = prepare_enclose(problem.points);
    probe_gate(probe, f, -1.0, Curvature::Convex, ProbeDomain::Positive, p.enclose->d, cfg);
  } else {
    if (!problem.polytope) throw std::invalid_argument("inscribed problem without half-spaces");
    if (problem.mode == ProblemMode::InscribeDual && !problem.center)
      throw std::invalid_argument("the dual-parametrized solver needs a fixed center");
    p.inscribe = prepare_inscribe(*problem.polytope, problem.center);
    if (problem.mode == ProblemMode::Inscribe)
      probe_gate(probe, f, 1.0, Curvature::Concave, ProbeDomain::Positive, p.inscribe->d, cfg);
    else
      probe_gate(probe, f, 0.5, Curvature::Concave, ProbeDomain::Nonnegative, p.inscribe->d, cfg);
  }
  if (f.dimension && *f.dimension != problem.dim())
    throw std::invalid_argument("size function " + f.name + " is defined for d = " + std::to_string(*f.dimension));
  p.warnings = probe.warnings;
  return p;
}

bool minimizing(ProblemMode mode) { return mode == ProblemMode::Enclose; }

bool better(const SolveResult& a, const SolveResult& b, ProblemMode mode) {
  if (a.converged != b.converged) return a.converged;
  if (std::isnan(b.objective)) return !std::isnan(a.objective);
  return minimizing(mode) ? a.objective < b.objective : a.objective > b.objective;
}

std::vector<SolveResult> run_starts(const Prepared& prep, const SizeFunction& f, const SolverConfig& cfg, int n,
                                    std::uint64_t seed) {
  std::vector<SolveResult> results(static_cast<std::size_t>(n));
  parallel_for(results.size(), cfg.jobs, [&](std::size_t i) {
    results[i] = prep.run(f, cfg, derive_seed(seed, i));
  });
  return results;
}

SolveResult solve_prepared(const Prepared& prep, const SizeFunction& f, const SolverConfig& cfg) {
  if (cfg.multistart == 1) {
    SolveResult r = prep.run(f, cfg, std::nullopt);
    r.warnings = prep.warnings;
    return r;
  }
  auto runs = run_starts(prep, f, cfg, cfg.multistart, cfg.seed);
  std::size_t best = 0;
  int total = 0;
  std::vector<StartRecord> records;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    total += runs[i].iterations;
    records.push_back({static_cast<int>(i), derive_seed(cfg.seed, i), runs[i].objective, runs[i].converged,
                       runs[i].iterations});
    if (better(runs[i], runs[best], prep.mode)) best = i;
  }
  SolveResult r = std::move(runs[best]);
  r.starts = std::move(records);
  r.iterations = total;
  r.warnings = prep.warnings;
  return r;
}

}  // namespace

// ---------------------------------------------------------------- public

SolveResult khachiyan_mvee(const std::vector<Vector>& points, double eps, int max_iterations) {
  if (!(eps > 0.0)) throw std::invalid_argument("khachiyan_mvee: eps must be > 0");
  if (points.empty()) throw std::invalid_argument("khachiyan_mvee: no points");
  const int d_full = static_cast<int>(points.front().size());
  for (const auto& x : points)
    if (x.size() != d_full) throw std::invalid_argument("khachiyan_mvee: points of mixed dimension");
  const int n = static_cast<int>(points.size());

  Vector mean = Vector::Zero(d_full);
  for (const auto& x : points) mean += x;
  mean /= n;
  Matrix scatter = Matrix::Zero(d_full, d_full);
  for (const auto& x : points) scatter += (x - mean) * (x - mean).transpose();
  const auto eig = sym_eigen(SymMatrix(scatter));
  const double top = eig.values.cwiseAbs().maxCoeff();
  int rank = 0;
  for (int i = 0; i < d_full; ++i)
    if (eig.values[i] > 1e-12 * top && top > 0.0) ++rank;
  if (rank == 0) throw std::invalid_argument("khachiyan_mvee: all points coincide");
  // basis of the affine hull: eigenvectors of the largest eigenvalues
  const Matrix basis = eig.vectors.rightCols(rank);
  const int d = rank;

  Matrix q(d + 1, n);
  for (int i = 0; i < n; ++i) {
    q.block(0, i, d, 1) = basis.transpose() * (points[i] - mean);
    q(d, i) = 1.0;
  }
  Vector u = Vector::Constant(n, 1.0 / n);
  const double dd = d + 1.0;
  Vector kappa(n);
  int it = 0;
  bool converged = false;
  for (; it < max_iterations; ++it) {
    const Matrix mm = q * u.asDiagonal() * q.transpose();
    const Eigen::LDLT<Matrix> ldlt(mm);
    kappa = (q.array() * ldlt.solve(q).array()).colwise().sum().transpose();
    Eigen::Index j = 0;
    const double kmax = kappa.maxCoeff(&j);
    int kmin_i = -1;
    double kmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      if (u[i] > 0.0 && kappa[i] < kmin) {
        kmin = kappa[i];
        kmin_i = i;
      }
    const double up = kmax / dd - 1.0;
    const double down = 1.0 - kmin / dd;
    if (up <= eps && down <= eps) {
      converged = true;
      break;
    }
    if (up > down) {
      const double beta = (kmax - dd) / (dd * (kmax - 1.0));
      u *= 1.0 - beta;
      u[j] += beta;
    } else {
      double beta = (dd - kmin) / (dd * (kmin - 1.0));
      beta = std::min(beta, u[kmin_i] / (1.0 - u[kmin_i]));
      u *= 1.0 + beta;
      u[kmin_i] -= beta;
      if (u[kmin_i] < 1e-300) u[kmin_i] = 0.0;
    }
  }

  const Matrix x = q.topRows(d);
  const Vector c = x * u;
  Matrix s = x * u.asDiagonal() * x.transpose() - c * c.transpose();
  s = 0.5 * (s + s.transpose());
  const SymMatrix s_inv = pd_inverse(SymMatrix(s));
  double reach = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vector y = x.col(i) - c;
    reach = std::max(reach, y.dot(s_inv.matrix() * y));
  }
  const SymMatrix a_low = s_inv * (1.0 / reach);

  SolveResult out;
  out.iterations = it;
  out.rounds = 1;
  out.converged = converged;
  out.message = converged ? "converged" : "iteration limit reached";
  const Vector center = mean + basis * c;
  if (rank == d_full) {
    const QuadricEllipsoid e(center, SymMatrix(basis * a_low.matrix() * basis.transpose()));
    out.quadric = e;
    out.ellipsoid = quadric_to_preimage(e);
    out.objective = unit_ball_volume(d) * std::exp(-0.5 * e_vec(e.shape()).array().log().sum());
  } else {
    out.rank = rank;
    out.message += "; affine rank " + std::to_string(rank) + ", solved in the affine hull";
    const SymMatrix root = psd_inverse_sqrt(a_low);
    out.ellipsoid = AffineMap(SymMatrix(basis * root.matrix() * basis.transpose()), center, AffineMode::Image);
    out.objective = unit_ball_volume(d) * std::exp(-0.5 * e_vec(a_low).array().log().sum());
  }
  double worst = 0.0;
  for (const auto& p : points) worst = std::max(worst, -membership_slack(out.ellipsoid, p));
  out.feasibility_slack = -worst;
  return out;
}

SolveResult solve_min_enclosing(const std::vector<Vector>& points, const SizeFunction& f, const SolverConfig& cfg) {
  Problem p;
  p.mode = ProblemMode::Enclose;
  p.points = points;
  return solve(p, f, cfg);
}

SolveResult solve_max_inscribed(const HPolytope& F, const SizeFunction& f, const SolverConfig& cfg,
                                const std::optional<Vector>& fixed_center) {
  Problem p;
  p.mode = ProblemMode::Inscribe;
  p.polytope = F;
  p.center = fixed_center;
  return solve(p, f, cfg);
}

SolveResult solve_max_inscribed_fixed_center_dual(const HPolytope& F, const Vector& center, const SizeFunction& f,
                                                  const SolverConfig& cfg) {
  Problem p;
  p.mode = ProblemMode::InscribeDual;
  p.polytope = F;
  p.center = center;
  return solve(p, f, cfg);
}

SolveResult solve(const Problem& problem, const SizeFunction& f, const SolverConfig& cfg) {
  return solve_prepared(prepare(problem, f, cfg), f, cfg);
}

ChebyshevBall chebyshev_ball(const HPolytope& F) {
  const int d = F.dim();
  const int m = static_cast<int>(F.size());
  double scale = 1.0;
  for (const auto& h : F.rows()) scale = std::max(scale, std::abs(h.b));
  ConstrainedProblem prob;
  prob.n = d + 1;
  prob.m = m;
  prob.objective = [&](const Vector& x, Vector* grad) {
    if (grad) {
      *grad = Vector::Zero(d + 1);
      (*grad)[d] = -1.0;
    }
    return -x[d];
  };
  prob.constraints = [&](const Vector& x, Vector& g, Matrix* jac) {
    g.resize(m);
    if (jac) jac->resize(m, d + 1);
    for (int j = 0; j < m; ++j) {
      const auto& h = F.rows()[j];
      g[j] = (h.a.dot(x.head(d)) + x[d] - h.b) / scale;
      if (jac) {
        jac->row(j).head(d) = h.a.transpose() / scale;
        (*jac)(j, d) = 1.0 / scale;
      }
    }
  };
  AugmentedLagrangianOptions opt;
  opt.max_rounds = 40;
  opt.inner.max_iterations = 5000;
  opt.inner.grad_tol = 1e-12;
  opt.feasibility_tol = 1e-12;
  opt.stationarity_tol = 1e-10;
  const auto al = minimize_augmented_lagrangian(prob, Vector::Zero(d + 1), opt);
  ChebyshevBall ball;
  ball.center = al.x.head(d);
  const Vector slack = F.slacks(ball.center);
  ball.radius = slack.minCoeff();
  return ball;
}

void preflight_polytope(const HPolytope& F) {
  if (auto dir = F.recession_direction())
    throw PreflightError("polytope is unbounded along direction " + vec_text(*dir), to_std(*dir));
  const auto ball = chebyshev_ball(F);
  double scale = 1.0;
  for (const auto& h : F.rows()) scale = std::max(scale, std::abs(h.b));
  if (!(ball.radius > 1e-9 * scale))
    throw PreflightError("polytope has empty interior; best center " + vec_text(ball.center) + " has depth " +
                             std::to_string(ball.radius),
                         to_std(ball.center));
}

Problem problem_from_json(const nlohmann::json& j, ProblemMode mode) {
  Problem p;
  p.mode = mode;
  if (mode == ProblemMode::Enclose) {
    if (!j.contains("points")) throw std::invalid_argument("problem file: enclosing mode needs \"points\"");
    for (const auto& x : j.at("points")) p.points.push_back(vector_from_json(x));
    if (p.points.empty()) throw std::invalid_argument("problem file: empty point list");
  } else {
    if (!j.contains("halfspaces") && !j.contains("rows"))
      throw std::invalid_argument("problem file: inscribed modes need \"halfspaces\"");
    p.polytope = j.get<HPolytope>();
  }
  if (j.contains("center")) p.center = vector_from_json(j.at("center"));
  return p;
}

Vector cluster_parameters(const SolveResult& r, ProblemMode mode) {
  if (mode == ProblemMode::Enclose && r.quadric) {
    const int d = r.quadric->dim();
    Vector v(d * d + d);
    v << Eigen::Map<const Vector>(r.quadric->shape().matrix().data(), d * d), r.quadric->center();
    return v;
  }
  const AffineMap img = to_image(r.ellipsoid);
  const int d = img.dim();
  Vector v(d * d + d);
  v << Eigen::Map<const Vector>(img.P().matrix().data(), d * d), img.t();
  return v;
}

UniquenessReport multistart_uniqueness(const Problem& problem, const SizeFunction& f, int n_starts,
                                       std::uint64_t seed, SolverConfig cfg) {
  if (n_starts < 8) throw std::invalid_argument("multistart_uniqueness: n_starts must be >= 8");
  cfg.multistart = 1;
  const Prepared prep = prepare(problem, f, cfg);
  auto runs = run_starts(prep, f, cfg, n_starts, seed);

  UniquenessReport rep;
  rep.starts = n_starts;
  std::vector<int> ok;
  for (int i = 0; i < n_starts; ++i) {
    if (runs[i].converged && std::isfinite(runs[i].objective)) ok.push_back(i);
    else ++rep.failed_starts;
  }
  const int n = static_cast<int>(ok.size());
  std::vector<Vector> params;
  for (int i : ok) params.push_back(cluster_parameters(runs[i], problem.mode));

  // single linkage by union-find
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  Matrix dist(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      dist(a, b) = dist(b, a) = (params[a] - params[b]).norm();
      if (dist(a, b) <= kClusterThreshold) parent[find(a)] = find(b);
    }
  std::vector<int> label(n);
  std::vector<int> roots;
  for (int a = 0; a < n; ++a) {
    const int r = find(a);
    auto it = std::find(roots.begin(), roots.end(), r);
    label[a] = static_cast<int>(it - roots.begin());
    if (it == roots.end()) roots.push_back(r);
  }
  rep.min_inter_distance = std::numeric_limits<double>::infinity();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      if (label[a] == label[b]) rep.max_intra_distance = std::max(rep.max_intra_distance, dist(a, b));
      else rep.min_inter_distance = std::min(rep.min_inter_distance, dist(a, b));
    }

  std::vector<int> best(roots.size(), -1);
  std::vector<int> sizes(roots.size(), 0);
  for (int a = 0; a < n; ++a) {
    const int c = label[a];
    ++sizes[c];
    if (best[c] < 0 || better(runs[ok[a]], runs[ok[best[c]]], problem.mode)) best[c] = a;
  }
  for (std::size_t c = 0; c < roots.size(); ++c) {
    Cluster cl;
    cl.representative = runs[ok[best[c]]];
    cl.size = sizes[c];
    cl.objective = cl.representative.objective;
    rep.clusters.push_back(std::move(cl));
  }
  std::sort(rep.clusters.begin(), rep.clusters.end(), [&](const Cluster& a, const Cluster& b) {
    return minimizing(problem.mode) ? a.objective < b.objective : a.objective > b.objective;
  });
  if (!rep.clusters.empty()) {
    const double top = rep.clusters.front().objective;
    double lo = top, hi = top;
    for (auto& c : rep.clusters) {
      c.candidate = std::abs(c.objective - top) <= kObjectiveSpreadTol * std::max(1.0, std::abs(top));
      lo = std::min(lo, c.objective);
      hi = std::max(hi, c.objective);
    }
    rep.objective_spread = (hi - lo) / std::max(1e-300, std::abs(top));
    rep.spread_flagged = rep.objective_spread > kObjectiveSpreadTol;
  }
  return rep;
}

nlohmann::json to_json_value(const SolveResult& r) {
  nlohmann::json j;
  j["ellipsoid"] = r.ellipsoid;
  if (r.ellipsoid.mode() == AffineMode::PreImage) j["image"] = to_image(r.ellipsoid);
  if (r.quadric) j["quadric"] = *r.quadric;
  else j["quadric"] = nullptr;
  if (r.dual_block) j["dual_block"] = *r.dual_block;
  j["semi_axes"] = to_json_value(semi_axes(to_image(r.ellipsoid)).a);
  j["objective"] = r.objective;
  j["feasibility_slack"] = r.feasibility_slack;
  j["iterations"] = r.iterations;
  j["rounds"] = r.rounds;
  j["converged"] = r.converged;
  j["message"] = r.message;
  if (r.rank) j["rank"] = *r.rank;
  if (!r.warnings.empty()) j["warnings"] = r.warnings;
  if (!r.starts.empty()) {
    auto& starts = j["starts"] = nlohmann::json::array();
    for (const auto& s : r.starts)
      starts.push_back({{"index", s.index}, {"seed", s.seed}, {"objective", s.objective},
                        {"converged", s.converged}, {"iterations", s.iterations}});
  }
  return j;
}

nlohmann::json to_json_value(const UniquenessReport& r) {
  nlohmann::json j;
  j["cluster_count"] = r.cluster_count();
  j["candidate_clusters"] = r.candidate_count();
  j["starts"] = r.starts;
  j["failed_starts"] = r.failed_starts;
  j["max_intra_distance"] = r.max_intra_distance;
  j["min_inter_distance"] = std::isfinite(r.min_inter_distance) ? nlohmann::json(r.min_inter_distance) : nullptr;
  j["objective_spread"] = r.objective_spread;
  j["spread_flagged"] = r.spread_flagged;
  j["threshold"] = kClusterThreshold;
  auto& cl = j["clusters"] = nlohmann::json::array();
  for (const auto& c : r.clusters) {
    nlohmann::json e = to_json_value(c.representative);
    e.erase("starts");
    cl.push_back({{"size", c.size}, {"objective", c.objective}, {"candidate", c.candidate}, {"representative", e}});
  }
  return j;
}

}  // namespace extell
