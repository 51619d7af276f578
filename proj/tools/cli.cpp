#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "extell/convexity_probe.hpp"
#include "extell/errors.hpp"
#include "extell/experiments.hpp"
#include "extell/in_between.hpp"
#include "extell/lemma_checks.hpp"
#include "extell/serialization.hpp"
#include "extell/solvers.hpp"

namespace extell::cli {

namespace {

using nlohmann::json;

/// Thrown for bad flag combinations that CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read input file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("input file '" + path + "' is not valid JSON: " + e.what());
  }
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  std::ofstream os(std::filesystem::path(dir) / name, std::ios::binary);
  if (!os) throw UsageError("cannot write to '" + dir + "'");
  os << content;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

SizeFunction size_function(const std::string& name, const std::string& modulus) {
  if (name == "arc_length" && modulus == "literal") return builtin("arc_length:literal");
  return builtin(name);
}

Curvature parse_curvature(const std::string& s) {
  if (s == "convex") return Curvature::Convex;
  if (s == "concave") return Curvature::Concave;
  throw UsageError("--property must be convex or concave");
}

ProbeDomain parse_domain(const std::string& s) {
  if (s == "positive") return ProbeDomain::Positive;
  if (s == "nonnegative") return ProbeDomain::Nonnegative;
  if (s == "matrices") return ProbeDomain::Matrices;
  throw UsageError("--domain must be positive, nonnegative or matrices");
}

json probe_json(const ProbeReport& r, const std::string& f) {
  json j{{"f", f},
         {"p", r.p},
         {"property", to_string(r.property)},
         {"domain", to_string(r.domain)},
         {"d", r.dim},
         {"trials", r.trials},
         {"violations", r.violations},
         {"resampled", r.resampled},
         {"worst_gap", r.worst_gap},
         {"holds", r.holds()}};
  if (r.domain == ProbeDomain::Matrices) j["spectrum_domain"] = to_string(r.spectrum_domain);
  if (r.witness)
    j["witness"] = {{"first", to_json_value(r.witness->first)},
                    {"second", to_json_value(r.witness->second)},
                    {"f_mid", r.witness->f_mid},
                    {"f_average", r.witness->f_average}};
  return j;
}

struct Options {
  std::string in;
  std::string out;
  std::uint64_t seed = 0;
  int trials = 0;
  std::optional<int> probe_trials;
  int jobs = 1;
  std::string f = "volume";
  double p = 1.0;
  std::string modulus = "eccentric";
  // solve
  std::string mode = "enclose";
  int multistart = 1;
  std::vector<double> center;
  // verify / probe
  int lemma = 0;
  int d = 2;
  std::string probe;
  std::string property = "convex";
  std::string domain = "positive";
};

int cmd_solve(const Options& o, std::ostream& out) {
  if (o.in.empty()) throw UsageError("solve needs --in FILE");
  ProblemMode mode;
  if (o.mode == "enclose") mode = ProblemMode::Enclose;
  else if (o.mode == "inscribe") mode = ProblemMode::Inscribe;
  else if (o.mode == "inscribe-dual") mode = ProblemMode::InscribeDual;
  else throw UsageError("--mode must be enclose, inscribe or inscribe-dual");
  Problem problem = problem_from_json(read_json(o.in), mode);
  if (!o.center.empty()) problem.center = Eigen::Map<const Vector>(o.center.data(), o.center.size());
  if (mode == ProblemMode::Enclose && problem.center) throw UsageError("--center applies to inscribed modes only");
  if (problem.center && problem.center->size() != problem.dim()) throw UsageError("--center has the wrong dimension");
  const SizeFunction f = size_function(o.f, o.modulus);

  SolverConfig cfg;
  cfg.seed = o.seed;
  cfg.jobs = o.jobs;
  if (o.probe_trials) cfg.probe_trials = *o.probe_trials;
  json j;
  if (o.multistart >= 8) {
    const auto rep = multistart_uniqueness(problem, f, o.multistart, o.seed, cfg);
    if (rep.clusters.empty()) {
      cfg.multistart = o.multistart;
      j = to_json_value(solve(problem, f, cfg));
    } else {
      j = to_json_value(rep.clusters.front().representative);
    }
    j["uniqueness"] = to_json_value(rep);
  } else {
    cfg.multistart = o.multistart;
    j = to_json_value(solve(problem, f, cfg));
  }
  j["mode"] = o.mode;
  j["f"] = f.name;
  const std::string text = dump(j);
  if (!o.out.empty()) write_file(o.out, "solve.json", text);
  out << text;
  return kOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  json j;
  bool violated = false;
  if (!o.probe.empty()) {
    if (o.lemma != 0) throw UsageError("--probe and --lemma are exclusive");
    const SizeFunction f = size_function(o.probe, o.modulus);
    const int trials = o.trials > 0 ? o.trials : 10000;
    const auto rep = convexity_probe(f, o.p, parse_curvature(o.property), parse_domain(o.domain), trials, o.seed,
                                     f.dimension.value_or(o.d));
    j = probe_json(rep, f.name);
    violated = !rep.holds();
  } else {
    const int trials = o.trials > 0 ? o.trials : 1000;
    BatchReport rep;
    switch (o.lemma) {
      case 1: rep = verify_lemma1_batch(o.d, trials, o.seed, o.jobs); break;
      case 2: rep = verify_lemma2_batch(o.d, trials, o.seed, o.jobs); break;
      case 4:
        if (o.d != 2) throw UsageError("--lemma 4 is checked in the plane only (--d 2)");
        rep = verify_lemma4_batch(trials, o.seed, o.jobs);
        break;
      default: throw UsageError("verify needs --lemma {1,2,4} or --probe NAME");
    }
    j = to_json_value(rep);
    violated = rep.violations > 0;
  }
  const std::string text = dump(j);
  if (!o.out.empty()) write_file(o.out, "verify.json", text);
  out << text;
  return violated ? kViolations : kOk;
}

int cmd_probe(const Options& o, std::ostream& out) {
  const SizeFunction f = size_function(o.f, o.modulus);
  const int trials = o.trials > 0 ? o.trials : 10000;
  const ProbeDomain domain = parse_domain(o.domain);
  if (domain == ProbeDomain::Matrices) throw UsageError("probe compares a vector domain with matrices; use --domain positive|nonnegative");
  const auto rep = davis_agreement(f, o.p, parse_curvature(o.property), domain, trials, o.seed,
                                   f.dimension.value_or(o.d));
  json j{{"f", f.name}, {"vector", probe_json(rep.vector, f.name)}, {"matrix", probe_json(rep.matrix, f.name)},
         {"agree", rep.agree()}};
  const std::string text = dump(j);
  if (!o.out.empty()) write_file(o.out, "probe.json", text);
  out << text;
  return kOk;
}

json member_json(const InBetweenFamily::Member& m) {
  if (const auto* a = std::get_if<AffineMap>(&m)) {
    return {{"is_ellipsoid", true},
            {"ellipsoid", *a},
            {"quadric", affine_to_quadric(*a)},
            {"semi_axes", to_json_value(semi_axes(*a).a)}};
  }
  const auto& b = std::get<BetweenQuadric>(m);
  json j{{"is_ellipsoid", b.is_ellipsoid}, {"homogeneous", b.quadric}};
  if (b.ellipsoid) {
    j["quadric"] = *b.ellipsoid;
    j["semi_axes"] = to_json_value(semi_axes(*b.ellipsoid).a);
  } else {
    j["quadric"] = nullptr;
  }
  return j;
}

int cmd_between(const Options& o, std::ostream& out) {
  if (o.in.empty()) throw UsageError("between needs --in FILE");
  const json in = read_json(o.in);
  if (!in.contains("e0") || !in.contains("e1")) throw UsageError("between input needs \"e0\" and \"e1\" quadrics");
  const auto e0 = in.at("e0").get<QuadricEllipsoid>();
  const auto e1 = in.at("e1").get<QuadricEllipsoid>();
  if (e0.dim() != e1.dim()) throw UsageError("between: endpoints of different dimension");
  const std::string rep = in.value("representation", "image");
  std::vector<double> lambdas = standard_lambda_grid();
  if (in.contains("lambdas")) lambdas = in.at("lambdas").get<std::vector<double>>();

  std::optional<InBetweenFamily> family;
  if (rep == "image") family.emplace(quadric_to_affine(e0), quadric_to_affine(e1));
  else if (rep == "preimage") family.emplace(quadric_to_preimage(e0), quadric_to_preimage(e1));
  else if (rep == "homogeneous") family.emplace(quadric_to_homogeneous(e0), quadric_to_homogeneous(e1));
  else if (rep == "dual") family.emplace(quadric_to_dual_homogeneous(e0), quadric_to_dual_homogeneous(e1));
  else throw UsageError("representation must be image, preimage, homogeneous or dual");

  json members = json::array();
  for (double l : lambdas) {
    if (!(l >= 0.0 && l <= 1.0)) throw UsageError("lambda values must lie in [0, 1]");
    json m = member_json(family->at(l));
    m["lambda"] = l;
    members.push_back(m);
  }
  const json j{{"representation", rep}, {"members", members}};
  const std::string text = dump(j);
  if (!o.out.empty()) write_file(o.out, "between.json", text);
  out << text;
  return kOk;
}

int cmd_repro_square(const Options& o, std::ostream& out) {
  const auto r = repro_square(o.jobs);
  const std::string text = dump(summary_json(r));
  if (!o.out.empty()) {
    std::ostringstream csv;
    write_csv(csv, r);
    write_file(o.out, "square_scan.csv", csv.str());
    write_file(o.out, "square_summary.json", text);
  }
  out << text;
  return kOk;
}

int cmd_repro_triangle(const Options& o, std::ostream& out) {
  Modulus m;
  if (o.modulus == "eccentric") m = Modulus::Eccentric;
  else if (o.modulus == "literal") m = Modulus::Literal;
  else throw UsageError("--modulus must be eccentric or literal");
  const auto r = repro_triangle(m, o.jobs);
  const std::string text = dump(summary_json(r));
  if (!o.out.empty()) {
    std::ostringstream csv;
    write_csv(csv, r);
    write_file(o.out, "triangle_scan.csv", csv.str());
    write_file(o.out, "triangle_summary.json", text);
  }
  out << text;
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Extremal ellipsoids under general size functions", "extell"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* c) {
    c->add_option("--out", o.out, "directory for output files");
    c->add_option("--seed", o.seed, "random seed");
    c->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
    c->add_option("--modulus", o.modulus, "arc-length modulus convention")
        ->check(CLI::IsMember({"eccentric", "literal"}));
  };

  auto* solve = app.add_subcommand("solve", "solve an enclosing or inscribed problem");
  common(solve);
  solve->add_option("--in", o.in, "problem JSON")->required();
  solve->add_option("--mode", o.mode, "enclose | inscribe | inscribe-dual");
  solve->add_option("--f", o.f, "size function");
  solve->add_option("--multistart", o.multistart, "number of starts")->check(CLI::PositiveNumber);
  solve->add_option("--center", o.center, "fixed center coordinates")->delimiter(',');
  solve->add_option("--probe-trials", o.probe_trials, "convexity probe trials before solving, 0 disables")
      ->check(CLI::NonNegativeNumber);

  auto* verify = app.add_subcommand("verify", "check containment lemmas or a convexity property");
  common(verify);
  verify->add_option("--lemma", o.lemma, "1, 2 or 4");
  verify->add_option("--d", o.d, "dimension")->check(CLI::Range(1, kMaxDimension));
  verify->add_option("--trials", o.trials, "number of seeded instances");
  verify->add_option("--probe", o.probe, "size function to probe");
  verify->add_option("--p", o.p, "exponent of w^p");
  verify->add_option("--property", o.property, "convex | concave");
  verify->add_option("--domain", o.domain, "positive | nonnegative | matrices");

  auto* probe = app.add_subcommand("probe", "compare vector and matrix convexity probes");
  common(probe);
  probe->add_option("--f", o.f, "size function");
  probe->add_option("--p", o.p, "exponent of w^p");
  probe->add_option("--property", o.property, "convex | concave");
  probe->add_option("--domain", o.domain, "positive | nonnegative");
  probe->add_option("--trials", o.trials);
  probe->add_option("--d", o.d, "dimension")->check(CLI::Range(1, kMaxDimension));

  auto* between = app.add_subcommand("between", "evaluate an in-between family");
  common(between);
  between->add_option("--in", o.in, "JSON with e0, e1, representation, lambdas")->required();

  auto* square = app.add_subcommand("repro-square", "square counterexample scan");
  common(square);
  auto* triangle = app.add_subcommand("repro-triangle", "triangle counterexample scan");
  common(triangle);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*solve) return cmd_solve(o, out);
    if (*verify) return cmd_verify(o, out);
    if (*probe) return cmd_probe(o, out);
    if (*between) return cmd_between(o, out);
    if (*square) return cmd_repro_square(o, out);
    if (*triangle) return cmd_repro_triangle(o, out);
  } catch (const PreflightError& e) {
    err << "error: " << e.what() << "\n";
    return kInfeasible;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace extell::cli
