#include "bregopt/cli.hpp"

#include "bregopt/problems.hpp"
#include "bregopt/serialization.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

namespace bregopt {

namespace {

struct Target {
  std::string id;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda;
  std::optional<double> alpha;
  std::optional<double> mu;
  std::string schedule = "auto";
};

struct Loaded {
  ProblemInstance problem;
  SolverConfig config;
};

Loaded load(const Target& t) {
  Loaded l;
  std::optional<Json> doc;
  if (!t.config_path.empty()) {
    std::ifstream in(t.config_path);
    if (!in) throw ConfigError("cannot open config file " + t.config_path);
    try {
      doc = Json::parse(in);
    } catch (const Json::exception& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
  }
  if (doc && doc->contains("problem")) {
    l.problem = instance_from_json(doc->at("problem"));
  } else if (doc && doc->contains("oracle")) {
    l.problem = instance_from_json(*doc);
  } else if (!t.id.empty()) {
    l.problem = make_problem(t.id);
  } else {
    throw ConfigError("give a problem id or a --config file with a problem");
  }
  if (!t.id.empty() && t.id != l.problem.id) {
    throw ConfigError("problem id " + t.id + " does not match config problem " + l.problem.id);
  }
  l.config = default_config(l.problem);
  if (doc && doc->contains("solver")) l.config = solver_config_from_json(doc->at("solver"));

  // Seed precedence: --seed, then BREGOPT_SEED, then the config file.
  if (const char* env = std::getenv("BREGOPT_SEED"); env && *env) {
    try {
      l.config.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("BREGOPT_SEED is not an unsigned integer: ") + env);
    }
  }
  if (t.seed) l.config.seed = *t.seed;
  if (t.lambda) l.config.lambda = *t.lambda;

  if (t.schedule == "constant" || (t.schedule == "auto" && t.alpha)) {
    l.config.schedule = ConstantAlpha{t.alpha.value_or(l.problem.alpha)};
  } else if (t.schedule == "strongly_convex") {
    const double mu = t.mu.value_or(l.problem.constants().mu);
    l.config.schedule = StronglyConvexMu{mu};
  } else if (t.schedule != "auto") {
    throw ConfigError("unknown schedule: " + t.schedule);
  }
  if (t.mu) {
    if (auto* s = std::get_if<StronglyConvexMu>(&l.config.schedule)) s->mu = *t.mu;
  }
  return l;
}

void add_target(CLI::App* cmd, Target& t, bool tuning) {
  cmd->add_option("problem_id", t.id, "registered problem id (" + [] {
    std::string s;
    for (const auto& id : problem_ids()) s += (s.empty() ? "" : ", ") + id;
    return s;
  }() + ")");
  cmd->add_option("--config", t.config_path, "JSON file with \"problem\" and/or \"solver\"");
  if (!tuning) return;
  cmd->add_option("--seed", t.seed, "seed (overrides BREGOPT_SEED and the config)");
  cmd->add_option("--lambda", t.lambda, "envelope parameter lambda");
  cmd->add_option("--alpha", t.alpha, "constant-schedule parameter alpha");
  cmd->add_option("--mu", t.mu, "mu for the strongly convex schedule");
  cmd->add_option("--schedule", t.schedule, "auto | constant | strongly_convex")
      ->check(CLI::IsMember({"auto", "constant", "strongly_convex"}));
}

int print_checks(const std::vector<CheckResult>& checks, const std::string& id, std::ostream& out) {
  for (const auto& c : checks) {
    out << id << ' ' << c.name << ' ' << (c.pass ? "PASS" : "FAIL") << "  " << c.detail << '\n';
  }
  return all_pass(checks) ? 0 : 1;
}

int cmd_validate(const Target& t, std::size_t pairs, std::ostream& out) {
  const Loaded l = load(t);
  ValidationOptions vo;
  vo.n_pairs = pairs;
  vo.seed = l.config.seed;
  return print_checks(validate(l.problem, vo), l.problem.id, out);
}

bool fail_fast(const ProblemInstance& p, std::ostream& err) {
  ValidationOptions vo;
  vo.n_pairs = 200;
  vo.n_samples = 2000;
  const auto checks = validate(p, vo);
  if (all_pass(checks)) return true;
  err << "instance " << p.id << " failed validation:\n";
  print_checks(checks, p.id, err);
  return false;
}

int cmd_run(const Target& t, std::size_t T, const std::string& out_path, bool metrics,
            std::ostream& out, std::ostream& err) {
  Loaded l = load(t);
  l.config.horizon_T = T;
  if (!fail_fast(l.problem, err)) return 1;
  const RunTrace trace = run(l.problem, l.config);

  if (out_path.empty()) {
    write_trace_csv(out, trace);
  } else {
    std::ofstream f(out_path);
    if (!f) throw ConfigError("cannot write " + out_path);
    write_trace_csv(f, trace);
  }

  Json report;
  report["problem_id"] = l.problem.id;
  report["algorithm"] = trace.algorithm;
  report["lambda"] = trace.lambda;
  report["seed"] = l.config.seed;
  report["T"] = T;
  report["t_star"] = trace.t_star;
  report["returned_point"] = vector_to_json(trace.returned_point);
  bool ok = true;
  if (l.problem.regime == Regime::C) {
    report["averaged_point"] = vector_to_json(trace.averaged_point);
    report["F_averaged"] = l.problem.F(trace.averaged_point);
    if (l.problem.optimum) {
      report["objective_gap"] = l.problem.F(trace.averaged_point) - l.problem.optimum->F_star;
    }
  } else {
    const EnvelopeProblem ep = EnvelopeProblem::from(l.problem);
    const EnvelopeReport e =
        stationarity(ep, l.problem.phi, trace.returned_point, trace.lambda, EnvelopeOptions{});
    report["prox_point"] = vector_to_json(e.prox_point);
    report["divergence"] = e.divergence;
    report["envelope_value_direct"] = e.envelope_value_direct;
    report["envelope_value_conjugate"] = e.envelope_value_conjugate;
    report["envelope_gradient"] = vector_to_json(e.envelope_gradient);
    report["local_dual_norm_of_gradient"] = e.local_dual_norm_of_gradient;
    if (e.lower_bound_check) {
      report["lower_bound_check"] = *e.lower_bound_check;
      ok = *e.lower_bound_check >= -1e-8 * (1.0 + std::sqrt(e.divergence));
    }
  }
  double worst_residual = kInf;
  for (const auto& d : trace.diagnostics) worst_residual = std::min(worst_residual, d.three_point_residual);
  report["min_three_point_residual"] = worst_residual;
  if (metrics) {
    Json m;
    for (const auto& [name, value] : run_metrics(l.problem, trace, false, l.config.inner_tol)) {
      m[name] = value;
    }
    report["metrics"] = m;
  }
  err << report.dump(2) << '\n';
  return ok ? 0 : 1;
}

int cmd_sweep(const Target& t, const std::vector<std::size_t>& horizons, std::size_t seeds,
              unsigned threads, bool full_tstar, const std::string& csv_path,
              std::optional<double> max_slope, std::ostream& out, std::ostream& err) {
  const Loaded l = load(t);
  if (!fail_fast(l.problem, err)) return 1;
  SweepOptions so;
  so.horizons = horizons;
  so.n_seeds = seeds;
  so.base_seed = l.config.seed;
  so.threads = threads;
  so.full_tstar = full_tstar;
  so.config = l.config;
  const SweepResult res = sweep(l.problem, so);
  if (!csv_path.empty()) {
    std::ofstream f(csv_path);
    if (!f) throw ConfigError("cannot write " + csv_path);
    write_sweep_csv(f, res.rows);
  }
  Json j = slope_to_json(res.fit);
  j["problem_id"] = l.problem.id;
  j["metric"] = res.primary_metric;
  out << j.dump() << '\n';
  if (max_slope) {
    const bool ok = !res.fit.converged && res.fit.slope <= *max_slope;
    if (!ok) err << "slope check failed: " << res.fit.slope << " > " << *max_slope << '\n';
    return ok ? 0 : 1;
  }
  return 0;
}

int cmd_oracle(const Target& t, double resolution, std::ostream& out) {
  const Loaded l = load(t);
  const Box box = default_box(l.problem);
  const OracleResult r = brute_force_min(l.problem, box, resolution);
  Json j;
  j["problem_id"] = l.problem.id;
  j["value"] = r.value;
  j["argmin"] = vector_to_json(r.argmin);
  j["method"] = to_string(r.method);
  j["resolution"] = r.resolution;
  bool ok = true;
  if (l.problem.optimum) {
    const double f_star = l.problem.optimum->F_star;
    const double tol = (r.method == OracleMethod::projected_descent_long ? 1e-2 : 1e-6) *
                       (1.0 + std::abs(f_star));
    j["F_star"] = f_star;
    j["abs_difference"] = std::abs(r.value - f_star);
    ok = r.value >= f_star - 1e-9 * (1.0 + std::abs(f_star)) && r.value - f_star <= tol;
    j["consistent"] = ok;
  }
  out << j.dump(2) << '\n';
  return ok ? 0 : 1;
}

int cmd_config(const Target& t, std::ostream& out) {
  const Loaded l = load(t);
  Json j;
  j["problem"] = instance_to_json(l.problem);
  j["solver"] = solver_config_to_json(l.config);
  out << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic model-based minimization under Bregman geometry"};
  app.name("bregopt");
  app.require_subcommand(1);

  Target t;
  std::size_t pairs = 1000;
  auto* validate_cmd = app.add_subcommand("validate", "run the verify suite and geometry checks");
  add_target(validate_cmd, t, false);
  validate_cmd->add_option("--seed", t.seed, "seed for sampled points");
  validate_cmd->add_option("--pairs", pairs, "sampled point pairs per check")
      ->check(CLI::PositiveNumber);

  std::size_t T = 100;
  std::string out_path;
  bool metrics = false;
  auto* run_cmd = app.add_subcommand("run", "one run: trace CSV on stdout, report on stderr");
  add_target(run_cmd, t, true);
  run_cmd->add_option("--T", T, "horizon T (iterations 0..T)");
  run_cmd->add_option("--out", out_path, "write the trace CSV to this file instead of stdout");
  run_cmd->add_flag("--metrics", metrics, "add the stationarity/gap metric to the report");

  std::vector<std::size_t> horizons{64, 256, 1024, 4096};
  std::size_t seeds = 20;
  unsigned threads = 1;
  bool full_tstar = false;
  std::string csv_path;
  std::optional<double> max_slope;
  auto* sweep_cmd = app.add_subcommand("sweep", "rate sweep: slope JSON on stdout");
  add_target(sweep_cmd, t, true);
  sweep_cmd->add_option("--horizons", horizons, "comma-separated horizons")->delimiter(',');
  sweep_cmd->add_option("--seeds", seeds, "seeds per horizon")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--threads", threads, "maximum concurrent cells")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_flag("--full-tstar", full_tstar,
                      "average the stationarity metric over the whole t* law");
  sweep_cmd->add_option("--csv", csv_path, "write per-run rows to this CSV file");
  sweep_cmd->add_option("--max-slope", max_slope, "exit 1 unless the fitted slope is at most this");

  double resolution = 1e-3;
  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force ground truth for min F");
  add_target(oracle_cmd, t, false);
  oracle_cmd->add_option("--resolution", resolution, "grid spacing / scan step")
      ->check(CLI::PositiveNumber);

  auto* config_cmd = app.add_subcommand("config", "print the instance and solver config as JSON");
  add_target(config_cmd, t, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*validate_cmd) return cmd_validate(t, pairs, out);
    if (*run_cmd) return cmd_run(t, T, out_path, metrics, out, err);
    if (*sweep_cmd) {
      return cmd_sweep(t, horizons, seeds, threads, full_tstar, csv_path, max_slope, out, err);
    }
    if (*oracle_cmd) return cmd_oracle(t, resolution, out);
    if (*config_cmd) return cmd_config(t, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace bregopt
