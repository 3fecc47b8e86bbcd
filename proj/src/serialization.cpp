#include "bregopt/serialization.hpp"

#include "bregopt/problems.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace bregopt {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

double parse_double(const std::string& text) {
  if (text == "inf") return kInf;
  if (text == "-inf") return -kInf;
  if (text == "nan") return std::nan("");
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw ConfigError("not a decimal number: '" + text + "'");
  }
  return v;
}

double parse_double(const Json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) return parse_double(value.get<std::string>());
  throw ConfigError("expected a number or decimal string, got " + value.dump());
}

namespace {

Json doubles_to_json(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(format_double(x));
  return out;
}

std::vector<double> doubles_from_json(const Json& j) {
  if (!j.is_array()) throw ConfigError("expected an array, got " + j.dump());
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(parse_double(x));
  return out;
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_to_json(m.row(i).transpose()));
  return out;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("expected a nonempty array of rows");
  const std::size_t cols = j.front().size();
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != cols) throw ConfigError("ragged matrix rows");
    m.row(static_cast<Eigen::Index>(i)) = vector_from_json(j[i]).transpose();
  }
  return m;
}

const Json& field(const Json& j, const char* name) {
  if (!j.contains(name)) throw ConfigError(std::string("missing field '") + name + "'");
  return j.at(name);
}

}  // namespace

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(format_double(v[i]));
  return out;
}

Vector vector_from_json(const Json& j) {
  const auto d = doubles_from_json(j);
  return Eigen::Map<const Vector>(d.data(), static_cast<Eigen::Index>(d.size()));
}

Json phi_to_json(const LegendreFunction& phi) {
  Json j;
  j["kind"] = std::string(to_string(phi.kind()));
  j["coeffs"] = doubles_to_json(phi.coeffs());
  if (phi.kind() == LegendreKind::weighted_sum) {
    Json children = Json::array();
    for (const auto& c : phi.children()) children.push_back(phi_to_json(c));
    j["children"] = children;
    j["weights"] = doubles_to_json(phi.weights());
  }
  return j;
}

LegendreFunction phi_from_json(const Json& j) {
  const LegendreKind kind = legendre_kind_from_string(field(j, "kind").get<std::string>());
  const std::vector<double> coeffs =
      j.contains("coeffs") ? doubles_from_json(j.at("coeffs")) : std::vector<double>{};
  switch (kind) {
    case LegendreKind::euclidean: return LegendreFunction::euclidean();
    case LegendreKind::shannon_entropy: return LegendreFunction::shannon_entropy();
    case LegendreKind::burg: return LegendreFunction::burg();
    case LegendreKind::poly_growth: return LegendreFunction::poly_growth(coeffs);
    case LegendreKind::norm_power_sum: return LegendreFunction::norm_power_sum(coeffs);
    case LegendreKind::weighted_sum: {
      std::vector<LegendreFunction> children;
      for (const auto& c : field(j, "children")) children.push_back(phi_from_json(c));
      return LegendreFunction::weighted_sum(std::move(children),
                                            doubles_from_json(field(j, "weights")));
    }
  }
  throw ConfigError("unsupported Legendre kind");
}

Json regularizer_to_json(const Regularizer& r) {
  Json j;
  switch (r.penalty()) {
    case PenaltyKind::zero: j["penalty"] = "zero"; break;
    case PenaltyKind::l1: j["penalty"] = "l1"; break;
    case PenaltyKind::quadratic: j["penalty"] = "quadratic"; break;
    case PenaltyKind::entropy_like: j["penalty"] = "entropy_like"; break;
  }
  j["weight"] = format_double(r.weight());
  if (r.term()) j["term"] = phi_to_json(*r.term());
  Json c;
  switch (r.constraint().kind) {
    case ConstraintKind::none: c["kind"] = "none"; break;
    case ConstraintKind::simplex: c["kind"] = "simplex"; break;
    case ConstraintKind::ball: c["kind"] = "ball"; break;
  }
  c["radius"] = format_double(r.constraint().radius);
  j["constraint"] = c;
  return j;
}

Regularizer regularizer_from_json(const Json& j) {
  const std::string penalty = field(j, "penalty").get<std::string>();
  const double weight = j.contains("weight") ? parse_double(j.at("weight")) : 0.0;
  Regularizer r;
  if (penalty == "zero") {
    r = Regularizer::zero();
  } else if (penalty == "l1") {
    r = Regularizer::l1(weight);
  } else if (penalty == "quadratic") {
    r = Regularizer::quadratic(weight);
  } else if (penalty == "entropy_like") {
    r = Regularizer::entropy_like(weight, phi_from_json(field(j, "term")));
  } else {
    throw ConfigError("unknown penalty: " + penalty);
  }
  if (j.contains("constraint")) {
    const Json& c = j.at("constraint");
    const std::string kind = field(c, "kind").get<std::string>();
    Constraint con;
    con.radius = c.contains("radius") ? parse_double(c.at("radius")) : 1.0;
    if (kind == "none") {
      con.kind = ConstraintKind::none;
    } else if (kind == "simplex") {
      con.kind = ConstraintKind::simplex;
    } else if (kind == "ball") {
      con.kind = ConstraintKind::ball;
    } else {
      throw ConfigError("unknown constraint: " + kind);
    }
    r = r.with_constraint(con);
  }
  return r;
}

Json constants_to_json(const ModelConstants& k) {
  return Json{{"tau", format_double(k.tau)},
              {"rho", format_double(k.rho)},
              {"mu", format_double(k.mu)},
              {"lip_bound", format_double(k.lip_bound)},
              {"smooth_M", format_double(k.smooth_M)},
              {"variance_sigma", format_double(k.variance_sigma)}};
}

ModelConstants constants_from_json(const Json& j) {
  ModelConstants k;
  auto get = [&](const char* name, double& out) {
    if (j.contains(name)) out = parse_double(j.at(name));
  };
  get("tau", k.tau);
  get("rho", k.rho);
  get("mu", k.mu);
  get("lip_bound", k.lip_bound);
  get("smooth_M", k.smooth_M);
  get("variance_sigma", k.variance_sigma);
  return k;
}

namespace {

Json oracle_to_json(const ModelOracle& oracle) {
  Json j;
  j["family"] = std::string(to_string(oracle.family()));
  j["regime"] = std::string(to_string(oracle.regime()));
  j["constants"] = constants_to_json(oracle.constants());
  j["weights"] = doubles_to_json(oracle.weights());
  j["lipschitz"] = doubles_to_json(oracle.atom_lipschitz());
  if (const auto* o = dynamic_cast<const ProxLinearOracle*>(&oracle)) {
    j["rows"] = matrix_to_json(o->data().rows);
    j["targets"] = vector_to_json(o->data().targets);
  } else if (const auto* o = dynamic_cast<const LinearMirrorOracle*>(&oracle)) {
    switch (o->data().kind) {
      case ComponentKind::linear: j["component"] = "linear"; break;
      case ComponentKind::least_squares: j["component"] = "least_squares"; break;
      case ComponentKind::quartic_residual: j["component"] = "quartic_residual"; break;
    }
    j["gradient_mode"] = o->mode() == GradientMode::component ? "component" : "exact_plus_noise";
    j["noise_scale"] = format_double(o->noise_scale());
    j["rows"] = matrix_to_json(o->data().rows);
    j["targets"] = vector_to_json(o->data().targets);
  } else if (const auto* o = dynamic_cast<const SaddleOracle*>(&oracle)) {
    j["rows"] = matrix_to_json(o->data().rows);
    const UncertaintySet& set = o->data().set;
    Json s;
    s["kind"] = set.kind == UncertaintySet::Kind::ball ? "ball" : "finite";
    s["radius"] = format_double(set.radius);
    Json pts = Json::array();
    for (const auto& p : set.points) pts.push_back(vector_to_json(p));
    s["points"] = pts;
    j["set"] = s;
  } else if (const auto* o = dynamic_cast<const ProximalPointOracle*>(&oracle)) {
    j["rows"] = matrix_to_json(o->rows());
    j["targets"] = vector_to_json(o->targets());
  } else {
    throw ConfigError("oracle type cannot be serialized");
  }
  return j;
}

OraclePtr oracle_from_json(const Json& j) {
  const std::string family = field(j, "family").get<std::string>();
  const ModelConstants k = constants_from_json(field(j, "constants"));
  const std::vector<double> weights = doubles_from_json(field(j, "weights"));
  const std::vector<double> lips = doubles_from_json(field(j, "lipschitz"));
  if (family == "prox_linear") {
    CompositeData data;
    data.rows = matrix_from_json(field(j, "rows"));
    data.targets = vector_from_json(field(j, "targets"));
    data.weights = weights;
    return std::make_shared<ProxLinearOracle>(std::move(data), k);
  }
  if (family == "linear_mirror") {
    SmoothComponents data;
    const std::string component = field(j, "component").get<std::string>();
    if (component == "linear") {
      data.kind = ComponentKind::linear;
    } else if (component == "least_squares") {
      data.kind = ComponentKind::least_squares;
    } else if (component == "quartic_residual") {
      data.kind = ComponentKind::quartic_residual;
    } else {
      throw ConfigError("unknown component kind: " + component);
    }
    data.rows = matrix_from_json(field(j, "rows"));
    data.targets = vector_from_json(field(j, "targets"));
    data.weights = weights;
    const std::string mode_name = field(j, "gradient_mode").get<std::string>();
    GradientMode mode;
    if (mode_name == "component") {
      mode = GradientMode::component;
    } else if (mode_name == "exact_plus_noise") {
      mode = GradientMode::exact_plus_noise;
    } else {
      throw ConfigError("unknown gradient mode: " + mode_name);
    }
    return std::make_shared<LinearMirrorOracle>(
        std::move(data), mode, parse_double(field(j, "noise_scale")),
        regime_from_string(field(j, "regime").get<std::string>()), k, lips);
  }
  if (family == "saddle") {
    SaddleData data;
    data.rows = matrix_from_json(field(j, "rows"));
    data.weights = weights;
    const Json& s = field(j, "set");
    const std::string kind = field(s, "kind").get<std::string>();
    if (kind == "ball") {
      data.set.kind = UncertaintySet::Kind::ball;
    } else if (kind == "finite") {
      data.set.kind = UncertaintySet::Kind::finite;
    } else {
      throw ConfigError("unknown uncertainty set: " + kind);
    }
    data.set.radius = s.contains("radius") ? parse_double(s.at("radius")) : 0.0;
    if (s.contains("points")) {
      for (const auto& p : s.at("points")) data.set.points.push_back(vector_from_json(p));
    }
    return std::make_shared<SaddleOracle>(std::move(data), k, lips);
  }
  if (family == "proximal_point") {
    return std::make_shared<ProximalPointOracle>(matrix_from_json(field(j, "rows")),
                                                 vector_from_json(field(j, "targets")), weights,
                                                 k, lips);
  }
  throw ConfigError("unknown oracle family: " + family);
}

}  // namespace

Json instance_to_json(const ProblemInstance& problem) {
  Json j;
  j["id"] = problem.id;
  j["description"] = problem.description;
  j["regime"] = std::string(to_string(problem.regime));
  j["phi"] = phi_to_json(problem.phi);
  j["regularizer"] = regularizer_to_json(problem.regularizer);
  j["x0"] = vector_to_json(problem.x0);
  j["alpha"] = format_double(problem.alpha);
  if (problem.lambda) j["lambda"] = format_double(*problem.lambda);
  if (problem.optimum) {
    j["optimum"] = Json{{"F_star", format_double(problem.optimum->F_star)},
                        {"x_star", vector_to_json(problem.optimum->x_star)}};
  }
  j["oracle"] = oracle_to_json(*problem.oracle);
  return j;
}

ProblemInstance instance_from_json(const Json& j) {
  ProblemInstance p;
  p.id = field(j, "id").get<std::string>();
  p.description = j.value("description", std::string{});
  p.regime = regime_from_string(field(j, "regime").get<std::string>());
  p.phi = phi_from_json(field(j, "phi"));
  p.regularizer = regularizer_from_json(field(j, "regularizer"));
  p.x0 = vector_from_json(field(j, "x0"));
  p.alpha = j.contains("alpha") ? parse_double(j.at("alpha")) : 1.0;
  if (j.contains("lambda")) p.lambda = parse_double(j.at("lambda"));
  if (j.contains("optimum")) {
    const Json& o = j.at("optimum");
    p.optimum = Optimum{parse_double(field(o, "F_star")), vector_from_json(field(o, "x_star"))};
  }
  p.oracle = oracle_from_json(field(j, "oracle"));
  if (p.oracle->dimension() != p.dimension()) {
    throw ConfigError("x0 dimension does not match the oracle data");
  }
  if (p.oracle->regime() != p.regime) throw ConfigError("oracle regime does not match instance");
  p.points = default_points(p.regularizer, p.phi, p.dimension());
  return p;
}

Json solver_config_to_json(const SolverConfig& config) {
  Json j;
  if (config.lambda) j["lambda"] = format_double(*config.lambda);
  if (const auto* a = std::get_if<ConstantAlpha>(&config.schedule)) {
    j["schedule"] = Json{{"kind", "constant_alpha"}, {"alpha", format_double(a->alpha)}};
  } else if (const auto* m = std::get_if<StronglyConvexMu>(&config.schedule)) {
    j["schedule"] = Json{{"kind", "strongly_convex"}, {"mu", format_double(m->mu)}};
  } else {
    const auto& e = std::get<ExplicitSchedule>(config.schedule);
    j["schedule"] = Json{{"kind", "explicit"}, {"etas", doubles_to_json(e.etas)}};
  }
  j["horizon_T"] = config.horizon_T;
  j["seed"] = config.seed;
  j["inner_tol"] = format_double(config.inner_tol);
  j["three_point_probes"] = config.three_point_probes;
  return j;
}

SolverConfig solver_config_from_json(const Json& j) {
  SolverConfig c;
  if (j.contains("lambda") && !j.at("lambda").is_null()) c.lambda = parse_double(j.at("lambda"));
  if (j.contains("schedule")) {
    const Json& s = j.at("schedule");
    const std::string kind = field(s, "kind").get<std::string>();
    if (kind == "constant_alpha") {
      c.schedule = ConstantAlpha{parse_double(field(s, "alpha"))};
    } else if (kind == "strongly_convex") {
      c.schedule = StronglyConvexMu{parse_double(field(s, "mu"))};
    } else if (kind == "explicit") {
      c.schedule = ExplicitSchedule{doubles_from_json(field(s, "etas"))};
    } else {
      throw ConfigError("unknown schedule kind: " + kind);
    }
  }
  if (j.contains("horizon_T")) c.horizon_T = j.at("horizon_T").get<std::size_t>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("inner_tol")) c.inner_tol = parse_double(j.at("inner_tol"));
  if (j.contains("three_point_probes")) c.three_point_probes = j.at("three_point_probes").get<int>();
  return c;
}

Json slope_to_json(const SlopeFit& fit) {
  auto num = [](double v) -> Json { return std::isfinite(v) ? Json(v) : Json(nullptr); };
  Json means = Json::array();
  Json errors = Json::array();
  for (double m : fit.means) means.push_back(num(m));
  for (double e : fit.std_errors) errors.push_back(num(e));
  return Json{{"slope", num(fit.slope)},       {"intercept", num(fit.intercept)},
              {"r2", num(fit.r2)},             {"horizons", fit.horizons},
              {"n_seeds", fit.n_seeds},        {"converged", fit.converged},
              {"means", means},                {"std_errors", errors}};
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  const std::size_t d =
      trace.iterates.empty() ? 0 : static_cast<std::size_t>(trace.iterates.front().size());
  out << "t,xi,eta,model_value,r_value,step_divergence,three_point_residual,inner_iterations";
  for (std::size_t k = 0; k < d; ++k) out << ",x_" << k;
  out << '\n';
  for (std::size_t t = 0; t < trace.diagnostics.size(); ++t) {
    const auto& diag = trace.diagnostics[t];
    out << t << ',' << trace.sampled_xi_ids[t] << ',' << format_double(trace.etas[t]) << ','
        << format_double(diag.model_value) << ',' << format_double(diag.r_value) << ','
        << format_double(diag.step_divergence) << ',' << format_double(diag.three_point_residual)
        << ',' << diag.inner_iterations;
    const Vector& x = trace.iterates[t + 1];
    for (std::size_t k = 0; k < d; ++k) out << ',' << format_double(x[static_cast<Eigen::Index>(k)]);
    out << '\n';
  }
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  if (!std::getline(in, line)) throw ConfigError("empty CSV");
  table.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != table.header.size()) throw ConfigError("CSV row width mismatch: " + line);
    table.rows.push_back(std::move(cells));
  }
  return table;
}

namespace {
const std::vector<std::string> kSweepColumns = {"regime", "problem_id",  "T",
                                                "seed",   "eta0",        "lambda",
                                                "metric_name", "metric_value", "wall_ms"};
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  for (std::size_t i = 0; i < kSweepColumns.size(); ++i) {
    out << (i ? "," : "") << kSweepColumns[i];
  }
  out << '\n';
  for (const auto& r : rows) {
    out << r.regime << ',' << r.problem_id << ',' << r.T << ',' << r.seed << ','
        << format_double(r.eta0) << ',' << format_double(r.lambda) << ',' << r.metric_name << ','
        << format_double(r.metric_value) << ',' << format_double(r.wall_ms) << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  if (table.header != kSweepColumns) throw ConfigError("unexpected sweep CSV header");
  std::vector<SweepRow> rows;
  for (const auto& c : table.rows) {
    SweepRow r;
    r.regime = c[0];
    r.problem_id = c[1];
    r.T = std::stoull(c[2]);
    r.seed = std::stoull(c[3]);
    r.eta0 = parse_double(c[4]);
    r.lambda = parse_double(c[5]);
    r.metric_name = c[6];
    r.metric_value = parse_double(c[7]);
    r.wall_ms = parse_double(c[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace bregopt
