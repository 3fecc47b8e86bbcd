#include "bregopt/problems.hpp"
#include "bregopt/serialization.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace bregopt;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST(Registry, AllInstancesValidate) {
  const auto ids = problem_ids();
  for (const char* id : {"P1", "P2", "P3", "P4", "P5"}) {
    EXPECT_NE(std::find(ids.begin(), ids.end(), id), ids.end()) << id;
  }
  ValidationOptions vo;
  vo.n_pairs = 300;
  vo.n_samples = 2000;
  for (const auto& p : registry()) {
    const auto checks = validate(p, vo);
    for (const auto& c : checks) EXPECT_TRUE(c.pass) << p.id << " " << c.name << " " << c.detail;
    EXPECT_TRUE(all_pass(checks));
    // Convex instances carry their minimizer; the weakly convex ones are judged by stationarity.
    EXPECT_EQ(p.optimum.has_value(), p.regime == Regime::C || p.id == "P5") << p.id;
  }
  EXPECT_THROW(make_problem("P99"), ConfigError);
}

TEST(Registry, RegimesAndGeometries) {
  EXPECT_EQ(make_problem("P1").regime, Regime::A);
  EXPECT_EQ(make_problem("P2").regime, Regime::B);
  EXPECT_EQ(make_problem("P3").regime, Regime::C);
  EXPECT_EQ(make_problem("P4").regime, Regime::C);
  EXPECT_EQ(make_problem("P5").regime, Regime::A);
  const ProblemInstance p2 = make_problem("P2");
  EXPECT_TRUE(p2.phi == LegendreFunction::norm_power_sum({1.0, 0.0, 1.0}));
  EXPECT_EQ(make_problem("P3").phi.kind(), LegendreKind::shannon_entropy);
  EXPECT_DOUBLE_EQ(make_problem("P4").regularizer.mu_relative(make_problem("P4").phi), 0.2);
}

TEST(Registry, ValidationCatchesWrongConstants) {
  ProblemInstance p = make_problem("P1");
  ModelConstants k = p.constants();
  k.tau = 0.0;  // the model overshoots f whenever y crosses a root of some atom
  const auto& o = dynamic_cast<const ProxLinearOracle&>(*p.oracle);
  p.oracle = std::make_shared<ProxLinearOracle>(o.data(), k);
  ValidationOptions vo;
  vo.n_pairs = 300;
  bool one_sided_failed = false;
  for (const auto& c : validate(p, vo)) {
    if (c.name == "one_sided_accuracy") one_sided_failed = !c.pass;
  }
  EXPECT_TRUE(one_sided_failed);
}

TEST(Oracle, QuadraticBowlOnGrid) {
  const auto F = [](const Vector& x) { return 0.5 * (x - vec({0.3, -0.7})).squaredNorm(); };
  const Box box{vec({-2.0, -2.0}), vec({2.0, 2.0})};
  const OracleResult r = grid_min(F, box, 1e-2);
  EXPECT_LE(r.value, 1e-4);
  EXPECT_LE((r.argmin - vec({0.3, -0.7})).norm(), 1e-2);
  EXPECT_EQ(r.method, OracleMethod::grid);
  EXPECT_THROW(grid_min(F, box, 5.0), ConfigError);
  EXPECT_THROW(grid_min(F, Box{vec({1.0, 1.0}), vec({1.0, 1.0})}, 0.1), ConfigError);
}

TEST(Oracle, EuclideanBowlOnUnitBox) {
  const auto F = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  const OracleResult r = grid_min(F, Box{vec({-1.0, -1.0}), vec({1.0, 1.0})}, 1e-3);
  EXPECT_LE(r.value, 1e-6);
  EXPECT_LE(r.argmin.norm(), 1e-3);
}

TEST(Oracle, GoldenSection) {
  EXPECT_NEAR(golden_section([](double x) { return (x - 0.3) * (x - 0.3); }, -1.0, 2.0, 1e-10), 0.3,
              1e-9);
  EXPECT_NEAR(golden_section([](double x) { return std::abs(x + 0.25); }, -1.0, 1.0, 1e-10), -0.25,
              1e-9);
}

TEST(Oracle, OneDimensionalPhaseRetrieval) {
  // Every atom has a_i² x² = b_i at x = ±1, so F* = 0 there.
  const ProblemInstance p = make_problem("P1_1d");
  const OracleResult r = brute_force_min(p, default_box(p), 1e-3);
  EXPECT_EQ(r.method, OracleMethod::golden_section);
  EXPECT_LE(r.value, 1e-8);
  EXPECT_NEAR(std::abs(r.argmin[0]), 1.0, 1e-6);
}

TEST(Oracle, SimplexVertexAndBallOptimum) {
  const ProblemInstance p3 = make_problem("P3");
  const OracleResult r3 = brute_force_min(p3, default_box(p3), 1e-3);
  EXPECT_EQ(r3.method, OracleMethod::projected_descent_long);
  EXPECT_NEAR(r3.value, p3.optimum->F_star, 1e-2);

  const ProblemInstance p5 = make_problem("P5");
  const OracleResult r5 = brute_force_min(p5, default_box(p5), 1e-3);
  EXPECT_EQ(r5.method, OracleMethod::grid);
  EXPECT_NEAR(r5.value, p5.optimum->F_star, 1e-6);
  EXPECT_LE((r5.argmin - p5.optimum->x_star).norm(), 1e-3);
}

TEST(Oracle, RejectsCoarseResolution) {
  const ProblemInstance p = make_problem("P1");
  EXPECT_THROW(brute_force_min(p, default_box(p), 0.0), ConfigError);
  EXPECT_THROW(brute_force_min(p, default_box(p), 100.0), ConfigError);
}

TEST(Serialization, DoubleFormatting) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_EQ(format_double(kInf), "inf");
  EXPECT_TRUE(std::isnan(parse_double(std::string("nan"))));
  EXPECT_THROW(parse_double(std::string("1.5x")), ConfigError);
}

TEST(Serialization, InstanceRoundTripIsBitExact) {
  for (const auto& id : problem_ids()) {
    const ProblemInstance p = make_problem(id);
    const Json j = instance_to_json(p);
    const ProblemInstance q = instance_from_json(Json::parse(j.dump()));
    EXPECT_EQ(instance_to_json(q), j) << id;
    EXPECT_EQ(q.x0, p.x0);
    EXPECT_TRUE(q.phi == p.phi);
    EXPECT_EQ(q.regime, p.regime);
    Rng rng = make_rng(1);
    for (int k = 0; k < 20; ++k) {
      const Vector x = p.points(rng);
      EXPECT_EQ(q.F(x), p.F(x)) << id;
    }
    SolverConfig cfg = default_config(p);
    cfg.horizon_T = 20;
    const RunTrace a = run(p, cfg), b = run(q, cfg);
    EXPECT_EQ(a.iterates.back(), b.iterates.back()) << id;
  }
}

TEST(Serialization, SolverConfigRoundTrip) {
  SolverConfig c;
  c.lambda = 0.125;
  c.schedule = StronglyConvexMu{0.2};
  c.horizon_T = 77;
  c.seed = 123456789012345ULL;
  const SolverConfig d = solver_config_from_json(Json::parse(solver_config_to_json(c).dump()));
  EXPECT_EQ(d.lambda, c.lambda);
  EXPECT_EQ(std::get<StronglyConvexMu>(d.schedule).mu, 0.2);
  EXPECT_EQ(d.horizon_T, 77u);
  EXPECT_EQ(d.seed, c.seed);
  c.schedule = ExplicitSchedule{{0.3, 0.1 / 3.0}};
  const SolverConfig e = solver_config_from_json(solver_config_to_json(c));
  EXPECT_EQ(std::get<ExplicitSchedule>(e.schedule).etas, std::get<ExplicitSchedule>(c.schedule).etas);
}

TEST(Serialization, TraceCsv) {
  const ProblemInstance p = make_problem("P2");
  SolverConfig cfg = default_config(p);
  cfg.horizon_T = 5;
  const RunTrace tr = run(p, cfg);
  std::stringstream ss;
  write_trace_csv(ss, tr);
  const CsvTable t = read_csv(ss);
  ASSERT_EQ(t.rows.size(), 6u);
  EXPECT_EQ(t.header.front(), "t");
  EXPECT_EQ(t.header.back(), "x_1");
  for (std::size_t s = 0; s < t.rows.size(); ++s) {
    EXPECT_EQ(parse_double(t.rows[s][2]), tr.etas[s]);
    EXPECT_EQ(parse_double(t.rows[s][8]), tr.iterates[s + 1][0]);
    EXPECT_EQ(parse_double(t.rows[s][9]), tr.iterates[s + 1][1]);
  }
}

TEST(Serialization, SweepCsvRoundTrip) {
  const ProblemInstance p = make_problem("P4");
  SweepOptions o;
  o.horizons = {4, 16};
  o.n_seeds = 3;
  o.config = default_config(p);
  const SweepResult res = sweep(p, o);
  std::stringstream ss;
  write_sweep_csv(ss, res.rows);
  std::string header;
  std::getline(std::stringstream(ss.str()), header);
  EXPECT_EQ(header, "regime,problem_id,T,seed,eta0,lambda,metric_name,metric_value,wall_ms");
  const auto back = read_sweep_csv(ss);
  ASSERT_EQ(back.size(), res.rows.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].regime, res.rows[i].regime);
    EXPECT_EQ(back[i].problem_id, res.rows[i].problem_id);
    EXPECT_EQ(back[i].T, res.rows[i].T);
    EXPECT_EQ(back[i].seed, res.rows[i].seed);
    EXPECT_EQ(back[i].eta0, res.rows[i].eta0);
    EXPECT_EQ(back[i].lambda, res.rows[i].lambda);
    EXPECT_EQ(back[i].metric_name, res.rows[i].metric_name);
    EXPECT_EQ(back[i].metric_value, res.rows[i].metric_value);
    EXPECT_EQ(back[i].wall_ms, res.rows[i].wall_ms);
  }
}
