#include "bregopt/models.hpp"
#include "bregopt/problems.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace bregopt;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// h = |·|, c(x) = x² − 1 on a single atom.
ProxLinearOracle unit_composite() {
  CompositeData data;
  data.rows = Matrix::Ones(1, 1);
  data.targets = Vector::Ones(1);
  data.weights = {1.0};
  ModelConstants k;
  k.tau = data.accuracy_tau();
  k.lip_bound = std::sqrt(2.0);
  return ProxLinearOracle(data, k);
}

LinearMirrorOracle linear_oracle(Matrix rows, std::vector<double> weights,
                                 std::vector<double> lips, GradientMode mode = GradientMode::component,
                                 double noise = 0.0, ComponentKind kind = ComponentKind::linear,
                                 Vector targets = Vector()) {
  SmoothComponents data;
  data.kind = kind;
  data.targets = targets.size() ? targets : Vector::Zero(rows.rows());
  data.rows = std::move(rows);
  data.weights = std::move(weights);
  ModelConstants k;
  k.lip_bound = 0.0;
  for (std::size_t i = 0; i < lips.size(); ++i) k.lip_bound += data.weights[i] * lips[i] * lips[i];
  k.lip_bound = std::sqrt(k.lip_bound);
  return LinearMirrorOracle(std::move(data), mode, noise, Regime::C, k, std::move(lips));
}

}  // namespace

TEST(ProxLinear, FrozenOneDimensionalExample) {
  const ProxLinearOracle o = unit_composite();
  const Sample xi = o.atom(0);
  const Vector one = vec({1.0}), zero = vec({0.0});
  EXPECT_DOUBLE_EQ(o.model_value(one, one, xi), 0.0);
  EXPECT_DOUBLE_EQ(o.f_value(one), 0.0);
  EXPECT_DOUBLE_EQ(o.model_value(one, zero, xi), 2.0);
  EXPECT_DOUBLE_EQ(o.f_value(zero), 1.0);
  EXPECT_DOUBLE_EQ(o.model_subgradient(one, zero, xi)[0], -2.0);
  // Kink of the model: c(1) + c'(1)(y − 1) = 0 at y = 1, zero-slope selection.
  EXPECT_DOUBLE_EQ(o.model_subgradient(one, one, xi)[0], 0.0);

  EXPECT_DOUBLE_EQ(o.constants().tau, 4.0 / 3.0);
  const auto phi = build_poly_legendre(CompositeData::accuracy_polynomial());
  Rng rng = make_rng(1);
  const OneSidedReport r = verify_one_sided(o, phi, one, zero, 0, rng);
  EXPECT_DOUBLE_EQ(r.mean_overshoot + r.bound_rhs, 1.0);
  EXPECT_DOUBLE_EQ(r.bound_rhs, 14.0 / 3.0);
  EXPECT_TRUE(r.pass);
}

TEST(ProxLinear, AccuracyConstantTooSmallIsRejected) {
  CompositeData data;
  data.rows = Matrix::Ones(1, 1);
  data.targets = Vector::Ones(1);
  data.weights = {1.0};
  ModelConstants k;
  k.tau = 0.1;  // the declared τ must cover overshoot 1 at D_Φ = 3.5
  k.lip_bound = std::sqrt(2.0);
  const ProxLinearOracle o(data, k);
  Rng rng = make_rng(1);
  const OneSidedReport r =
      verify_one_sided(o, build_poly_legendre({1.0}), vec({1.0}), vec({0.0}), 0, rng);
  EXPECT_FALSE(r.pass);
}

TEST(ProxLinear, DeclaredConstantsOnRegisteredInstance) {
  const ProblemInstance p = make_problem("P1");
  const auto& o = dynamic_cast<const ProxLinearOracle&>(*p.oracle);
  const CompositeData& data = o.data();
  double tau = 0.0;
  double l2 = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double a2 = data.rows.row(static_cast<Eigen::Index>(i)).squaredNorm();
    tau += data.weights[i] * a2;
    l2 += data.weights[i] * 2.0 * a2 * a2;
    EXPECT_NEAR(o.atom_lipschitz()[i], std::sqrt(2.0) * a2, 1e-14);
  }
  EXPECT_NEAR(p.constants().tau, 4.0 / 3.0 * tau, 1e-14);
  EXPECT_NEAR(p.constants().lip_bound, std::sqrt(l2), 1e-12);
  EXPECT_TRUE(p.phi == build_composite_legendre({1.0}, {0.0, 0.0, 4.0}));
}

TEST(Sampling, SeededDeterminism) {
  const auto o = linear_oracle(Matrix::Identity(2, 2), {0.5, 0.5}, {1.0, 1.0});
  Rng a = make_rng(42), b = make_rng(42);
  for (int k = 0; k < 100; ++k) {
    const std::size_t i = o.sample(a).index;
    EXPECT_EQ(i, o.sample(b).index);
    EXPECT_LT(i, 2u);
  }
  const auto noisy = linear_oracle(Matrix::Identity(2, 2), {0.5, 0.5}, {1.0, 1.0},
                                   GradientMode::exact_plus_noise, 0.3);
  Rng c = make_rng(3);
  const Sample s1 = noisy.sample(c), s2 = noisy.sample(c);
  EXPECT_NE(s1.noise, s2.noise);
}

TEST(LinearMirror, BaseValueAndAffinity) {
  const auto o = linear_oracle((Matrix(2, 2) << 1, 2, -1, 0.5).finished(), {0.25, 0.75},
                               {std::sqrt(5.0), std::sqrt(1.25)});
  const Vector x = vec({0.3, -0.2});
  const Vector y1 = vec({1.0, 2.0}), y2 = vec({-3.0, 0.5});
  for (std::size_t i = 0; i < 2; ++i) {
    const Sample xi = o.atom(i);
    EXPECT_DOUBLE_EQ(o.model_value(x, x, xi), o.f_value(x));
    EXPECT_TRUE(o.model_subgradient(x, y1, xi).isApprox(o.model_subgradient(x, y2, xi)));
    const double a = 0.3;
    const double mixed = o.model_value(x, a * y1 + (1 - a) * y2, xi);
    EXPECT_NEAR(mixed, a * o.model_value(x, y1, xi) + (1 - a) * o.model_value(x, y2, xi), 1e-14);
  }
  Rng rng = make_rng(5);
  const OneSidedReport r =
      verify_one_sided(o, LegendreFunction::euclidean(), x, y1, 0, rng);
  EXPECT_DOUBLE_EQ(r.mean_gap_at_x, 0.0);
  EXPECT_TRUE(r.pass);
}

TEST(Lipschitz, UnitGradientsAgainstEuclideanGeometry) {
  // ‖G‖ = 1 and D = ½‖·‖² give drop ≤ √2·√D.
  const auto o = linear_oracle(Matrix::Identity(2, 2), {0.5, 0.5}, {std::sqrt(2.0), std::sqrt(2.0)});
  Rng rng = make_rng(6);
  const LipschitzReport r =
      verify_lipschitz(o, LegendreFunction::euclidean(), ball_sampler(2, 2.0), 2000, rng);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.max_ratio, 1.0);
  EXPECT_GT(r.max_ratio, 0.95);

  const auto tight = linear_oracle(Matrix::Identity(2, 2), {0.5, 0.5}, {1.0, 1.0});
  Rng rng2 = make_rng(6);
  EXPECT_FALSE(verify_lipschitz(tight, LegendreFunction::euclidean(), ball_sampler(2, 2.0), 2000,
                                rng2).pass);
}

TEST(RelativeSmoothness, QuadraticWithEuclideanGeometry) {
  const Matrix rows = (Matrix(3, 2) << 1, 0, 1, 1, 0, 2).finished();
  const std::vector<double> w = {0.2, 0.3, 0.5};
  Matrix H = Matrix::Zero(2, 2);
  for (int i = 0; i < 3; ++i) H += w[static_cast<std::size_t>(i)] * rows.row(i).transpose() * rows.row(i);
  const double top = Eigen::SelfAdjointEigenSolver<Matrix>(H).eigenvalues().maxCoeff();

  auto build = [&](double M) {
    SmoothComponents data;
    data.kind = ComponentKind::least_squares;
    data.rows = rows;
    data.targets = vec({1.0, -1.0, 0.5});
    data.weights = w;
    ModelConstants k;
    k.smooth_M = M;
    return LinearMirrorOracle(data, GradientMode::exact_plus_noise, 0.0, Regime::B, k,
                              std::vector<double>(3, 0.0));
  };
  Rng rng = make_rng(7);
  EXPECT_TRUE(verify_relative_smoothness(build(top), LegendreFunction::euclidean(),
                                         ball_sampler(2, 3.0), 2000, rng).pass);
  Rng rng2 = make_rng(7);
  EXPECT_FALSE(verify_relative_smoothness(build(0.9 * top), LegendreFunction::euclidean(),
                                          ball_sampler(2, 3.0), 2000, rng2).pass);
}

TEST(Variance, DeterministicGaussianAndTwoPoint) {
  Rng rng = make_rng(8);
  const auto exact = linear_oracle(Matrix::Identity(2, 2), {0.5, 0.5}, {1.0, 1.0},
                                   GradientMode::exact_plus_noise, 0.0);
  const VarianceReport r0 = verify_variance(exact, LegendreFunction::euclidean(), vec({1, 1}), 100, rng);
  EXPECT_EQ(r0.mean_square, 0.0);
  EXPECT_TRUE(r0.pass);

  // Per-coordinate std σ/√(2d) gives E‖ε‖² = σ²/2.
  const double sigma = 0.8;
  SmoothComponents data;
  data.kind = ComponentKind::linear;
  data.rows = Matrix::Identity(4, 4);
  data.targets = Vector::Zero(4);
  data.weights = {0.25, 0.25, 0.25, 0.25};
  ModelConstants k;
  k.variance_sigma = sigma;
  const LinearMirrorOracle gauss(data, GradientMode::exact_plus_noise, sigma / std::sqrt(8.0),
                                 Regime::B, k, std::vector<double>(4, 0.0));
  const VarianceReport r1 =
      verify_variance(gauss, LegendreFunction::euclidean(), Vector::Ones(4), 100000, rng);
  EXPECT_NEAR(r1.mean_square, sigma * sigma / 2.0, 4.0 * r1.standard_error);
  EXPECT_TRUE(r1.pass);

  // G ∈ {u, −u} with equal weights: ∇f = 0 and E‖G‖² = ‖u‖² exactly.
  const Vector u = vec({0.3, 0.4});
  SmoothComponents two;
  two.kind = ComponentKind::linear;
  two.rows = (Matrix(2, 2) << u.transpose(), -u.transpose()).finished();
  two.targets = Vector::Zero(2);
  two.weights = {0.5, 0.5};
  ModelConstants k2;
  k2.variance_sigma = std::sqrt(2.0) * u.norm();
  const LinearMirrorOracle pm(two, GradientMode::component, 0.0, Regime::B, k2, {0.0, 0.0});
  const VarianceReport r2 = verify_variance(pm, LegendreFunction::euclidean(), vec({1, 1}), 0, rng);
  EXPECT_NEAR(r2.mean_square, 0.25, 1e-15);
  EXPECT_TRUE(r2.pass);
}

TEST(Saddle, ArgmaxOnBallAndDominance) {
  const ProblemInstance p = make_problem("P5");
  const auto& o = dynamic_cast<const SaddleOracle&>(*p.oracle);
  const Vector x = vec({0.3, -0.4});
  const Vector w = o.data().argmax(x, 0);
  EXPECT_NEAR(w.norm(), 0.1, 1e-15);
  EXPECT_TRUE(w.isApprox(0.1 * x / x.norm()));
  EXPECT_TRUE(o.data().argmax(vec({0.0, 0.0}), 0).isZero(0.0));
  Rng rng = make_rng(9);
  EXPECT_TRUE(verify_saddle_argmax(o, p.points, 2000, rng).pass);
  EXPECT_TRUE(verify_model_convexity(o, p.points, 2000, rng).pass);
  // Model ⟨a + ŵ(x), y⟩ never exceeds f(y, ξ) = ⟨a, y⟩ + 0.1‖y‖.
  for (std::size_t i = 0; i < o.support_size(); ++i) {
    const Vector y = p.points(rng);
    EXPECT_LE(o.model_value(x, y, o.atom(i)), o.component_value(y, i) + 1e-15);
  }
}

TEST(WeakConvexity, SecondOrderCheckOnQuarticInstance) {
  const ProblemInstance p = make_problem("P2");
  Rng rng = make_rng(10);
  const auto& k = p.constants();
  EXPECT_TRUE(verify_second_order_weak_convexity(*p.oracle, p.phi, k.tau, p.points, 1000, rng).pass);
  // Without the curvature allowance the quartic is not convex near the origin.
  Rng rng2 = make_rng(10);
  EXPECT_FALSE(verify_second_order_weak_convexity(*p.oracle, p.phi, 0.0, p.points, 1000, rng2).pass);
}

TEST(Constructor, RejectsBadWeights) {
  SmoothComponents data;
  data.rows = Matrix::Identity(2, 2);
  data.targets = Vector::Zero(2);
  data.weights = {0.5, 0.6};
  EXPECT_THROW(LinearMirrorOracle(data, GradientMode::component, 0.0, Regime::C, ModelConstants{},
                                  {1.0, 1.0}),
               ConfigError);
}
