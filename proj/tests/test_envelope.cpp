#include "bregopt/envelope.hpp"
#include "bregopt/problems.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace bregopt;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// F(y) = ½‖y − c‖² + ⟨b, y⟩, smooth and convex.
EnvelopeProblem quadratic(const Vector& c, const Vector& b) {
  EnvelopeProblem p;
  p.f.value = [c, b](const Vector& y) { return 0.5 * (y - c).squaredNorm() + b.dot(y); };
  p.f.subgradient = [c, b](const Vector& y) { return (y - c + b).eval(); };
  p.f.hessian = [](const Vector& y) { return Matrix::Identity(y.size(), y.size()).eval(); };
  p.r = Regularizer::zero();
  return p;
}

Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& x,
                          double h) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

}  // namespace

TEST(Envelope, FrozenEuclideanQuadratic) {
  const EnvelopeProblem p = quadratic(Vector::Zero(2), Vector::Zero(2));
  const auto phi = LegendreFunction::euclidean();
  const Vector x = vec({2.0, 0.0});
  const EnvelopeReport rep = stationarity(p, phi, x, 1.0);
  EXPECT_TRUE(rep.prox_point.isApprox(vec({1.0, 0.0}), 1e-12));
  EXPECT_NEAR(rep.envelope_value_direct, 1.0, 1e-12);
  EXPECT_NEAR(rep.envelope_value_conjugate, 1.0, 1e-12);
  EXPECT_TRUE(rep.envelope_gradient.isApprox(vec({1.0, 0.0}), 1e-12));
  EXPECT_NEAR(rep.divergence, 0.5, 1e-12);
  EXPECT_NEAR(rep.local_dual_norm_of_gradient, 1.0, 1e-12);
  ASSERT_TRUE(rep.lower_bound_check.has_value());
  EXPECT_NEAR(*rep.lower_bound_check, 0.0, 1e-12);
}

TEST(Envelope, GradientMatchesFiniteDifferences) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::uniform_real_distribution<double> pos(0.2, 2.0);
  struct Case {
    LegendreFunction phi;
    bool positive;
  };
  const std::vector<Case> cases = {{LegendreFunction::euclidean(), false},
                                   {LegendreFunction::shannon_entropy(), true},
                                   {build_poly_legendre({1.0, 0.0, 2.0}), false},
                                   {LegendreFunction::norm_power_sum({1.0, 0.0, 1.0}), false}};
  const EnvelopeProblem p = quadratic(vec({0.5, 1.0}), vec({0.1, -0.2}));
  EnvelopeOptions eo;
  eo.tol = 1e-13;
  for (const auto& c : cases) {
    for (int k = 0; k < 25; ++k) {
      const Vector x = c.positive ? vec({pos(gen), pos(gen)}) : vec({u(gen), u(gen)});
      const double lambda = 0.5;
      const Vector g = envelope_gradient(p, c.phi, x, lambda, eo);
      const Vector fd = central_difference(
          [&](const Vector& y) {
            return envelope_value(p, c.phi, y, lambda, EnvelopePath::direct, eo);
          },
          x, 1e-5);
      EXPECT_LE((g - fd).norm(), 1e-5 * std::max(1.0, g.norm())) << to_string(c.phi.kind());
      const double vd = envelope_value(p, c.phi, x, lambda, EnvelopePath::direct, eo);
      const double vc = envelope_value(p, c.phi, x, lambda, EnvelopePath::conjugate, eo);
      EXPECT_NEAR(vd, vc, 1e-6 * std::max(1.0, std::abs(vd))) << to_string(c.phi.kind());
    }
  }
}

TEST(Envelope, WeaklyConvexCompositeInstance) {
  const ProblemInstance inst = make_problem("P1");
  const EnvelopeProblem p = EnvelopeProblem::from(inst);
  EXPECT_DOUBLE_EQ(p.weak_convexity, inst.constants().tau + inst.constants().rho);
  const double lambda = 1.0 / (2.0 * p.weak_convexity);
  Rng rng = make_rng(2);
  EnvelopeOptions eo;
  eo.tol = 1e-12;
  for (int k = 0; k < 5; ++k) {
    const Vector x = inst.points(rng) * 0.5;
    const Vector g = envelope_gradient(p, inst.phi, x, lambda, eo);
    const Vector fd = central_difference(
        [&](const Vector& y) {
          return envelope_value(p, inst.phi, y, lambda, EnvelopePath::direct, eo);
        },
        x, 1e-6);
    // The envelope is only C¹ where the prox point crosses a kink of F, so the step stays small.
    EXPECT_LE((g - fd).norm(), 1e-6 * std::max(1.0, g.norm()));
  }
}

TEST(Envelope, MinorantAndMonotoneInLambda) {
  const ProblemInstance inst = make_problem("P5");
  const EnvelopeProblem p = EnvelopeProblem::from(inst);
  Rng rng = make_rng(4);
  for (int k = 0; k < 20; ++k) {
    const Vector x = inst.points(rng);
    double prev = inst.F(x);
    for (double lambda : {0.1, 0.3, 1.0, 3.0}) {
      const double v = envelope_value(p, inst.phi, x, lambda, EnvelopePath::direct);
      EXPECT_LE(v, prev + 1e-9);
      EXPECT_GE(v, inst.optimum->F_star - 1e-9);
      prev = v;
    }
  }
}

TEST(Envelope, StationaryPointHasZeroGradient) {
  const EnvelopeProblem p = quadratic(vec({0.5, 1.0}), Vector::Zero(2));
  const Vector x = vec({0.5, 1.0});
  for (const auto& phi : {LegendreFunction::euclidean(), build_poly_legendre({1.0, 1.0})}) {
    const StationaritySummary s = stationarity_summary(p, phi, x, 0.7);
    EXPECT_LE(s.divergence, 1e-20);
    EXPECT_LE(s.gradient_local_norm, 1e-9);
  }
}

TEST(Envelope, LowerBoundOnlyForUnitStronglyConvexGeometry) {
  EXPECT_TRUE(phi_unit_strongly_convex(LegendreFunction::euclidean(), Regularizer::zero()));
  EXPECT_TRUE(phi_unit_strongly_convex(LegendreFunction::shannon_entropy(),
                                       Regularizer::indicator_simplex()));
  EXPECT_FALSE(phi_unit_strongly_convex(LegendreFunction::shannon_entropy(), Regularizer::zero()));
  EXPECT_FALSE(phi_unit_strongly_convex(LegendreFunction::burg(), Regularizer::zero()));

  const ProblemInstance inst = make_problem("P3");
  const EnvelopeProblem p = EnvelopeProblem::from(inst);
  Rng rng = make_rng(8);
  for (int k = 0; k < 10; ++k) {
    const EnvelopeReport rep = stationarity(p, inst.phi, inst.points(rng), 0.5);
    ASSERT_TRUE(rep.lower_bound_check.has_value());
    EXPECT_GE(*rep.lower_bound_check, -1e-8);
  }
}

TEST(Envelope, RejectsLambdaBeyondWeakConvexity) {
  const ProblemInstance inst = make_problem("P1");
  const EnvelopeProblem p = EnvelopeProblem::from(inst);
  EXPECT_THROW(bregman_prox_point(p, inst.phi, inst.x0, 2.0 / p.weak_convexity), ConfigError);
}

TEST(Envelope, ConstantObjective) {
  EnvelopeProblem p;
  p.f.value = [](const Vector&) { return 2.5; };
  p.f.subgradient = [](const Vector& y) { return Vector::Zero(y.size()).eval(); };
  p.f.hessian = [](const Vector& y) { return Matrix::Zero(y.size(), y.size()).eval(); };
  p.r = Regularizer::zero();
  for (const auto& phi : {LegendreFunction::euclidean(), build_poly_legendre({1.0, 0.0, 1.0})}) {
    const Vector x = vec({0.7, -1.2});
    EXPECT_NEAR(envelope_value(p, phi, x, 0.5, EnvelopePath::direct), 2.5, 1e-12);
    EXPECT_NEAR(envelope_value(p, phi, x, 0.5, EnvelopePath::conjugate), 2.5, 1e-12);
  }
}

TEST(Envelope, PiecewiseOneDimensionalProxAgainstGoldenSection) {
  // F(y) = |y − 0.3| + 2|y + 0.5| under Φ = 3.5y² + y⁴.
  EnvelopeProblem p;
  p.f.value = [](const Vector& y) { return std::abs(y[0] - 0.3) + 2.0 * std::abs(y[0] + 0.5); };
  p.f.subgradient = [](const Vector& y) {
    auto sgn = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
    return vec({sgn(y[0] - 0.3) + 2.0 * sgn(y[0] + 0.5)});
  };
  p.r = Regularizer::zero();
  const auto phi = build_composite_legendre({1.0}, {0.0, 0.0, 4.0});
  for (double x0 : {-2.0, -0.6, 0.0, 0.4, 1.7}) {
    for (double lambda : {0.05, 0.3, 2.0}) {
      const Vector x = vec({x0});
      const double got = bregman_prox_point(p, phi, x, lambda)[0];
      const double ref = golden_section(
          [&](double y) { return p.F(vec({y})) + phi.bregman(vec({y}), x) / lambda; }, -3.0, 3.0,
          1e-12);
      EXPECT_NEAR(got, ref, 1e-8) << x0 << " " << lambda;
    }
  }
}
