#include "bregopt/legendre.hpp"

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

// Central differences with h = ε^{1/3}(1 + ‖x‖).
Vector fd_gradient(const LegendreFunction& phi, const Vector& x) {
  const double h = std::cbrt(kEps) * (1.0 + x.norm());
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector p = x, m = x;
    p[i] += h;
    m[i] -= h;
    g[i] = (phi.value(p) - phi.value(m)) / (2.0 * h);
  }
  return g;
}

Vector fd_hessian_apply(const LegendreFunction& phi, const Vector& x, const Vector& v) {
  const double h = std::cbrt(kEps) * (1.0 + x.norm()) / (1.0 + v.norm());
  return (phi.gradient(x + h * v) - phi.gradient(x - h * v)) / (2.0 * h);
}

double poly(const std::vector<double>& a, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * std::pow(u, static_cast<double>(i));
  return acc;
}

std::vector<LegendreFunction> zoo() {
  return {LegendreFunction::euclidean(),
          LegendreFunction::shannon_entropy(),
          LegendreFunction::burg(),
          LegendreFunction::poly_growth({1.0, 0.5, 0.25}),
          LegendreFunction::norm_power_sum({1.0, 0.0, 2.0}),
          build_composite_legendre({1.0}, {0.0, 0.0, 4.0})};
}

Vector interior_point(const LegendreFunction& phi, Rng& rng, std::size_t d) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  Vector x(static_cast<Eigen::Index>(d));
  for (auto& v : x) v = phi.domain() == DomainKind::all_space ? n(rng) : u(rng);
  return x;
}

}  // namespace

TEST(PhiValue, FrozenExamples) {
  EXPECT_DOUBLE_EQ(LegendreFunction::euclidean().value(vec({3, 4})), 12.5);
  EXPECT_DOUBLE_EQ(LegendreFunction::poly_growth({1.0}).value(vec({1, 0})), 3.5);
  EXPECT_DOUBLE_EQ(LegendreFunction::shannon_entropy().value(vec({1, 1})), 0.0);
  EXPECT_EQ(LegendreFunction::shannon_entropy().value(vec({-1, 1})), kInf);
  EXPECT_EQ(LegendreFunction::burg().value(vec({0, 1})), kInf);
}

TEST(PhiGradient, FrozenExamples) {
  EXPECT_TRUE(LegendreFunction::euclidean().gradient(vec({3, 4})).isApprox(vec({3, 4})));
  const double e = std::exp(1.0);
  EXPECT_TRUE(LegendreFunction::shannon_entropy().gradient(vec({e, e})).isApprox(vec({2, 2}), 1e-15));
  EXPECT_TRUE(LegendreFunction::poly_growth({0, 0, 1}).gradient(vec({1, 0})).isApprox(vec({13, 0})));
  EXPECT_THROW(LegendreFunction::shannon_entropy().gradient(vec({0, 1})), DomainError);
  // Radial terms: gradient at the origin is the analytic limit 0.
  EXPECT_TRUE(LegendreFunction::poly_growth({1, 1, 1}).gradient(vec({0, 0})).isZero(0.0));
}

TEST(Bregman, FrozenExamples) {
  EXPECT_DOUBLE_EQ(LegendreFunction::euclidean().bregman(vec({3, 4}), vec({0, 0})), 12.5);
  EXPECT_DOUBLE_EQ(LegendreFunction::poly_growth({0, 0, 1}).bregman(vec({1, 0}), vec({0, 0})), 3.25);
  for (const auto& phi : zoo()) {
    const Vector x = vec({0.7, 1.3});
    EXPECT_EQ(phi.bregman(x, x), 0.0) << to_string(phi.kind());
  }
}

TEST(BuildPoly, CoefficientsFromGrowthPolynomial) {
  const Vector x = vec({0.6, -0.8});  // ‖x‖ = 1
  const Vector y = vec({1.2, 1.6});   // ‖y‖ = 2
  EXPECT_NEAR(build_poly_legendre({1.0}).value(y), 3.5 * 4.0, 1e-13);
  EXPECT_NEAR(build_poly_legendre({0, 0, 1}).value(y), 13.0 / 4.0 * 16.0, 1e-12);
  EXPECT_NEAR(build_poly_legendre({1, 1}).value(y), 3.5 * 4.0 + 10.0 / 3.0 * 8.0, 1e-12);
  EXPECT_NEAR(build_composite_legendre({1}, {1}).value(x), 3.5 + 0.5, 1e-14);
  EXPECT_NEAR(build_composite_legendre({0}, {0, 0, 1}).value(y), 0.25 * 16.0, 1e-13);
  EXPECT_NEAR(build_composite_legendre({0, 1}, {0}).value(y), 10.0 / 3.0 * 8.0, 1e-12);
  EXPECT_THROW(build_poly_legendre({1.0, -0.1}), ConfigError);
  EXPECT_THROW(build_composite_legendre({-1.0}, {1.0}), ConfigError);
}

TEST(HessianApply, FrozenExamples) {
  EXPECT_TRUE(LegendreFunction::euclidean().hessian_apply(vec({5, -1}), vec({2, 3})).isApprox(vec({2, 3})));
  EXPECT_TRUE(LegendreFunction::shannon_entropy().hessian_apply(vec({2, 4}), vec({1, 1})).isApprox(vec({0.5, 0.25})));
  const auto p2 = LegendreFunction::poly_growth({0, 0, 1});
  EXPECT_TRUE(p2.hessian_apply(vec({1, 0}), vec({0, 1})).isApprox(vec({0, 13})));
  EXPECT_TRUE(p2.hessian_apply(vec({1, 0}), vec({1, 0})).isApprox(vec({39, 0})));
}

TEST(LocalDualNorm, FrozenExamples) {
  EXPECT_DOUBLE_EQ(local_dual_norm(LegendreFunction::euclidean(), vec({1, 2}), vec({3, 4})), 5.0);
  EXPECT_DOUBLE_EQ(local_dual_norm(LegendreFunction::shannon_entropy(), vec({2, 2}), vec({1, 0})), 2.0);
  EXPECT_DOUBLE_EQ(local_dual_norm(LegendreFunction::burg(), vec({2, 2}), vec({0, 0})), 0.0);
  EXPECT_THROW(local_dual_norm(LegendreFunction::norm_power_sum({0, 1}), vec({0, 0}), vec({1, 0})),
               SolverError);
}

TEST(Invariants, NonnegativityAndIdentifiability) {
  Rng rng = make_rng(11);
  for (const auto& phi : zoo()) {
    for (int k = 0; k < 1000; ++k) {
      const Vector x = interior_point(phi, rng, 3);
      const Vector y = interior_point(phi, rng, 3);
      const double d = phi.bregman(y, x);
      EXPECT_GE(d, 0.0) << to_string(phi.kind());
      EXPECT_GT(d, 0.0) << to_string(phi.kind());
    }
  }
}

TEST(Invariants, GradientMatchesFiniteDifferences) {
  Rng rng = make_rng(12);
  for (const auto& phi : zoo()) {
    for (int k = 0; k < 200; ++k) {
      const Vector x = interior_point(phi, rng, 3);
      const Vector g = phi.gradient(x);
      const Vector fd = fd_gradient(phi, x);
      EXPECT_LE((g - fd).norm(), 1e-6 * std::max(1.0, g.norm())) << to_string(phi.kind());
    }
  }
}

TEST(Invariants, HessianMatchesFiniteDifferences) {
  Rng rng = make_rng(13);
  std::normal_distribution<double> n(0.0, 1.0);
  for (const auto& phi : zoo()) {
    for (int k = 0; k < 200; ++k) {
      const Vector x = interior_point(phi, rng, 3);
      Vector v(3);
      for (auto& c : v) c = n(rng);
      const Vector h = phi.hessian_apply(x, v);
      const Vector fd = fd_hessian_apply(phi, x, v);
      EXPECT_LE((h - fd).norm(), 1e-5 * std::max(1.0, h.norm())) << to_string(phi.kind());
      EXPECT_TRUE(h.isApprox(phi.hessian(x) * v, 1e-12)) << to_string(phi.kind());
    }
  }
}

TEST(Invariants, PolyGrowthLowerBound) {
  Rng rng = make_rng(14);
  std::uniform_real_distribution<double> coef(0.0, 2.0);
  std::uniform_int_distribution<int> degree(0, 4);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> radius(0.0, 10.0);
  auto ball = [&](int d) {
    Vector x(d);
    for (auto& c : x) c = n(rng);
    return Vector(x.normalized() * radius(rng));
  };
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(static_cast<std::size_t>(degree(rng)) + 1);
    for (auto& c : a) c = coef(rng);
    a.back() += 0.1;
    const auto phi = build_poly_legendre(a);
    for (int k = 0; k < 1000; ++k) {
      const Vector x = ball(3), y = ball(3);
      const double d = phi.bregman(y, x);
      const double lb = 0.5 * (poly(a, x.norm()) + poly(a, y.norm())) * (x - y).squaredNorm();
      EXPECT_GE(d - lb, -1e-9 * (1.0 + std::abs(d)));
    }
  }
}

TEST(Invariants, NormPowerSumLowerBound) {
  Rng rng = make_rng(15);
  std::normal_distribution<double> n(0.0, 2.0);
  const std::vector<double> q = {1.0, 0.5, 2.0};
  const auto phi = LegendreFunction::norm_power_sum(q);
  for (int k = 0; k < 1000; ++k) {
    Vector x(2), y(2);
    for (auto& c : x) c = n(rng);
    for (auto& c : y) c = n(rng);
    const double d = phi.bregman(y, x);
    EXPECT_GE(d - 0.5 * poly(q, x.norm()) * (x - y).squaredNorm(), -1e-9 * (1.0 + d));
  }
}

TEST(Invariants, DeclaredStrongConvexity) {
  Rng rng = make_rng(16);
  std::gamma_distribution<double> g(1.0, 1.0);
  const auto ent = LegendreFunction::shannon_entropy();
  ASSERT_TRUE(ent.strong_convexity().has_value());
  EXPECT_TRUE(ent.strong_convexity()->simplex_only);
  EXPECT_EQ(ent.strong_convexity()->norm, NormKind::l1);
  for (int k = 0; k < 1000; ++k) {
    Vector x(4), y(4);
    for (auto& c : x) c = g(rng);
    for (auto& c : y) c = g(rng);
    x /= x.sum();
    y /= y.sum();
    const double l1 = (y - x).lpNorm<1>();
    EXPECT_GE(ent.bregman(y, x) - 0.5 * l1 * l1, -1e-12);
  }
  const auto euc = LegendreFunction::euclidean();
  ASSERT_TRUE(euc.strong_convexity().has_value());
  EXPECT_EQ(euc.strong_convexity()->modulus, 1.0);
  EXPECT_FALSE(LegendreFunction::burg().strong_convexity().has_value());
}

TEST(Domain, WeightedSumRequiresCommonDomain) {
  EXPECT_THROW(LegendreFunction::weighted_sum(
                   {LegendreFunction::euclidean(), LegendreFunction::shannon_entropy()}, {1.0, 2.0}),
               ConfigError);
  const auto mix = LegendreFunction::weighted_sum(
      {LegendreFunction::euclidean(), LegendreFunction::poly_growth({0, 1})}, {1.0, 2.0});
  EXPECT_EQ(mix.domain(), DomainKind::all_space);
  const Vector y = vec({1.2, 1.6});
  EXPECT_NEAR(mix.value(y), 2.0 + 2.0 * 10.0 / 3.0 * 8.0, 1e-12);
  EXPECT_THROW(LegendreFunction::weighted_sum({LegendreFunction::euclidean()}, {-1.0}), ConfigError);
}
