#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include "bmrep/dyson.hpp"
#include "bmrep/error.hpp"
#include "bmrep/mc.hpp"
#include "bmrep/parse.hpp"
#include "support/corpus.hpp"

using namespace bmrep;
using testsupport::frozen_prefix;

namespace {

// Truncated power series in h, enough to differentiate the heat kernel in T.
constexpr int kOrder = 8;
using Series = std::array<double, kOrder>;

Series mul(const Series& a, const Series& b) {
  Series c{};
  for (int i = 0; i < kOrder; ++i)
    for (int j = 0; i + j < kOrder; ++j) c[i + j] += a[i] * b[j];
  return c;
}

Series exp_series(const Series& a) {
  // e' = a' e
  Series e{};
  e[0] = std::exp(a[0]);
  for (int n = 1; n < kOrder; ++n) {
    double s = 0.0;
    for (int k = 1; k <= n; ++k) s += k * a[k] * e[n - k];
    e[n] = s / n;
  }
  return e;
}

// (u0 + h)^p as a binomial series
Series power_series(double u0, double p) {
  Series s{};
  double c = std::pow(u0, p);
  for (int k = 0; k < kOrder; ++k) {
    s[k] = c;
    c *= (p - k) / ((k + 1) * u0);
  }
  return s;
}

}  // namespace

TEST(Dyson, CubicTerms) {
  const Expr f = examples::cubic(1.0);
  const PathContext p = frozen_prefix(0.5, 1.0);
  EXPECT_EQ(dyson_term(f, 0, 0.5, 1.0, p), 1.0);
  EXPECT_NEAR(dyson_term(f, 1, 0.5, 1.0, p), 1.5, 1e-15);
  EXPECT_EQ(dyson_term(f, 2, 0.5, 1.0, p), 0.0);
  const DysonExpansion e = conditional_expectation(f, 0.5, 1.0, p, 10);
  EXPECT_TRUE(e.terminated);
  EXPECT_EQ(e.value(), 2.5);
}

TEST(Dyson, FirstTermIsFrozenFunctional) {
  std::mt19937_64 rng(41);
  for (const Expr& f : testsupport::expression_corpus(401, 60)) {
    const PathContext path = testsupport::random_path(rng);
    const DysonExpansion e = conditional_expectation(f, 0.5, 1.0, path, 1);
    EXPECT_EQ(e.partial_sums[0], f.freeze(0.5).evaluate(path)) << f.text();
  }
}

TEST(Dyson, HeatKernelTaylorDuality) {
  const double tau = 2.0, T = 1.0;
  for (auto [t, w] : {std::pair{0.0, 0.0}, std::pair{0.3, 0.5}, std::pair{0.6, -1.2}}) {
    const DysonExpansion e =
        conditional_expectation(examples::heat_kernel(tau, T), t, T, frozen_prefix(t, w), 7, 0.0);
    // f(w, T - h) = (tau - T + h)^{-1/2} exp(-w^2 / (2 (tau - T + h)))
    Series inv = power_series(tau - T, -1.0);
    Series root = power_series(tau - T, -0.5);
    Series arg{};
    for (int k = 0; k < kOrder; ++k) arg[k] = -0.5 * w * w * inv[k];
    const Series g = mul(root, exp_series(arg));
    for (int i = 0; i <= 6; ++i) {
      // g is the series of f(w, T - h), so a_i = (t - T)^i / i! d^i f / dT^i = (T - t)^i g_i
      const double expected = std::pow(T - t, i) * g[i];
      EXPECT_NEAR(e.terms[i], expected, 1e-10) << "t=" << t << " i=" << i;
    }
  }
}

TEST(Dyson, StochasticExponentialFactorization) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const Kernel f = Kernel::polynomial({unif(rng), unif(rng), unif(rng)});
    const double t = 0.4, T = 1.0;
    const PathContext path = testsupport::random_path(rng);
    const Expr eps = examples::stochastic_exponential(f, T);
    const DysonExpansion e = conditional_expectation(eps, t, T, path, 12, 0.0);
    const double frozen = eps.freeze(t).evaluate(path);
    const double half = 0.5 * poly::integrate_exp(0.0, poly::multiply(f.monomial(), f.monomial()), t, T);
    double term = 1.0, sum = 0.0;
    for (int i = 0; i < 12; ++i) {
      if (i > 0) term *= half / i;
      sum += term;
      EXPECT_NEAR(e.partial_sums[i], frozen * sum, 1e-12 * std::max(1.0, frozen));
    }
  }
}

TEST(Dyson, SimplexAndHypercubeAgree) {
  std::mt19937_64 rng(43);
  const auto corpus = testsupport::expression_corpus(402, 12);
  DysonOptions cube{QuadratureMethod::hypercube};
  DysonOptions simplex{QuadratureMethod::simplex};
  for (std::size_t k = 0; k < corpus.size(); ++k) {
    const Expr& f = corpus[k];
    const PathContext path = testsupport::random_path(rng);
    const int max_i = k < 4 ? 3 : 2;
    for (int i = 1; i <= max_i; ++i) {
      const double a = dyson_term(f, i, 0.25, 1.0, path);
      const double h = dyson_term(f, i, 0.25, 1.0, path, cube);
      const double s = dyson_term(f, i, 0.25, 1.0, path, simplex);
      EXPECT_NEAR(h, s, 1e-9 * std::max(1.0, std::abs(h))) << f.text() << " i=" << i;
      EXPECT_NEAR(a, h, 1e-9 * std::max(1.0, std::abs(h))) << f.text() << " i=" << i;
    }
  }
}

TEST(Dyson, MertonAndClosedForms) {
  const DysonExpansion e = conditional_expectation(examples::merton(1.0), 0.0, 1.0,
                                                   frozen_prefix(0.0, 0.0), 30);
  EXPECT_NEAR(e.value(), std::exp(1.0 / 6), 1e-10);
  EXPECT_TRUE(e.below_atol);
  EXPECT_FALSE(e.divergence_onset.has_value());
}

TEST(Dyson, ConditionalExpectationExpr) {
  // P_u W(1)^3 = W(u)^3 + 3 (1 - u) W(u)
  const Expr p = conditional_expectation_expr(examples::cubic(1.0), 0.4, 1.0);
  const PathContext q = PathContext::from_knots({{0.4, -0.3}, {1.0, 0.5}});
  EXPECT_NEAR(p.evaluate(q), std::pow(-0.3, 3) + 1.8 * -0.3, 1e-15);
  EXPECT_EQ(p.terms().size(), 2u);
  const Expr m = conditional_expectation_expr(examples::merton(1.0), 0.5, 1.0);
  const PathContext path = PathContext::from_knots({{0.25, 0.3}, {0.5, -0.2}, {1.0, 0.0}});
  EXPECT_NEAR(m.evaluate(path),
              examples::merton_closed(0.5, 1.0, -0.2, path.time_integral(0.0, 0.5)), 1e-12);
}

TEST(Dyson, TruncationBound) {
  EXPECT_EQ(dyson_truncation_bound(0.0, 5, 0.0, 1.0), 0.0);
  EXPECT_EQ(dyson_truncation_bound(2.5, 0, 0.0, 1.0), 2.5);
  EXPECT_LT(dyson_truncation_bound(1.0, 20, 0.0, 1.0), 1e-18);
  EXPECT_NEAR(dyson_truncation_bound(3.0, 2, 0.5, 1.5), 3.0 / 8, 1e-15);
  EXPECT_THROW(dyson_truncation_bound(1.0, 2, 1.0, 0.5), DomainError);
}

TEST(Dyson, TowerProperty) {
  const std::vector<Expr> fs = {
      examples::cubic(1.0),
      examples::merton(1.0),
      examples::stochastic_exponential(Kernel::polynomial({0.5, 0.5}), 1.0),
      parse_expr("W(0.5)*W(1)^2"),
      parse_expr("exp(scale(0.3,W(1)))*W(0.75)"),
  };
  const TimeGrid grid = TimeGrid::uniform(1.0, 1.0 / 128);
  for (std::size_t k = 0; k < fs.size(); ++k) {
    const Expr p = conditional_expectation_expr(fs[k], 0.5, 1.0);
    const MCEstimate a = estimate_expectation(p, grid, 1u << 16, 100 + k);
    const MCEstimate b = estimate_expectation(fs[k], grid, 1u << 16, 200 + k);
    const double joint = std::hypot(a.standard_error, b.standard_error);
    EXPECT_LE(std::abs(a.mean - b.mean), 4 * joint) << fs[k].text();
  }
}

TEST(Dyson, ResidualExactForPolynomials) {
  const PathContext path = frozen_prefix(0.25, 0.8);
  const ResidualReport c = time_evolution_residual(examples::cubic(1.0), 0.75, 0.25, 1e-4, path);
  EXPECT_LE(c.residual, 1e-9);
  EXPECT_NEAR(c.generator, 3 * 0.8, 1e-12);
  const ResidualReport k = time_evolution_residual(Expr::brownian(1.0), 0.75, 0.25, 1e-4, path);
  EXPECT_EQ(k.residual, 0.0);
  EXPECT_EQ(k.value, 0.8);
}

TEST(Dyson, Guards) {
  const PathContext p = frozen_prefix(0.5, 0.0);
  EXPECT_THROW(conditional_expectation(examples::cubic(1.0), 0.5, 1.0, p, 0), DomainError);
  EXPECT_THROW(dyson_term(examples::cubic(1.0), -1, 0.5, 1.0, p), DomainError);
  EXPECT_THROW(examples::heat_kernel(1.0, 1.0), DomainError);
}
