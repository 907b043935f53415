#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bmrep/bte.hpp"
#include "bmrep/dyson.hpp"
#include "bmrep/error.hpp"
#include "bmrep/mc.hpp"
#include "bmrep/parse.hpp"
#include "bmrep/special.hpp"
#include "support/corpus.hpp"

using namespace bmrep;

namespace {

PathContext two_point(double t, double wt, double T, double wT) {
  if (t == 0.0) return PathContext::from_knots({{T, wT}});
  return PathContext::from_knots({{t, wt}, {T, wT}});
}

}  // namespace

TEST(BTE, OneStepExamples) {
  const Expr cubic = Expr::brownian(2.0).pow(3);
  for (double wT : {-1.0, 0.0, 5.0})
    EXPECT_NEAR(bte_one_step(cubic, 1, 1.0, 3, two_point(1.0, 2.0, 2.0, wT)), 14.0, 1e-12);
  EXPECT_EQ(bte_one_step(Expr::constant(3.5), 0, 1.0, 4, two_point(0.0, 0.0, 1.0, 0.3)), 3.5);
  EXPECT_NEAR(bte_one_step(Expr::brownian(1.0), 1, 0.5, 1, two_point(0.5, -0.4, 1.0, 0.9)), -0.4,
              1e-15);
}

TEST(BTE, TermsMatchGammaAndDerivatives) {
  const Expr cubic = Expr::brownian(1.0).pow(3);
  const PathContext p = two_point(0.5, 0.3, 1.0, 1.1);
  const BTEStep step = bte_expand(cubic, 0.5, 0.5, 5, p);
  ASSERT_EQ(step.terms.size(), 6u);
  EXPECT_TRUE(step.exact);
  const double derivs[] = {std::pow(1.1, 3), 3 * 1.1 * 1.1, 6 * 1.1, 6, 0, 0};
  for (int l = 0; l <= 5; ++l) {
    EXPECT_EQ(step.terms[l].gamma, gamma_coeff(l, 0.8, 0.5));
    EXPECT_NEAR(step.terms[l].derivative, derivs[l], 1e-14);
  }
}

TEST(BTE, OffGridTimesRejected) {
  const Expr f = Expr::brownian(0.7).pow(2);
  EXPECT_THROW(bte_expand(f, 0.5, 0.5, 2, two_point(0.5, 0.0, 1.0, 0.0)), DomainError);
  EXPECT_THROW(bte_expand(Expr::time_integral(0, 1), 0.5, 0.5, 2, two_point(0.5, 0, 1, 0)),
               ClosureError);
}

TEST(BTE, PolynomialsTerminateExactly) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> z;
  for (int d = 0; d <= 6; ++d) {
    const Expr f = Expr::brownian(1.0).pow(d);
    const BTEStep step = bte_expand(f, 0.0, 1.0, d + 3, two_point(0.0, 0.0, 1.0, z(rng)));
    for (int l = d + 1; l <= d + 3; ++l) EXPECT_EQ(step.terms[l].derivative, 0.0);
    EXPECT_TRUE(step.exact);
    // E[W(1)^d] = (d-1)!! for even d
    double moment = d % 2 ? 0.0 : 1.0;
    for (int k = d - 1; k > 0; k -= 2) moment *= k;
    EXPECT_NEAR(step.value(), moment, 1e-10 * (1 + moment));
  }
}

TEST(BTE, GammaFormEqualsDoubleSumForm) {
  std::mt19937_64 rng(32);
  std::normal_distribution<double> z;
  const auto polys = testsupport::polynomial_corpus(33, 10, 6);
  for (int trial = 0; trial < 100; ++trial) {
    const Expr& f = polys[trial % polys.size()];
    const double wt = z(rng), wT = wt + std::sqrt(0.5) * z(rng);
    const PathContext p = two_point(0.5, wt, 1.0, wT);
    const double gamma_form = bte_expand(f, 0.5, 0.5, 6, p).value();
    const double double_sum = bte_double_sum(f, 0.5, 1.0, 12, p);
    EXPECT_NEAR(gamma_form, double_sum, 1e-12 * std::max(1.0, std::abs(gamma_form)));
  }
}

TEST(BTE, SkorohodClosedForm) {
  const PathContext p = two_point(0.0, 0.0, 1.0, 0.8);
  EXPECT_NEAR(iterated_skorohod_closed_form(Expr::brownian(1.0), 1, 0.0, 1.0, p), -0.36, 1e-15);
  const Expr f = parse_expr("W(1)^2 + W(1)");
  EXPECT_EQ(iterated_skorohod_closed_form(f, 0, 0.0, 1.0, p), f.evaluate(p));
  EXPECT_THROW(iterated_skorohod_closed_form(f, 1, 1.0, 1.0, p), DomainError);
}

TEST(BTE, MultiStep) {
  const Expr cubic = Expr::brownian(2.0).pow(3);
  std::vector<std::pair<double, double>> k{{0.5, 0.1}, {1.0, 1.0}, {1.5, -0.3}, {2.0, 0.6}};
  const PathContext p = PathContext::from_knots(k);
  EXPECT_NEAR(bte_multi_step(cubic, 2, 4, 0.5, 3, p), 4.0, 1e-12);
  const Expr square = Expr::brownian(2.0).pow(2);
  for (int m = 0; m <= 4; ++m) {
    const double w = p.brownian(0.5 * m);
    EXPECT_NEAR(bte_multi_step(square, m, 4, 0.5, 2, p), w * w + (4 - m) * 0.5, 1e-12);
  }
  EXPECT_EQ(bte_multi_step(Expr::constant(2.0), 0, 4, 0.5, 3, p), 2.0);
}

TEST(BTE, MultiStepIntermediateTimes) {
  // F = W(0.5) W(1)^2 on the grid delta = 0.5: E[F | F_0] = E[W(0.5)^3 + 0.5 W(0.5)] = 0
  // and E[F | F_0.5] = W(0.5)^3 + 0.5 W(0.5)
  const Expr f = Expr::brownian(0.5) * Expr::brownian(1.0).pow(2);
  const PathContext p = PathContext::from_knots({{0.5, 0.7}, {1.0, -0.2}});
  EXPECT_NEAR(bte_multi_step(f, 1, 2, 0.5, 3, p), std::pow(0.7, 3) + 0.5 * 0.7, 1e-13);
  EXPECT_NEAR(bte_multi_step(f, 0, 2, 0.5, 3, p), 0.0, 1e-13);
}

TEST(BTE, MultiStepTermCap) {
  const Expr f = Expr::brownian(4.0).pow(8);
  std::vector<std::pair<double, double>> k;
  for (int i = 1; i <= 16; ++i) k.emplace_back(0.25 * i, 0.0);
  EXPECT_THROW(bte_multi_step(f, 0, 16, 0.25, 8, PathContext::from_knots(k), 100),
               NumericalError);
}

TEST(BTE, FineGridAgreesWithDyson) {
  const double delta = 1.0 / 64;
  std::vector<std::pair<double, double>> k;
  std::mt19937_64 rng(34);
  std::normal_distribution<double> z;
  double w = 0.0;
  for (int i = 1; i <= 64; ++i) k.emplace_back(i * delta, w += std::sqrt(delta) * z(rng));
  const PathContext p = PathContext::from_knots(k);
  const Expr cubic = examples::cubic(1.0);
  for (int m : {0, 16, 40}) {
    const double t = m * delta;
    const double bte = bte_multi_step(cubic, m, 64, delta, 3, p);
    const double dyson = conditional_expectation(cubic, t, 1.0, p, 4).value();
    EXPECT_NEAR(bte, dyson, 1e-10);
  }
}

TEST(BTE, AgreesWithMonteCarlo) {
  const PathContext prefix = PathContext::from_knots({{0.5, 0.6}});
  for (int k = 1; k <= 5; ++k) {
    const Expr f = Expr::brownian(1.0).pow(k);
    const double bte = bte_one_step(f, 1, 0.5, k, PathContext::from_knots({{0.5, 0.6}, {1.0, 0.0}}));
    const MCEstimate mc =
        estimate_conditional(f, 0.5, prefix, TimeGrid::uniform(1.0, 0.5), 1u << 18, 40 + k);
    EXPECT_LE(std::abs(bte - mc.mean), 4 * mc.standard_error) << "k=" << k;
  }
}

TEST(RemainderBound, Examples) {
  const double norms0[] = {0.0, 0.0, 0.0};
  EXPECT_EQ(remainder_bound(norms0, 2, 1.0).bound, 0.0);
  const double single[] = {1.7};
  EXPECT_NEAR(remainder_bound(single, 0, 0.3).bound, 1.7 * 1.7, 1e-15);
  // F = exp(W(1)/2): ||D^k F|| = 2^{-k} ||F||, ||F||^2 = e^{1/2}
  const int L = 20;
  std::vector<double> norms;
  for (int i = 0; i <= L; ++i) norms.push_back(std::pow(0.5, 2 * L - i) * std::exp(0.25));
  const TruncationReport r = remainder_bound(norms, L, 1.0);
  EXPECT_LT(r.bound, 1e-8);
  EXPECT_TRUE(r.below_tolerance);
  EXPECT_TRUE(r.monotone);
  const double negative[] = {-1.0};
  EXPECT_THROW(remainder_bound(negative, 0, 1.0), DomainError);
}

TEST(RemainderBound, NormEstimates) {
  const Expr f = Expr::exp(Expr::brownian(1.0).scaled(0.5));
  const auto norms = estimate_terminal_derivative_norms(f, 1.0, 3, 1u << 16, 3);
  ASSERT_EQ(norms.size(), 4u);
  for (int k = 0; k <= 3; ++k)
    EXPECT_NEAR(norms[k], std::pow(0.5, k) * std::exp(0.25), 0.02 * std::pow(0.5, k));
}
