#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>

#include "bmrep/cir.hpp"
#include "bmrep/dyson.hpp"
#include "bmrep/error.hpp"
#include "bmrep/lognormal.hpp"
#include "bmrep/special.hpp"

using namespace bmrep;

TEST(Lognormal, TaylorOracle) {
  // sum (-1)^n / n! exp(n^2 sigma^2 T / 2) directly in long double
  const auto s = lognormal_taylor_series(0.6, 1.0, 12);
  long double acc = 0.0L;
  for (int n = 0; n < 12; ++n) {
    acc += (n % 2 ? -1.0L : 1.0L) / std::tgamma(n + 1.0L) * std::exp(0.18L * n * n);
    EXPECT_NEAR(s.partial_sums[n], static_cast<double>(acc), 1e-12 * std::abs(double(acc)) + 1e-13);
  }
  EXPECT_EQ(s.divergence_onset.value_or(-1) <= 8, true);
}

TEST(Lognormal, DysonTermsFromMomentOracle) {
  // For F = exp(-e^{x}), D^{2n} acts as (d/dx)^{2n} sigma^{2n}; a_n =
  // (sigma^2 (T-t)/2)^n / n! * g^{(2n)}(x) with g = exp(-e^x), and g's
  // derivatives come from the Taylor coefficients of exp(-e^{x+h}).
  using Real = boost::multiprecision::cpp_bin_float_50;
  const double sigma = 0.6, T = 1.0;
  const int n_terms = 8;
  const auto s = lognormal_dyson_series(0.0, sigma, 0.0, T, 0.0, n_terms);
  // exp(-e^{h}) = e^{-1} exp(-(e^h - 1)), series of e^h - 1 then compose exp
  const int K = 2 * n_terms;
  std::vector<Real> a(K + 1, 0), e(K + 1, 0);
  Real fact = 1;
  for (int k = 1; k <= K; ++k) {
    fact *= k;
    a[k] = -Real(1) / fact;
  }
  e[0] = exp(Real(-1));
  for (int n = 1; n <= K; ++n) {
    Real acc = 0;
    for (int k = 1; k <= n; ++k) acc += Real(k) * a[k] * e[n - k];
    e[n] = acc / n;
  }
  Real fk = 1;
  for (int n = 0; n < n_terms; ++n) {
    if (n > 0) fk *= (2 * n - 1) * (2 * n);
    const Real deriv = e[2 * n] * fk;  // g^{(2n)}(0)
    Real coef = pow(Real(sigma * sigma * T / 2), n);
    for (int j = 2; j <= n; ++j) coef /= j;
    EXPECT_NEAR(s.terms[n], static_cast<double>(coef * deriv), 1e-14) << n;
  }
}

TEST(Lognormal, SmallSigmaLimit) {
  const auto s = lognormal_dyson_series(0.3, 1e-6, 0.0, 1.0, 0.0, 5);
  for (double v : s.partial_sums) EXPECT_NEAR(v, std::exp(-std::exp(0.3)), 1e-10);
}

TEST(Lognormal, ConditionalShift) {
  // at time t with W(t) = w the series is the t = 0 series with M shifted by -sigma w
  const auto a = lognormal_dyson_series(0.0, 0.6, 0.5, 1.0, 0.4, 10);
  const auto b = lognormal_dyson_series(-0.24, std::sqrt(0.18), 0.0, 1.0, 0.0, 10);
  for (int n = 0; n < 10; ++n) EXPECT_NEAR(a.partial_sums[n], b.partial_sums[n], 1e-14);
}

TEST(Lognormal, Guards) {
  EXPECT_THROW(lognormal_dyson_series(0.0, 0.6, 0.0, 1.0, 0.0, kMaxLognormalTerms + 1), DomainError);
  EXPECT_THROW(lognormal_taylor_series(-0.6, 1.0, 4), DomainError);
}

TEST(CIR, SechClosedFormAtSmallTau) {
  for (double tau : {0.02, 0.05, 0.1}) {
    const auto c = cir_price(tau, 0.05, 1, Kernel::polynomial({1.0}), Kernel::polynomial({0.0}));
    const double x = std::sqrt(2.0) * tau;
    const double closed =
        std::pow(1.0 / std::cosh(x), 0.5) * std::exp(-0.05 * std::tanh(x) / std::sqrt(2.0));
    EXPECT_NEAR(c.price, closed, 5e-7) << tau;
  }
  const auto zero = cir_price(0.0, 0.05, 2, Kernel::polynomial({1.0}), Kernel::polynomial({0.0}));
  EXPECT_EQ(zero.price, 1.0);
}

TEST(CIR, LeadingCoefficients) {
  const Kernel one = Kernel::polynomial({1.0}), zero = Kernel::polynomial({0.0});
  // A0, A1, A2 are exact polynomials in tau for constant coefficients
  const auto c = cir_price(1.0, 0.0, 1, one, zero);
  EXPECT_NEAR(c.A0, 1.0 - 0.5 + 7.0 / 24, 1e-12);
  EXPECT_NEAR(c.A1, 2.0 / 3 - 13.0 / 15, 1e-12);
  EXPECT_NEAR(c.A2, 2.0 / 9, 1e-12);
}

TEST(CIR, RiccatiSpecialCases) {
  const double grid[] = {0.0, 0.25, 0.5, 1.0};
  const auto c = riccati_reference(grid, Kernel::polynomial({1.0}), Kernel::polynomial({0.0}));
  for (int i = 0; i < 4; ++i)
    EXPECT_NEAR(c[i], std::tanh(std::sqrt(2.0) * grid[i]) / std::sqrt(2.0), 1e-10);
  // sigma = 0: C = int_t^T exp(2 btilde(t) - 2 btilde(u)) du, here b = 0.5 so C = (1 - e^{-tau}) / 1
  const auto lin = riccati_reference(grid, Kernel::polynomial({0.0}), Kernel::polynomial({0.5}));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(lin[i], 1.0 - std::exp(-grid[i]), 1e-10);
}

TEST(CIR, GeneralCoefficientsMatchRiccati) {
  // extracted C agrees with the Riccati solution to the truncation order
  const Kernel sigma = Kernel::polynomial({0.8, 0.2});
  const Kernel b = Kernel::polynomial({0.3});
  const double tau = 0.1;
  const auto c = cir_price(tau, 0.04, 1, sigma, b);
  const double grid[] = {tau};
  const double ric = riccati_reference(grid, sigma, b)[0];
  EXPECT_NEAR(c.C, ric, 10 * c.truncation_heuristic * tau);
  EXPECT_THROW(cir_price(0.1, 0.0, 0, sigma, b), DomainError);
}
