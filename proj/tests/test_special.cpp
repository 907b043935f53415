#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <random>

#include "bmrep/bte.hpp"
#include "bmrep/error.hpp"
#include "bmrep/path.hpp"
#include "bmrep/special.hpp"

using namespace bmrep;
using Rational = boost::multiprecision::cpp_rational;

TEST(Hermite, SmallDegrees) {
  EXPECT_EQ(hermite(0, 3.7), 1.0);
  EXPECT_DOUBLE_EQ(hermite(2, 1.5), 1.25);
  EXPECT_DOUBLE_EQ(hermite(3, 2.0), 2.0);
  EXPECT_DOUBLE_EQ(hermite(4, 0.5), std::pow(0.5, 4) - 6 * 0.25 + 3);
  EXPECT_THROW(hermite(-1, 1.0), DomainError);
}

TEST(Hermite, RecurrenceResidualExactAtRationals) {
  for (Rational x : {Rational(1, 3), Rational(-7, 5), Rational(22, 7)}) {
    for (int n = 1; n < 30; ++n) {
      Rational r = hermite(n + 1, x) - x * hermite(n, x) + Rational(n) * hermite(n - 1, x);
      EXPECT_EQ(r, 0) << "n=" << n;
    }
  }
}

TEST(Hermite, ExplicitSumOracle) {
  // h_n(x) = n! sum_j (-1)^j x^{n-2j} / (j! (n-2j)! 2^j)
  for (int n = 0; n <= 12; ++n) {
    for (double x : {-2.3, -0.4, 0.0, 1.1, 3.0}) {
      double s = 0.0;
      for (int j = 0; 2 * j <= n; ++j)
        s += std::pow(-1.0, j) * std::pow(x, n - 2 * j) /
             (std::tgamma(j + 1.0) * std::tgamma(n - 2 * j + 1.0) * std::pow(2.0, j));
      s *= std::tgamma(n + 1.0);
      EXPECT_NEAR(hermite(n, x), s, 1e-9 * (1 + std::abs(s)));
    }
  }
}

TEST(Stirling, Conventions) {
  EXPECT_EQ(stirling2(0, 0), 1);
  EXPECT_EQ(stirling2(3, 0), 0);
  EXPECT_EQ(stirling2(4, 2), 7);
  EXPECT_EQ(stirling2(10, 3), 9330);
  EXPECT_THROW(stirling2(2, 3), DomainError);
  EXPECT_THROW(stirling2(-1, 0), DomainError);
}

TEST(Stirling, InclusionExclusionOracle) {
  // S(n,k) = (1/k!) sum_j (-1)^j C(k,j) (k-j)^n
  for (int n : {25, 40, 80}) {
    for (int k : {1, 7, n / 2, n - 1, n}) {
      BigInt acc = 0, binom = 1, fact = 1;
      for (int j = 0; j <= k; ++j) {
        BigInt p = boost::multiprecision::pow(BigInt(k - j), n);
        acc += (j % 2 ? -1 : 1) * binom * p;
        binom = binom * (k - j) / (j + 1);
      }
      for (int j = 2; j <= k; ++j) fact *= j;
      EXPECT_EQ(stirling2(n, k), acc / fact) << n << "," << k;
    }
  }
}

TEST(Stirling, RowSumsAreBellNumbers) {
  for (int n = 0; n <= 15; ++n) {
    BigInt sum = 0;
    for (const auto& v : stirling2_row(n)) sum += v;
    EXPECT_EQ(sum, bell_number(n)) << n;
  }
  EXPECT_EQ(bell_number(10), 115975);
}

TEST(Factorials, LogSpace) {
  EXPECT_DOUBLE_EQ(factorial(10), 3628800.0);
  EXPECT_NEAR(log_factorial(170), std::lgamma(171.0), 1e-9);
  EXPECT_EQ(binomial(10, 3), 120.0);
  EXPECT_NEAR(log_binomial(200, 100), std::lgamma(201.0) - 2 * std::lgamma(101.0), 1e-9);
}

TEST(GammaCoeff, ClosedForms) {
  EXPECT_EQ(gamma_coeff(0, 5.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(gamma_coeff(1, 0.3, 1.0), -0.3);
  EXPECT_DOUBLE_EQ(gamma_coeff(2, 0.0, 1.0), 0.5);
  // gamma(2) = dW^2/2 + delta/2 and gamma(3) = -(dW^3/6 + delta dW/2)
  for (double dw : {-1.2, 0.4, 2.0}) {
    for (double delta : {0.25, 1.0}) {
      EXPECT_NEAR(gamma_coeff(2, dw, delta), dw * dw / 2 + delta / 2, 1e-14);
      EXPECT_NEAR(gamma_coeff(3, dw, delta), -(dw * dw * dw / 6 + delta * dw / 2), 1e-14);
    }
  }
  EXPECT_THROW(gamma_coeff(1, 0.0, 0.0), DomainError);
}

TEST(GammaCoeff, Parity) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 50; ++trial) {
    const double dw = z(rng);
    for (int l = 0; l <= 12; ++l) {
      const double a = gamma_coeff(l, -dw, 0.7), b = gamma_coeff(l, dw, 0.7);
      EXPECT_NEAR(a, (l % 2 ? -1 : 1) * b, 1e-13 * (1 + std::abs(b)));
    }
  }
}

TEST(PoissonMgf, MatchesClosedForm) {
  EXPECT_EQ(poisson_mgf_check(0.0, 2.0, 1), 1.0);
  EXPECT_NEAR(poisson_mgf_check(0.1, 1.0, 30), std::exp(std::exp(0.1) - 1), 1e-10);
  EXPECT_NEAR(poisson_mgf_check(0.5, 2.0, 40), std::exp(2 * (std::exp(0.5) - 1)), 1e-9);
}

TEST(Hermite, IteratedSkorohodOfOne) {
  // (T-t)^{k/2}/k! h_k(z) is the k-fold iterated integral of 1 over the simplex.
  const PathContext path = PathContext::from_knots({{0.25, 0.3}, {1.0, -0.5}});
  const double t = 0.25, T = 1.0;
  const double z = (-0.5 - 0.3) / std::sqrt(T - t);
  for (int k = 0; k <= 8; ++k) {
    const double expected = std::pow(T - t, 0.5 * k) / factorial(k) * hermite(k, z);
    EXPECT_NEAR(iterated_skorohod_closed_form(Expr::constant(1.0), k, t, T, path), expected,
                1e-14);
  }
}
