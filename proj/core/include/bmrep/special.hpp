#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <vector>

namespace bmrep {

// Probabilists' Hermite polynomial h_n(x) by the three-term recurrence
// h_{n+1} = x h_n - n h_{n-1}. Works for any field type, including exact
// rationals and multiprecision floats.
template <class Real>
Real hermite(int n, const Real& x) {
  if (n < 0) throw std::domain_error("hermite degree must be nonnegative");
  Real prev(1);
  if (n == 0) return prev;
  Real cur = x;
  for (int k = 1; k < n; ++k) {
    Real next = x * cur - Real(k) * prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

double hermite(int n, double x);

using BigInt = boost::multiprecision::cpp_int;

// Stirling numbers of the second kind, exact.
BigInt stirling2(int n, int k);
// Row S(n, 0..n); rows are cached after the first request.
const std::vector<BigInt>& stirling2_row(int n);
double stirling2_double(int n, int k);
// Bell numbers by the Bell triangle, independent of the Stirling table.
BigInt bell_number(int n);

double log_factorial(int n);
double factorial(int n);
double binomial(int n, int k);
double log_binomial(int n, int k);

// gamma(m, l) of the backward Taylor expansion for increment dW over a
// step of length delta.
double gamma_coeff(int l, double dW, double delta);

// sum_{n < n_terms} sum_i z^n / n! S(n, i) lambda^i, which converges to the
// Poisson moment generating function exp(lambda (e^z - 1)).
double poisson_mgf_check(double z, double lambda, int n_terms);

}  // namespace bmrep
