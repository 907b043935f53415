#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bmrep/expr.hpp"
#include "bmrep/path.hpp"

namespace bmrep {

struct BTETerm {
  int order = 0;
  double gamma = 0.0;       // gamma(m, l)
  double derivative = 0.0;  // D^l_T F evaluated on the path
};

// One backward step from T = t + delta to t.
struct BTEStep {
  double delta = 0.0;
  double t = 0.0;
  int L = 0;
  std::vector<BTETerm> terms;
  std::vector<double> partial_sums;
  // D^{L+1}_T F vanishes identically, so the truncation is exact.
  bool exact = false;

  double value() const { return partial_sums.empty() ? 0.0 : partial_sums.back(); }
};

// E[F | F_t] = sum_{l <= L} gamma(l) D^l_{t+delta} F for F depending on
// W(u) with u <= t or u = t + delta only.
BTEStep bte_expand(const Expr& f, double t, double delta, int L, const PathContext& path);

// Grid form: t = m delta.
double bte_one_step(const Expr& f, int m, double delta, int L, const PathContext& path);

// Nested expansion from M delta back to m delta with order L per step.
// Derivatives are taken latest time first and memoized per (expression,
// step); the number of nonzero nested terms is capped.
double bte_multi_step(const Expr& f, int m, int M, double delta, int L, const PathContext& path,
                      std::uint64_t term_cap = 1'000'000);

// sum_{i<=l} D_T^i F (-1)^i (T-t)^{(l+i)/2} / (i! (l-i)!) h_{l-i}(z),
// z = (W(T) - W(t)) / sqrt(T - t): the l-fold iterated Skorohod integral of
// F over the ordered simplex of [t, T].
double iterated_skorohod_closed_form(const Expr& f, int l, double t, double T,
                                     const PathContext& path);

// The same expectation as bte_expand written as the double sum over
// (l, i), truncated at total derivative order l + i <= L.
double bte_double_sum(const Expr& f, double t, double T, int L, const PathContext& path);

struct TruncationReport {
  int L = 0;
  double bound = 0.0;
  std::vector<double> norms;
  bool below_tolerance = false;
  // Norms nonincreasing in derivative order (norms[i] >= norms[i-1]
  // since norms[i] belongs to order 2L - i).
  bool monotone = false;
};

// sum_i norms[i]^2 C(L, i)^4 i! / (L!)^2 delta^{2L-i} with
// norms[i] = ||D_T^{2L-i} F||, evaluated in log space.
TruncationReport remainder_bound(std::span<const double> norms, int L, double delta,
                                 double tolerance = 1e-8);

// Monte Carlo estimates of ||D_T^k F||_2 for k = 0..max_order.
std::vector<double> estimate_terminal_derivative_norms(const Expr& f, double T, int max_order,
                                                       std::uint64_t samples, std::uint64_t seed);

}  // namespace bmrep
