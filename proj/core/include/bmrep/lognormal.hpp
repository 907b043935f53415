#pragma once

#include <optional>
#include <vector>

namespace bmrep {

// Partial sums of a (typically divergent) series together with the
// heuristic optimal truncation point.
struct SeriesReport {
  std::vector<double> terms;
  std::vector<double> partial_sums;
  // Index of the smallest nonzero |term| among indices >= 1.
  std::optional<int> smallest_term_index;
  // First index n >= 1 with |term_n| > |term_{n-1}| > 0.
  std::optional<int> divergence_onset;
};

inline constexpr int kMaxLognormalTerms = 64;

// Dyson series of E[exp(-e^{M - sigma W(T)}) | F_t] at W(t) = w_t:
//   e^{-e^x} sum_n (sigma^2 (T-t)/2)^n / n! sum_i (-1)^i S(2n, i) e^{i x},
// x = M - sigma w_t. Evaluated in 256-digit arithmetic because the inner
// Stirling sums cancel heavily.
SeriesReport lognormal_dyson_series(double M, double sigma, double t, double T, double w_t,
                                    int n_terms);

// sum_n (-1)^n / n! e^{n^2 sigma^2 T / 2}: the Taylor series of
// E[exp(-e^{-sigma W(T)})] obtained by expanding the outer exponential.
SeriesReport lognormal_taylor_series(double sigma, double T, int n_terms);

}  // namespace bmrep
