#pragma once

#include <optional>
#include <vector>

#include "bmrep/expr.hpp"
#include "bmrep/path.hpp"

namespace bmrep {

enum class QuadratureMethod { analytic, hypercube, simplex };

struct DysonOptions {
  QuadratureMethod method = QuadratureMethod::analytic;
  int nodes = 32;        // Gauss-Legendre nodes per axis and panel
  int check_nodes = 48;  // second order used for the agreement check
  double rtol = 1e-9;
};

// a_i = 1/(2^i i!) int_{[t,T]^i} (D^2_{s_i} ... D^2_{s_1} F)(omega^t) ds.
// The analytic method integrates each symbolic time out exactly right after
// its D^2 is applied; the quadrature methods build the full derivative and
// integrate it numerically.
double dyson_term(const Expr& f, int i, double t, double T, const PathContext& path,
                  const DysonOptions& options = {});

struct DysonExpansion {
  double t = 0.0;
  double T = 0.0;
  std::vector<double> terms;
  std::vector<double> partial_sums;
  std::optional<double> truncation_bound;
  int n = 0;
  // The next iterated derivative vanishes identically: the sum is exact.
  bool terminated = false;
  // Stopped because terms fell below atol.
  bool below_atol = false;
  // First index whose |a_i| exceeds |a_{i-1}| after a decrease.
  std::optional<int> divergence_onset;
  // Index of the smallest nonzero |a_i|, i >= 1.
  std::optional<int> smallest_term_index;

  double value() const { return partial_sums.empty() ? 0.0 : partial_sums.back(); }
};

DysonExpansion conditional_expectation(const Expr& f, double t, double T, const PathContext& path,
                                       int n_terms, double atol = 1e-12);

// P_u F = E[F | F_u] as a functional of the path up to u, from at most
// n_terms Dyson terms with symbolic integration.
Expr conditional_expectation_expr(const Expr& f, double u, double T, int n_terms = 40);

// (T - t)^n / (2^n n!) * sup_estimate, evaluated in log space.
double dyson_truncation_bound(double sup_estimate, int n, double t, double T);

struct ResidualReport {
  double residual = 0.0;
  double value = 0.0;       // P_s F(omega^t)
  double quotient = 0.0;    // [P_s F - P_{s-h} F](omega^t) / h
  double generator = 0.0;   // (1/2)(D_s^2 P_s F)(omega^t)
};

// |[P_s F(omega^t) - P_{s-h} F(omega^t)] / h + (1/2)(D_s^2 P_s F)(omega^t)|,
// with T the latest time argument of F.
ResidualReport time_evolution_residual(const Expr& f, double s, double t, double h,
                                       const PathContext& path, int n_terms = 40);

// Example functionals and their closed-form conditional expectations.
namespace examples {
Expr cubic(double T);
double cubic_closed(double t, double T, double w);
// f_tau(W(T), T) = (tau - T)^{-1/2} exp(-W(T)^2 / (2 (tau - T))), tau > T.
Expr heat_kernel(double tau, double T);
double heat_kernel_closed(double tau, double t, double w);
Expr merton(double T);
double merton_closed(double t, double T, double w_t, double int_w);
Expr stochastic_exponential(const Kernel& f, double T);
double stochastic_exponential_closed(const Kernel& f, double t, double T, double int_f_dw);
// exp(-e^{M - sigma W(T)})
Expr lognormal(double M, double sigma, double T);
}  // namespace examples

}  // namespace bmrep
