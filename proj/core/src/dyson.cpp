#include "bmrep/dyson.hpp"

#include <cmath>
#include <string>

#include "bmrep/error.hpp"
#include "bmrep/malliavin.hpp"
#include "bmrep/quadrature.hpp"
#include "bmrep/special.hpp"

namespace bmrep {

namespace {

void check_window(double t, double T, const char* op) {
  if (!(t >= 0.0) || !(T >= t) || !std::isfinite(T))
    throw DomainError(std::string(op) + " needs 0 <= t <= T");
}

// D^2_s followed by exact integration of s over [lo, hi].
Expr integrated_second_derivative(const Expr& g, double lo, double hi) {
  const SymbolicTime s{"s", lo, hi};
  return malliavin_derivative(malliavin_derivative(g, s), s).integrate_time(s);
}

double scale_factor(int i) {
  // 1 / (2^i i!)
  return std::exp(-(i * std::log(2.0) + log_factorial(i)));
}

double quadrature_term(const Expr& f, int i, double t, double T, const PathContext& path,
                       const DysonOptions& options) {
  std::vector<SymbolicTime> times;
  for (int k = 1; k <= i; ++k) times.push_back({"s" + std::to_string(k), t, T});
  const Expr d = iterated_second_derivative(f, times).freeze(t);
  if (d.is_zero()) return 0.0;
  const auto values = d.term_values(PathEvaluator(path));

  std::vector<double> bps;
  std::vector<std::vector<std::pair<int, const TimeFactor*>>> factors(d.terms().size());
  for (std::size_t k = 0; k < d.terms().size(); ++k) {
    for (const auto& tf : d.terms()[k].times) {
      const int axis = std::stoi(tf.time.name.substr(1)) - 1;
      factors[k].emplace_back(axis, &tf);
      const auto b = tf.breakpoints();
      bps.insert(bps.end(), b.begin(), b.end());
    }
  }
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

  auto integrand = [&](std::span<const double> s) {
    double total = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
      double v = values[k];
      for (const auto& [axis, tf] : factors[k]) v *= (*tf)(s[axis]);
      total += v;
    }
    return total;
  };
  auto run = [&](int n) {
    if (options.method == QuadratureMethod::simplex)
      return quad::integrate_simplex(integrand, i, t, T, n, bps) * std::exp(log_factorial(i));
    return quad::integrate_hypercube(integrand, i, t, T, n, bps);
  };
  const double a = run(options.nodes);
  const double b = run(options.check_nodes);
  if (std::abs(a - b) > options.rtol * std::max(1.0, std::abs(b)))
    throw NumericalError("dyson", "dyson_term",
                         "quadrature orders " + std::to_string(options.nodes) + " and " +
                             std::to_string(options.check_nodes) + " disagree");
  return b * scale_factor(i);
}

}  // namespace

double dyson_term(const Expr& f, int i, double t, double T, const PathContext& path,
                  const DysonOptions& options) {
  check_window(t, T, "dyson_term");
  if (i < 0) throw DomainError("dyson_term index must be nonnegative");
  if (i == 0) return f.freeze(t).evaluate(path);
  if (2 * i > kDefaultOrderCap) throw DomainError("dyson_term index exceeds derivative cap");
  if (options.method != QuadratureMethod::analytic)
    return quadrature_term(f, i, t, T, path, options);
  Expr g = f;
  for (int k = 0; k < i && !g.is_zero(); ++k) g = integrated_second_derivative(g, t, T);
  return g.freeze(t).evaluate(path) * scale_factor(i);
}

DysonExpansion conditional_expectation(const Expr& f, double t, double T, const PathContext& path,
                                       int n_terms, double atol) {
  check_window(t, T, "conditional_expectation");
  if (n_terms < 1) throw DomainError("conditional_expectation needs n_terms >= 1");
  DysonExpansion out;
  out.t = t;
  out.T = T;
  Expr g = f;
  double sum = 0.0;
  bool decreased = false;
  for (int i = 0; i < n_terms; ++i) {
    if (i > 0) {
      if (2 * i > kDefaultOrderCap) break;
      g = integrated_second_derivative(g, t, T);
    }
    if (g.is_zero()) {
      out.terminated = true;
      break;
    }
    const double a = g.freeze(t).evaluate(path) * scale_factor(i);
    sum += a;
    out.terms.push_back(a);
    out.partial_sums.push_back(sum);
    if (i > 0) {
      const double prev = std::abs(out.terms[i - 1]);
      if (std::abs(a) < prev) decreased = true;
      if (decreased && !out.divergence_onset && prev > 0.0 && std::abs(a) > prev)
        out.divergence_onset = i;
      if (a != 0.0 && (!out.smallest_term_index ||
                       std::abs(a) < std::abs(out.terms[*out.smallest_term_index])))
        out.smallest_term_index = i;
      if (std::abs(a) < atol && prev < atol) {
        out.below_atol = true;
        break;
      }
    }
  }
  out.n = static_cast<int>(out.terms.size());
  if (out.terms.empty()) {
    out.terms.push_back(0.0);
    out.partial_sums.push_back(0.0);
    out.n = 1;
  }
  return out;
}

Expr conditional_expectation_expr(const Expr& f, double u, double T, int n_terms) {
  check_window(u, T, "conditional_expectation_expr");
  Expr g = f;
  Expr total;
  double mass0 = 0.0;
  for (int i = 0; i < n_terms && 2 * i <= kDefaultOrderCap; ++i) {
    if (i > 0) g = integrated_second_derivative(g, u, T);
    if (g.is_zero()) break;
    const Expr term = g.freeze(u).scaled(scale_factor(i));
    double mass = 0.0;
    for (const auto& t : term.terms()) mass += std::abs(t.coef);
    if (i == 0) mass0 = mass;
    total = total + term;
    if (i > 0 && mass <= 1e-18 * mass0) break;
  }
  return total;
}

double dyson_truncation_bound(double sup_estimate, int n, double t, double T) {
  if (T < t) throw DomainError("dyson_truncation_bound needs T >= t");
  if (sup_estimate < 0.0) throw DomainError("sup estimate must be nonnegative");
  if (n < 0) throw DomainError("truncation index must be nonnegative");
  if (sup_estimate == 0.0) return 0.0;
  if (n == 0) return sup_estimate;
  if (T == t) return 0.0;
  const double log_bound = n * std::log(T - t) - n * std::log(2.0) - log_factorial(n) +
                           std::log(sup_estimate);
  return std::exp(log_bound);
}

ResidualReport time_evolution_residual(const Expr& f, double s, double t, double h,
                                       const PathContext& path, int n_terms) {
  const double T = f.max_time();
  if (!(h > 0.0)) throw DomainError("time_evolution_residual needs h > 0");
  ResidualReport r;
  if (f.is_constant()) {
    r.value = f.constant_term();
    return r;
  }
  if (!(t < s) || s > T || s - h < t)
    throw DomainError("time_evolution_residual needs t <= s - h < s <= T");
  const Expr p_s = conditional_expectation_expr(f, s, T, n_terms);
  const Expr p_sh = conditional_expectation_expr(f, s - h, T, n_terms);
  r.value = p_s.freeze(t).evaluate(path);
  r.quotient = (r.value - p_sh.freeze(t).evaluate(path)) / h;
  r.generator = 0.5 * derivative_at(p_s, s, 2).freeze(t).evaluate(path);
  r.residual = std::abs(r.quotient + r.generator);
  return r;
}

namespace examples {

Expr cubic(double T) { return Expr::brownian(T).pow(3); }

double cubic_closed(double t, double T, double w) { return w * w * w + 3.0 * (T - t) * w; }

Expr heat_kernel(double tau, double T) {
  if (!(tau > T)) throw DomainError("heat kernel needs tau > T");
  const double c = tau - T;
  return Expr::exp(Expr::brownian(T).pow(2).scaled(-0.5 / c)).scaled(1.0 / std::sqrt(c));
}

double heat_kernel_closed(double tau, double t, double w) {
  const double c = tau - t;
  return std::exp(-w * w / (2.0 * c)) / std::sqrt(c);
}

Expr merton(double T) { return Expr::exp(-Expr::time_integral(0.0, T)); }

double merton_closed(double t, double T, double w_t, double int_w) {
  const double r = T - t;
  return std::exp(-int_w - w_t * r + r * r * r / 6.0);
}

Expr stochastic_exponential(const Kernel& f, double T) {
  return Expr::exp(Expr::wiener_integral(f, 0.0, T));
}

double stochastic_exponential_closed(const Kernel& f, double t, double T, double int_f_dw) {
  const DeterministicKernel k{f, t, T};
  const double sq = (PiecewiseFunction::from_kernel(k) * PiecewiseFunction::from_kernel(k)).integral();
  return std::exp(int_f_dw + 0.5 * sq);
}

Expr lognormal(double M, double sigma, double T) {
  return Expr::exp(-Expr::exp(Expr::constant(M) - Expr::brownian(T).scaled(sigma)));
}

}  // namespace examples

}  // namespace bmrep
