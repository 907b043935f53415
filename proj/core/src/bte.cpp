#include "bmrep/bte.hpp"

#include <cmath>
#include <map>
#include <string>

#include "bmrep/error.hpp"
#include "bmrep/format.hpp"
#include "bmrep/malliavin.hpp"
#include "bmrep/mc.hpp"
#include "bmrep/special.hpp"

namespace bmrep {

namespace {

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

// F may depend on W(u) only for u <= t or u on the step grid.
void check_grid(const Expr& f, double t, double delta, int steps, const char* op) {
  if (!f.is_cylindrical())
    throw ClosureError(std::string(op) + " needs a cylindrical functional");
  for (double u : f.time_arguments()) {
    if (u <= t || same_time(u, t)) continue;
    const double k = (u - t) / delta;
    const double r = std::round(k);
    if (r < 1 || r > steps || !same_time(t + r * delta, u))
      throw DomainError(std::string(op) + ": time " + format_number(u) +
                        " is not on the step grid after " + format_number(t));
  }
}

}  // namespace

BTEStep bte_expand(const Expr& f, double t, double delta, int L, const PathContext& path) {
  if (!(delta > 0.0)) throw DomainError("bte step must be positive");
  if (L < 0) throw DomainError("bte order must be nonnegative");
  if (t < 0.0) throw DomainError("bte base time must be nonnegative");
  check_grid(f, t, delta, 1, "bte_one_step");
  const double T = t + delta;
  const double dW = path.brownian(T) - path.brownian(t);
  BTEStep step;
  step.delta = delta;
  step.t = t;
  step.L = L;
  Expr d = f;
  double sum = 0.0;
  for (int l = 0; l <= L; ++l) {
    if (l > 0 && !d.is_zero()) d = derivative_at(d, T, 1);
    BTETerm term;
    term.order = l;
    term.gamma = gamma_coeff(l, dW, delta);
    term.derivative = d.is_zero() ? 0.0 : d.evaluate(path);
    sum += term.gamma * term.derivative;
    step.terms.push_back(term);
    step.partial_sums.push_back(sum);
  }
  step.exact = d.is_zero() || derivative_at(d, T, 1).is_zero();
  return step;
}

double bte_one_step(const Expr& f, int m, double delta, int L, const PathContext& path) {
  if (m < 0) throw DomainError("bte step index must be nonnegative");
  return bte_expand(f, m * delta, delta, L, path).value();
}

double bte_multi_step(const Expr& f, int m, int M, double delta, int L, const PathContext& path,
                      std::uint64_t term_cap) {
  if (!(delta > 0.0)) throw DomainError("bte step must be positive");
  if (m < 0 || M < m) throw DomainError("bte_multi_step needs 0 <= m <= M");
  if (L < 0) throw DomainError("bte order must be nonnegative");
  check_grid(f, m * delta, delta, M - m, "bte_multi_step");

  std::vector<double> dW(M + 1, 0.0);
  for (int k = m + 1; k <= M; ++k) dW[k] = path.brownian(k * delta) - path.brownian((k - 1) * delta);

  // memo[(k, key)] = R_k(E) = sum_j gamma(k-1, j) R_{k-1}(D^j_{k delta} E), R_m(E) = E(path)
  std::map<std::pair<int, std::string>, double> memo;
  std::uint64_t visited = 0;

  auto recurse = [&](auto&& self, const Expr& e, int k) -> double {
    if (++visited > term_cap)
      throw NumericalError("bte", "bte_multi_step",
                           "nested term count exceeds cap " + std::to_string(term_cap));
    if (k == m) return e.evaluate(path);
    const auto key = std::make_pair(k, e.text());
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    double total = 0.0;
    Expr d = e;
    for (int j = 0; j <= L; ++j) {
      if (j > 0) d = derivative_at(d, k * delta, 1);
      if (d.is_zero()) break;
      total += gamma_coeff(j, dW[k], delta) * self(self, d, k - 1);
    }
    memo.emplace(key, total);
    return total;
  };
  if (f.is_zero()) return 0.0;
  return recurse(recurse, f, M);
}

double iterated_skorohod_closed_form(const Expr& f, int l, double t, double T,
                                     const PathContext& path) {
  if (!(T > t)) throw DomainError("iterated Skorohod integral needs T > t");
  if (l < 0) throw DomainError("iterated Skorohod order must be nonnegative");
  if (!f.is_cylindrical()) throw ClosureError("iterated Skorohod form needs a cylindrical functional");
  const double len = T - t;
  const double z = (path.brownian(T) - path.brownian(t)) / std::sqrt(len);
  double total = 0.0;
  Expr d = f;
  for (int i = 0; i <= l; ++i) {
    if (i > 0) d = derivative_at_terminal(d, 1, T);
    if (d.is_zero()) break;
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    total += d.evaluate(path) * sign * std::pow(len, 0.5 * (l + i)) /
             (factorial(i) * factorial(l - i)) * hermite(l - i, z);
  }
  return total;
}

double bte_double_sum(const Expr& f, double t, double T, int L, const PathContext& path) {
  if (!(T > t)) throw DomainError("bte_double_sum needs T > t");
  check_grid(f, t, T - t, 1, "bte_double_sum");
  const double len = T - t;
  const double z = (path.brownian(T) - path.brownian(t)) / std::sqrt(len);
  std::vector<double> derivs;
  Expr d = f;
  for (int k = 0; k <= L; ++k) {
    if (k > 0) d = derivative_at(d, T, 1);
    derivs.push_back(d.is_zero() ? 0.0 : d.evaluate(path));
  }
  double total = 0.0;
  for (int l = 0; l <= L; ++l) {
    for (int i = 0; i <= l && l + i <= L; ++i) {
      const double sign = ((i + l) % 2 == 0) ? 1.0 : -1.0;
      total += sign * std::pow(len, 0.5 * (l + i)) / (factorial(i) * factorial(l - i)) *
               hermite(l - i, z) * derivs[l + i];
    }
  }
  return total;
}

TruncationReport remainder_bound(std::span<const double> norms, int L, double delta,
                                 double tolerance) {
  if (L < 0) throw DomainError("remainder_bound needs L >= 0");
  if (!(delta > 0.0)) throw DomainError("remainder_bound needs delta > 0");
  if (norms.size() != static_cast<std::size_t>(L) + 1)
    throw DomainError("remainder_bound needs L + 1 norms");
  TruncationReport r;
  r.L = L;
  r.norms.assign(norms.begin(), norms.end());
  double total = 0.0;
  for (int i = 0; i <= L; ++i) {
    const double n = norms[i];
    if (!(n >= 0.0)) throw DomainError("derivative norms must be nonnegative");
    if (n == 0.0) continue;
    const double log_term = 2.0 * std::log(n) + 4.0 * log_binomial(L, i) + log_factorial(i) -
                            2.0 * log_factorial(L) + (2.0 * L - i) * std::log(delta);
    total += std::exp(log_term);
  }
  r.bound = total;
  r.below_tolerance = total < tolerance;
  r.monotone = true;
  for (int i = 1; i <= L; ++i)
    if (norms[i] < norms[i - 1]) r.monotone = false;
  return r;
}

std::vector<double> estimate_terminal_derivative_norms(const Expr& f, double T, int max_order,
                                                       std::uint64_t samples, std::uint64_t seed) {
  if (max_order < 0) throw DomainError("max_order must be nonnegative");
  std::vector<double> out;
  Expr d = f;
  TimeGrid grid;
  grid.times = {0.0, T};
  for (int k = 0; k <= max_order; ++k) {
    if (k > 0) d = derivative_at_terminal(d, 1, T);
    if (d.is_zero()) {
      out.push_back(0.0);
      continue;
    }
    const auto est = estimate_expectation(d * d, grid, samples, seed);
    out.push_back(std::sqrt(std::max(0.0, est.mean)));
  }
  return out;
}

}  // namespace bmrep
