#include "bmrep/special.hpp"

#include <cmath>
#include <mutex>

#include "bmrep/error.hpp"

namespace bmrep {

namespace {

constexpr int kMaxStirlingRow = 4096;

struct StirlingTable {
  std::mutex mutex;
  std::vector<std::vector<BigInt>> rows{{BigInt(1)}};
};

StirlingTable& stirling_table() {
  static StirlingTable table;
  return table;
}

}  // namespace

double hermite(int n, double x) {
  if (n < 0) throw DomainError("hermite degree must be nonnegative");
  return hermite<double>(n, x);
}

const std::vector<BigInt>& stirling2_row(int n) {
  if (n < 0) throw DomainError("stirling2 needs n >= 0");
  if (n > kMaxStirlingRow) throw DomainError("stirling2 row beyond table limit");
  auto& table = stirling_table();
  std::lock_guard lock(table.mutex);
  // rows never shrink and are never reallocated element-wise after creation
  table.rows.reserve(kMaxStirlingRow + 1);
  while (static_cast<int>(table.rows.size()) <= n) {
    const auto& prev = table.rows.back();
    const int m = static_cast<int>(prev.size());  // new row index
    std::vector<BigInt> row(m + 1, BigInt(0));
    for (int k = 1; k <= m; ++k) {
      BigInt v = prev[k - 1];
      if (k < m) v += BigInt(k) * prev[k];
      row[k] = std::move(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table.rows[n];
}

BigInt stirling2(int n, int k) {
  if (n < 0 || k < 0) throw DomainError("stirling2 arguments must be nonnegative");
  if (k > n) throw DomainError("stirling2 needs k <= n");
  return stirling2_row(n)[k];
}

double stirling2_double(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return stirling2_row(n)[k].convert_to<double>();
}

BigInt bell_number(int n) {
  if (n < 0) throw DomainError("bell_number needs n >= 0");
  std::vector<BigInt> row{BigInt(1)};
  for (int i = 0; i < n; ++i) {
    std::vector<BigInt> next{row.back()};
    for (const auto& v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

double log_factorial(int n) {
  if (n < 0) throw DomainError("factorial of a negative integer");
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double factorial(int n) {
  if (n < 0) throw DomainError("factorial of a negative integer");
  double v = 1.0;
  for (int k = 2; k <= n; ++k) v *= k;
  return v;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double v = 1.0;
  for (int j = 1; j <= k; ++j) v = v * (n - k + j) / j;
  return n <= 60 ? std::round(v) : v;
}

double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -INFINITY;
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double gamma_coeff(int l, double dW, double delta) {
  if (l < 0) throw DomainError("gamma_coeff order must be nonnegative");
  if (!(delta > 0.0)) throw DomainError("gamma_coeff step must be positive");
  if (l == 0) return 1.0;
  const double z = dW / std::sqrt(delta);
  double sum = 0.0;
  for (int j = 0; 2 * j <= l; ++j)
    sum += hermite(l - 2 * j, z) / (factorial(j) * factorial(l - 2 * j));
  const double sign = (l % 2 == 0) ? 1.0 : -1.0;
  return sign * std::pow(delta, 0.5 * l) * sum;
}

double poisson_mgf_check(double z, double lambda, int n_terms) {
  if (n_terms < 1) throw DomainError("poisson_mgf_check needs at least one term");
  double total = 0.0;
  double zpow = 1.0;  // z^n / n!
  for (int n = 0; n < n_terms; ++n) {
    if (n > 0) zpow *= z / n;
    const auto& row = stirling2_row(n);
    double inner = 0.0;
    double lpow = 1.0;
    for (int i = 0; i <= n; ++i) {
      inner += row[i].convert_to<double>() * lpow;
      lpow *= lambda;
    }
    total += zpow * inner;
  }
  return total;
}

}  // namespace bmrep
