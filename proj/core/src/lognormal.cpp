#include "bmrep/lognormal.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>

#include "bmrep/error.hpp"
#include "bmrep/special.hpp"

namespace bmrep {

namespace {

using Real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<256>>;

void check_terms(int n_terms) {
  if (n_terms < 1 || n_terms > kMaxLognormalTerms)
    throw DomainError("series length must be in [1, " + std::to_string(kMaxLognormalTerms) + "]");
}

SeriesReport finish(const std::vector<Real>& terms) {
  SeriesReport out;
  Real sum = 0;
  for (const auto& a : terms) {
    sum += a;
    out.terms.push_back(a.convert_to<double>());
    out.partial_sums.push_back(sum.convert_to<double>());
  }
  for (std::size_t n = 1; n < terms.size(); ++n) {
    const Real mag = abs(terms[n]);
    if (mag != 0 && (!out.smallest_term_index || mag < abs(terms[*out.smallest_term_index])))
      out.smallest_term_index = static_cast<int>(n);
    const Real prev = abs(terms[n - 1]);
    if (!out.divergence_onset && prev != 0 && mag > prev) out.divergence_onset = static_cast<int>(n);
  }
  return out;
}

}  // namespace

SeriesReport lognormal_dyson_series(double M, double sigma, double t, double T, double w_t,
                                    int n_terms) {
  check_terms(n_terms);
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  if (!(T >= t) || t < 0.0) throw DomainError("lognormal series needs 0 <= t <= T");
  const Real x = Real(M) - Real(sigma) * Real(w_t);
  const Real ex = exp(x);
  const Real c = Real(sigma) * Real(sigma) * Real(T - t) / 2;
  const Real prefactor = exp(-ex);
  std::vector<Real> terms;
  Real cn = 1;  // c^n / n!
  for (int n = 0; n < n_terms; ++n) {
    if (n > 0) cn = cn * c / n;
    const auto& row = stirling2_row(2 * n);
    Real inner = 0;
    Real epow = 1;  // e^{i x}
    for (int i = 0; i <= 2 * n; ++i) {
      if (row[i] != 0) {
        const Real s(row[i]);
        inner += (i % 2 == 0) ? Real(s * epow) : Real(-s * epow);
      }
      epow *= ex;
    }
    terms.push_back(prefactor * cn * inner);
  }
  return finish(terms);
}

SeriesReport lognormal_taylor_series(double sigma, double T, int n_terms) {
  check_terms(n_terms);
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  if (!(T >= 0.0)) throw DomainError("T must be nonnegative");
  std::vector<Real> terms;
  Real fact = 1;
  const Real v = Real(sigma) * Real(sigma) * Real(T) / 2;
  for (int n = 0; n < n_terms; ++n) {
    if (n > 0) fact *= n;
    const Real a = exp(v * n * n) / fact;
    terms.push_back(n % 2 == 0 ? a : Real(-a));
  }
  return finish(terms);
}

}  // namespace bmrep
