#include "bmrep/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "bmrep/error.hpp"
#include "bmrep/format.hpp"
#include "bmrep/quadrature.hpp"

namespace bmrep {

namespace poly {

double eval(const std::vector<double>& c, double s) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + *it;
  return acc;
}

std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

std::vector<double> derivative(const std::vector<double>& c) {
  if (c.size() <= 1) return {};
  std::vector<double> out(c.size() - 1);
  for (std::size_t k = 1; k < c.size(); ++k) out[k - 1] = static_cast<double>(k) * c[k];
  return out;
}

namespace {

// Coefficients of p(x + shift) in powers of x (Taylor shift by Horner).
std::vector<double> shifted(std::vector<double> c, double shift) {
  const std::size_t n = c.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = n - 1; j > i; --j) c[j - 1] += shift * c[j];
  return c;
}

}  // namespace

double integrate_exp(double rate, const std::vector<double>& c, double lo, double hi) {
  if (!(hi > lo) || c.empty()) return 0.0;
  const double len = hi - lo;
  const std::vector<double> q = shifted(c, lo);
  if (rate == 0.0) {
    double acc = 0.0;
    for (std::size_t k = q.size(); k-- > 0;) acc = acc * len + q[k] / static_cast<double>(k + 1);
    return acc * len;
  }
  const double scale = std::exp(rate * lo);
  if (std::abs(rate) * len >= 0.5) {
    // antiderivative exp(r x) * sum_k (-1)^k q^(k)(x) / r^(k+1)
    auto anti = [&](double x) {
      double acc = 0.0;
      std::vector<double> d = q;
      double sign = 1.0;
      double rpow = rate;
      while (!d.empty()) {
        acc += sign * eval(d, x) / rpow;
        d = derivative(d);
        sign = -sign;
        rpow *= rate;
      }
      return std::exp(rate * x) * acc;
    };
    return scale * (anti(len) - anti(0.0));
  }
  const int n = static_cast<int>(q.size()) / 2 + 14;
  const auto& rule = quad::gauss_legendre(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = 0.5 * len * (rule.nodes[i] + 1.0);
    acc += rule.weights[i] * std::exp(rate * x) * eval(q, x);
  }
  return scale * 0.5 * len * acc;
}

}  // namespace poly

Kernel::Kernel(Family family, double anchor, double rate, std::vector<double> coeffs)
    : family_(family), anchor_(anchor), rate_(rate), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  for (double c : coeffs_)
    if (!std::isfinite(c)) throw DomainError("kernel coefficients must be finite");
  if (!std::isfinite(anchor_) || !std::isfinite(rate_))
    throw DomainError("kernel parameters must be finite");
  if (family_ == Family::reverse_polynomial) {
    // sum_k c_k (A - s)^k expanded in powers of s
    monomial_.assign(coeffs_.size(), 0.0);
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      double binom = 1.0;
      for (std::size_t j = 0; j <= k; ++j) {
        const double term = binom * std::pow(anchor_, static_cast<double>(k - j)) *
                            ((j % 2 == 0) ? 1.0 : -1.0);
        monomial_[j] += coeffs_[k] * term;
        binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
      }
    }
  } else {
    monomial_ = coeffs_;
  }
}

Kernel Kernel::polynomial(std::vector<double> coeffs) {
  return Kernel(Family::polynomial, 0.0, 0.0, std::move(coeffs));
}

Kernel Kernel::reverse_polynomial(double anchor, std::vector<double> coeffs) {
  return Kernel(Family::reverse_polynomial, anchor, 0.0, std::move(coeffs));
}

Kernel Kernel::exp_polynomial(double rate, std::vector<double> coeffs) {
  return Kernel(Family::exp_polynomial, 0.0, rate, std::move(coeffs));
}

double Kernel::operator()(double s) const {
  if (family_ == Family::reverse_polynomial) return poly::eval(coeffs_, anchor_ - s);
  const double p = poly::eval(monomial_, s);
  return rate_ == 0.0 ? p : std::exp(rate_ * s) * p;
}

bool Kernel::is_zero() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0.0; });
}

std::string Kernel::text() const {
  std::string out;
  switch (family_) {
    case Family::polynomial: out = "poly"; break;
    case Family::reverse_polynomial: out = "revpoly(" + format_number(anchor_) + ")"; break;
    case Family::exp_polynomial: out = "exppoly(" + format_number(rate_) + ")"; break;
  }
  out += '[';
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (k) out += ',';
    out += format_number(coeffs_[k]);
  }
  out += ']';
  return out;
}

double DeterministicKernel::integral() const {
  return poly::integrate_exp(function.rate(), function.monomial(), lo, hi);
}

double DeterministicKernel::cumulative(double s) const {
  const double upper = std::clamp(s, lo, hi);
  return poly::integrate_exp(function.rate(), function.monomial(), lo, upper);
}

std::string DeterministicKernel::text() const {
  return function.text() + "," + format_number(lo) + "," + format_number(hi);
}

PiecewiseFunction PiecewiseFunction::constant(double value, double lo, double hi) {
  PiecewiseFunction f;
  if (hi > lo && value != 0.0) f.pieces_.push_back({lo, hi, 0.0, {value}});
  return f;
}

PiecewiseFunction PiecewiseFunction::from_kernel(const DeterministicKernel& k) {
  PiecewiseFunction f;
  if (k.hi > k.lo && !k.function.is_zero())
    f.pieces_.push_back({k.lo, k.hi, k.function.rate(), k.function.monomial()});
  return f;
}

PiecewiseFunction PiecewiseFunction::ramp(double a, double b, double lo, double hi) {
  PiecewiseFunction f;
  // constant b - a on s < a, linear b - s on [a, b], zero past b
  const double flat_hi = std::min(a, hi);
  if (flat_hi > lo && b > a) f.pieces_.push_back({lo, flat_hi, 0.0, {b - a}});
  const double lin_lo = std::max(a, lo);
  const double lin_hi = std::min(b, hi);
  if (lin_hi > lin_lo) f.pieces_.push_back({lin_lo, lin_hi, 0.0, {b, -1.0}});
  return f;
}

double PiecewiseFunction::operator()(double s) const {
  for (const auto& p : pieces_) {
    if (s >= p.lo && s <= p.hi) {
      const double v = poly::eval(p.coeffs, s);
      return p.rate == 0.0 ? v : std::exp(p.rate * s) * v;
    }
  }
  return 0.0;
}

double PiecewiseFunction::integral() const {
  double total = 0.0;
  for (const auto& p : pieces_) total += poly::integrate_exp(p.rate, p.coeffs, p.lo, p.hi);
  return total;
}

PiecewiseFunction PiecewiseFunction::operator*(const PiecewiseFunction& other) const {
  PiecewiseFunction out;
  for (const auto& a : pieces_) {
    for (const auto& b : other.pieces_) {
      const double lo = std::max(a.lo, b.lo);
      const double hi = std::min(a.hi, b.hi);
      if (hi > lo) out.pieces_.push_back({lo, hi, a.rate + b.rate, poly::multiply(a.coeffs, b.coeffs)});
    }
  }
  std::sort(out.pieces_.begin(), out.pieces_.end(),
            [](const Piece& x, const Piece& y) { return x.lo < y.lo; });
  return out;
}

std::vector<double> PiecewiseFunction::breakpoints() const {
  std::vector<double> out;
  for (const auto& p : pieces_) {
    out.push_back(p.lo);
    out.push_back(p.hi);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace bmrep
