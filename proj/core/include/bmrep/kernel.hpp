#pragma once

#include <string>
#include <vector>

namespace bmrep {

// Deterministic integrand f(s) from one of three closed-form families:
//   polynomial          sum_k c_k s^k
//   reverse_polynomial  sum_k c_k (anchor - s)^k
//   exp_polynomial      exp(rate s) sum_k c_k s^k
// Every family is stored internally as exp(rate s) * p(s) with p in the
// monomial basis, which is what products and exact integration work on.
class Kernel {
 public:
  enum class Family { polynomial, reverse_polynomial, exp_polynomial };

  Kernel() : Kernel(polynomial({1.0})) {}

  static Kernel polynomial(std::vector<double> coeffs);
  static Kernel reverse_polynomial(double anchor, std::vector<double> coeffs);
  static Kernel exp_polynomial(double rate, std::vector<double> coeffs);

  double operator()(double s) const;

  Family family() const noexcept { return family_; }
  double anchor() const noexcept { return anchor_; }
  double rate() const noexcept { return rate_; }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  const std::vector<double>& monomial() const noexcept { return monomial_; }
  bool is_zero() const noexcept;

  // Canonical text, e.g. "poly[1,0.5]", "revpoly(1)[0,1]", "exppoly(2)[1]".
  std::string text() const;

  friend bool operator==(const Kernel& a, const Kernel& b) {
    return a.text() == b.text();
  }

 private:
  Kernel(Family family, double anchor, double rate, std::vector<double> coeffs);

  Family family_;
  double anchor_ = 0.0;
  double rate_ = 0.0;
  std::vector<double> coeffs_;
  std::vector<double> monomial_;
};

// A kernel restricted to its support [lo, hi] (zero outside).
struct DeterministicKernel {
  Kernel function;
  double lo = 0.0;
  double hi = 0.0;

  double operator()(double s) const { return (s < lo || s > hi) ? 0.0 : function(s); }
  double integral() const;
  // Integral of the kernel from lo to min(max(s, lo), hi).
  double cumulative(double s) const;
  std::string text() const;
};

// Coefficient-vector helpers (monomial basis, low order first).
namespace poly {
double eval(const std::vector<double>& c, double s);
std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b);
std::vector<double> derivative(const std::vector<double>& c);
// Integral of exp(rate s) p(s) over [lo, hi], exact up to rounding.
double integrate_exp(double rate, const std::vector<double>& c, double lo, double hi);
}  // namespace poly

// Piecewise exp-polynomial function of a single time variable, zero outside
// its pieces. Products and integrals are closed and exact on this class,
// which makes it the integration target for deterministic factors of
// Malliavin derivatives.
class PiecewiseFunction {
 public:
  struct Piece {
    double lo;
    double hi;
    double rate;
    std::vector<double> coeffs;
  };

  PiecewiseFunction() = default;

  static PiecewiseFunction constant(double value, double lo, double hi);
  static PiecewiseFunction from_kernel(const DeterministicKernel& k);
  // (b - max(s, a))^+ on [lo, hi].
  static PiecewiseFunction ramp(double a, double b, double lo, double hi);

  const std::vector<Piece>& pieces() const noexcept { return pieces_; }
  bool empty() const noexcept { return pieces_.empty(); }

  double operator()(double s) const;
  double integral() const;
  PiecewiseFunction operator*(const PiecewiseFunction& other) const;
  // Piece boundaries, sorted and deduplicated.
  std::vector<double> breakpoints() const;

 private:
  std::vector<Piece> pieces_;
};

}  // namespace bmrep
