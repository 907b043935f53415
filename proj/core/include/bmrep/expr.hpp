#pragma once

#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "bmrep/kernel.hpp"
#include "bmrep/path.hpp"

namespace bmrep {

class Expr;

// Integration variable of a derivative, assumed to range over [lo, hi].
// lo == hi pins the variable to a concrete time.
struct SymbolicTime {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
};

enum class AtomKind { brownian, wiener_integral, time_integral, smooth };

// Whitelisted smooth scalar function with derivatives of every order.
struct SmoothFunction {
  std::string name;
  std::function<double(int order, double x)> derivative;
};

const SmoothFunction& smooth_function(const std::string& name);
std::vector<std::string> smooth_function_names();

// Leaf of a product term: a path primitive or a derivative of a smooth
// function applied to an expression.
class Atom {
 public:
  static Atom brownian(double u);
  static Atom wiener_integral(const DeterministicKernel& f);
  static Atom time_integral(double a, double b);
  static Atom smooth(const std::string& name, int order, const Expr& argument);

  AtomKind kind() const noexcept;
  double time() const noexcept;
  const DeterministicKernel& kernel() const noexcept;
  double lo() const noexcept;
  double hi() const noexcept;
  const std::string& function_name() const noexcept;
  int order() const noexcept;
  const Expr& argument() const noexcept;
  const std::string& key() const noexcept;

 private:
  struct Data;
  explicit Atom(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Data> d_;
};

// Ramp factor (b - max(s, a))^+.
struct Ramp {
  double a;
  double b;
};

// Deterministic factor in one symbolic time s:
//   1{s <= chi} * prod f_k(s)^p_k * prod ramp_k(s)^q_k.
struct TimeFactor {
  SymbolicTime time;
  double chi = std::numeric_limits<double>::infinity();
  std::vector<std::pair<DeterministicKernel, int>> kernels;
  std::vector<std::pair<Ramp, int>> ramps;

  double operator()(double s) const;
  // The factor as a function on [time.lo, time.hi].
  PiecewiseFunction function() const;
  double integral() const { return function().integral(); }
  std::vector<double> breakpoints() const;
  std::string text() const;
};

struct Term {
  double coef = 0.0;
  std::vector<std::pair<Atom, int>> atoms;  // sorted by key, powers >= 1
  std::shared_ptr<const Expr> exponent;     // exp(exponent) factor, no constant part
  std::vector<TimeFactor> times;            // sorted by name
  std::string key;                          // canonical text without coef
};

// Values of path primitives, supplied by a path or by a Monte Carlo batch.
class AtomEvaluator {
 public:
  virtual ~AtomEvaluator() = default;
  virtual double value(const Atom& atom) const = 0;
};

class PathEvaluator final : public AtomEvaluator {
 public:
  explicit PathEvaluator(const PathContext& path) : path_(path) {}
  double value(const Atom& atom) const override;

 private:
  const PathContext& path_;
};

using TimeAssignment = std::map<std::string, double>;

// Wiener functional in canonical sum-of-products form. Terms are sorted by
// key with like terms merged; a coefficient sum that cancels to rounding
// level of its addends is dropped. Each term carries at most one exp
// factor whose argument has no constant part. Values are immutable.
class Expr {
 public:
  Expr() = default;

  static Expr constant(double c);
  static Expr brownian(double u);
  static Expr wiener_integral(const Kernel& f, double a, double b);
  static Expr time_integral(double a, double b);
  static Expr exp(const Expr& argument);
  static Expr apply(const std::string& name, const Expr& argument, int order = 0);
  static Expr from_atom(const Atom& atom);
  static Expr from_factor(const TimeFactor& factor);
  static Expr from_term(Term term);

  const std::vector<Term>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const noexcept;
  double constant_term() const noexcept;
  bool has_time_factors() const noexcept;

  std::string text() const;

  Expr operator-() const;
  Expr scaled(double c) const;
  Expr pow(int n) const;
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend bool operator==(const Expr& a, const Expr& b);

  double evaluate(const AtomEvaluator& atoms, const TimeAssignment* times = nullptr) const;
  double evaluate(const PathContext& path, const TimeAssignment* times = nullptr) const;
  // Value of the path-dependent part of each term (time factors omitted).
  std::vector<double> term_values(const AtomEvaluator& atoms) const;

  // Image under the frozen-path operator omega^t.
  Expr freeze(double t) const;
  // Integral over the symbolic time's interval; terms without a factor in
  // that time pick up the interval length.
  Expr integrate_time(const SymbolicTime& s) const;
  // Substitute a concrete value for a symbolic time.
  Expr pin_time(const std::string& name, double value) const;

  // Every time argument appearing in the functional, sorted and unique.
  std::vector<double> time_arguments() const;
  double max_time() const;
  // True when every primitive is a point value W(u).
  bool is_cylindrical() const;
  // Distinct path primitives, including those inside exp and smooth arguments.
  std::vector<Atom> path_atoms() const;

 private:
  static Expr from_terms(std::vector<Term> terms);
  std::vector<Term> terms_;
};


// Central difference [F(W + eps H) - F(W - eps H)] / (2 eps) with
// H(u) = int_0^u h, approximating int D_s F h(s) ds.
double directional_derivative_oracle(const Expr& f, const DeterministicKernel& h,
                                     const PathContext& path, double eps);

}  // namespace bmrep
