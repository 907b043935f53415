#include "bmrep/malliavin.hpp"

#include <algorithm>
#include <cmath>

#include "bmrep/error.hpp"
#include "bmrep/format.hpp"

namespace bmrep {

namespace {

Expr derive(const Expr& f, const SymbolicTime& s);

Expr derive_atom(const Atom& a, const SymbolicTime& s) {
  TimeFactor tf;
  tf.time = s;
  switch (a.kind()) {
    case AtomKind::brownian:
      tf.chi = a.time();
      return Expr::from_factor(tf);
    case AtomKind::wiener_integral:
      tf.kernels.emplace_back(a.kernel(), 1);
      return Expr::from_factor(tf);
    case AtomKind::time_integral:
      tf.ramps.emplace_back(Ramp{a.lo(), a.hi()}, 1);
      return Expr::from_factor(tf);
    case AtomKind::smooth: {
      Expr inner = derive(a.argument(), s);
      if (inner.is_zero()) return inner;
      return Expr::apply(a.function_name(), a.argument(), a.order() + 1) * inner;
    }
  }
  throw ClosureError("node outside the differentiable closure: " + a.key());
}

Expr derive(const Expr& f, const SymbolicTime& s) {
  Expr out;
  for (const auto& term : f.terms()) {
    for (std::size_t k = 0; k < term.atoms.size(); ++k) {
      Expr da = derive_atom(term.atoms[k].first, s);
      if (da.is_zero()) continue;
      Term rest = term;
      const int p = rest.atoms[k].second;
      rest.coef *= p;
      if (p == 1)
        rest.atoms.erase(rest.atoms.begin() + static_cast<std::ptrdiff_t>(k));
      else
        rest.atoms[k].second = p - 1;
      out = out + Expr::from_term(std::move(rest)) * da;
    }
    if (term.exponent) {
      Expr de = derive(*term.exponent, s);
      if (!de.is_zero()) out = out + Expr::from_term(term) * de;
    }
  }
  return out;
}

void check_time(const SymbolicTime& s) {
  if (!(s.lo <= s.hi) || !std::isfinite(s.lo) || !std::isfinite(s.hi))
    throw DomainError("symbolic time '" + s.name + "' needs a finite interval lo <= hi");
  if (s.name.empty()) throw DomainError("symbolic time needs a name");
}

}  // namespace

Expr malliavin_derivative(const Expr& f, const SymbolicTime& s) {
  check_time(s);
  return derive(f, s);
}

Expr iterated_second_derivative(const Expr& f, const std::vector<SymbolicTime>& times,
                                int order_cap) {
  if (times.empty()) throw DomainError("iterated derivative needs at least one time");
  if (2 * static_cast<long>(times.size()) > order_cap)
    throw DomainError("derivative order " + std::to_string(2 * times.size()) + " exceeds cap " +
                      std::to_string(order_cap));
  for (std::size_t i = 0; i < times.size(); ++i) {
    check_time(times[i]);
    for (std::size_t j = 0; j < i; ++j)
      if (times[i].name == times[j].name)
        throw DomainError("symbolic time '" + times[i].name + "' repeated");
  }
  Expr g = f;
  for (const auto& s : times) {
    g = derive(derive(g, s), s);
    if (g.is_zero()) break;
  }
  return g;
}

Expr derivative_at(const Expr& f, double s, int order, int order_cap) {
  if (order < 0) throw DomainError("derivative order must be nonnegative");
  if (order > order_cap)
    throw DomainError("derivative order " + std::to_string(order) + " exceeds cap " +
                      std::to_string(order_cap));
  const SymbolicTime pinned{"s", s, s};
  Expr g = f;
  for (int i = 0; i < order && !g.is_zero(); ++i) g = derive(g, pinned);
  return g;
}

Expr derivative_at_terminal(const Expr& f, int order, double terminal, int order_cap) {
  if (!f.is_cylindrical())
    throw ClosureError("terminal derivative needs a cylindrical functional");
  const double latest = f.max_time();
  if (latest > terminal * (1.0 + 1e-12) + 1e-15)
    throw DomainError("functional depends on time " + format_number(latest) + " beyond " +
                      format_number(terminal));
  return derivative_at(f, terminal, order, order_cap);
}

double derivative_pairing(const Expr& f, const DeterministicKernel& h, const PathContext& path) {
  const double hi = std::max({f.max_time(), h.hi, 0.0});
  const SymbolicTime s{"s", 0.0, hi};
  const Expr d = derive(f, s);
  const auto values = d.term_values(PathEvaluator(path));
  const auto hf = PiecewiseFunction::from_kernel(h);
  double total = 0.0;
  for (std::size_t i = 0; i < d.terms().size(); ++i) {
    const auto& term = d.terms()[i];
    double weight = 0.0;
    if (term.times.empty())
      weight = (PiecewiseFunction::constant(1.0, 0.0, hi) * hf).integral();
    else
      weight = (term.times.front().function() * hf).integral();
    total += values[i] * weight;
  }
  return total;
}

}  // namespace bmrep
