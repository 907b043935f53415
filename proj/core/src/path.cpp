#include "bmrep/path.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bmrep/error.hpp"
#include "bmrep/format.hpp"

namespace bmrep {

namespace {

// Snap times within rounding distance of the grid end onto it.
double covered(std::span<const double> grid, double u) {
  const double end = grid.back();
  const double slack = 1e-12 * std::max(1.0, std::abs(end));
  if (u < -slack || u > end + slack)
    throw DomainError("time " + format_number(u) + " outside path coverage [0, " +
                      format_number(end) + "]");
  return std::clamp(u, 0.0, end);
}

std::size_t segment(std::span<const double> grid, double u) {
  auto it = std::upper_bound(grid.begin(), grid.end(), u);
  std::size_t j = static_cast<std::size_t>(it - grid.begin());
  if (j == 0) return 0;
  j -= 1;
  return std::min(j, grid.size() - 2);
}

void add(LinearForm& f, std::size_t j, double w) {
  if (w == 0.0) return;
  for (auto& [k, v] : f.weights) {
    if (k == j) {
      v += w;
      return;
    }
  }
  f.weights.emplace_back(j, w);
}

}  // namespace

namespace forms {

LinearForm brownian(std::span<const double> grid, double u) {
  u = covered(grid, u);
  LinearForm f;
  if (grid.size() == 1) return f;
  const std::size_t j = segment(grid, u);
  const double lam = (u - grid[j]) / (grid[j + 1] - grid[j]);
  add(f, j, 1.0 - lam);
  add(f, j + 1, lam);
  return f;
}

LinearForm wiener_integral(std::span<const double> grid, const DeterministicKernel& k) {
  LinearForm f;
  if (!(k.hi > k.lo)) return f;
  covered(grid, k.lo);
  covered(grid, k.hi);
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    const double p = std::max(grid[j], k.lo);
    const double q = std::min(grid[j + 1], k.hi);
    if (!(q > p)) continue;
    const double c = poly::integrate_exp(k.function.rate(), k.function.monomial(), p, q) /
                     (grid[j + 1] - grid[j]);
    add(f, j, -c);
    add(f, j + 1, c);
  }
  return f;
}

LinearForm time_integral(std::span<const double> grid, double a, double b) {
  LinearForm f;
  if (!(b > a)) return f;
  covered(grid, a);
  covered(grid, b);
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    const double p = std::max(grid[j], a);
    const double q = std::min(grid[j + 1], b);
    if (!(q > p)) continue;
    const double len = grid[j + 1] - grid[j];
    const double lp = (p - grid[j]) / len;
    const double lq = (q - grid[j]) / len;
    const double half = 0.5 * (q - p);
    add(f, j, half * ((1.0 - lp) + (1.0 - lq)));
    add(f, j + 1, half * (lp + lq));
  }
  return f;
}

}  // namespace forms

PathContext::PathContext(std::vector<double> times, std::vector<double> values,
                         std::optional<double> horizon)
    : times_(std::move(times)), values_(std::move(values)), horizon_(horizon) {
  if (times_.empty() || times_.size() != values_.size())
    throw DomainError("path needs matching, non-empty time and value arrays");
  if (times_.front() != 0.0 || values_.front() != 0.0)
    throw DomainError("path must start at time 0 with W(0) = 0");
  for (std::size_t j = 1; j < times_.size(); ++j)
    if (!(times_[j] > times_[j - 1]))
      throw DomainError("path times must be strictly increasing");
  for (double v : values_)
    if (!std::isfinite(v)) throw DomainError("path values must be finite");
  if (horizon_ && (*horizon_ < 0.0 || !std::isfinite(*horizon_)))
    throw DomainError("freezing horizon must be a nonnegative time");
}

PathContext PathContext::from_knots(std::vector<std::pair<double, double>> knots,
                                    std::optional<double> horizon) {
  std::sort(knots.begin(), knots.end());
  if (knots.empty() || knots.front().first != 0.0) knots.insert(knots.begin(), {0.0, 0.0});
  std::vector<double> t, v;
  for (const auto& [a, b] : knots) {
    t.push_back(a);
    v.push_back(b);
  }
  return PathContext(std::move(t), std::move(v), horizon);
}

PathContext PathContext::with_horizon(std::optional<double> t) const {
  PathContext out = *this;
  if (t && *t < 0.0) throw DomainError("freezing horizon must be a nonnegative time");
  out.horizon_ = t;
  return out;
}

PathContext PathContext::shifted(const DeterministicKernel& h, double eps) const {
  if (shift_) throw DomainError("path already carries a shift");
  PathContext out = *this;
  out.shift_ = h;
  out.eps_ = eps;
  return out;
}

double PathContext::shift_at(double u) const {
  return shift_ ? eps_ * shift_->cumulative(u) : 0.0;
}

double PathContext::brownian(double u) const {
  const double s = stop(u);
  return forms::brownian(times_, s).apply(values_) + shift_at(s);
}

double PathContext::wiener_integral(const DeterministicKernel& f) const {
  DeterministicKernel g = f;
  g.lo = stop(f.lo);
  g.hi = stop(f.hi);
  if (!(g.hi > g.lo)) return 0.0;
  double v = forms::wiener_integral(times_, g).apply(values_);
  if (shift_)
    v += eps_ * (PiecewiseFunction::from_kernel(g) * PiecewiseFunction::from_kernel(*shift_))
                    .integral();
  return v;
}

double PathContext::time_integral(double a, double b) const {
  const double p = stop(a);
  const double q = stop(b);
  double v = 0.0;
  if (q > p) {
    v = forms::time_integral(times_, p, q).apply(values_);
    // int_p^q H(u) du = int h(s) (q - max(s, p))^+ ds
    if (shift_)
      v += eps_ * (PiecewiseFunction::ramp(p, q, 0.0, q) * PiecewiseFunction::from_kernel(*shift_))
                      .integral();
  }
  if (horizon_ && b > *horizon_) {
    const double tail = b - std::max(a, *horizon_);
    if (tail > 0.0) v += brownian(*horizon_) * tail;
  }
  return v;
}

}  // namespace bmrep
