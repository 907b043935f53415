#include "bmrep/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "bmrep/error.hpp"

namespace bmrep::quad {
namespace {

GaussRule compute_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

std::vector<double> panel_edges(double lo, double hi, std::span<const double> breakpoints) {
  std::vector<double> edges{lo};
  for (double b : breakpoints) {
    if (b > lo && b < hi) edges.push_back(b);
  }
  edges.push_back(hi);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: need n >= 1");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
  return it->second;
}

double integrate(const Integrand1& f, double lo, double hi, int n,
                 std::span<const double> breakpoints) {
  if (!(hi > lo)) return 0.0;
  const GaussRule& rule = gauss_legendre(n);
  const auto edges = panel_edges(lo, hi, breakpoints);
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    const double mid = 0.5 * (edges[p + 1] + edges[p]);
    double panel = 0.0;
    for (int i = 0; i < n; ++i) panel += rule.weights[i] * f(mid + half * rule.nodes[i]);
    total += half * panel;
  }
  return total;
}

namespace {

double hypercube_axis(const IntegrandN& f, std::vector<double>& point, int axis, double lo,
                      double hi, int n, std::span<const double> breakpoints) {
  if (axis == static_cast<int>(point.size())) return f(point);
  return integrate(
      [&](double s) {
        point[axis] = s;
        return hypercube_axis(f, point, axis + 1, lo, hi, n, breakpoints);
      },
      lo, hi, n, breakpoints);
}

double simplex_axis(const IntegrandN& f, std::vector<double>& point, int axis, double lo,
                    double hi, int n, std::span<const double> breakpoints) {
  if (axis == static_cast<int>(point.size())) return f(point);
  return integrate(
      [&](double s) {
        point[axis] = s;
        return simplex_axis(f, point, axis + 1, s, hi, n, breakpoints);
      },
      lo, hi, n, breakpoints);
}

}  // namespace

double integrate_hypercube(const IntegrandN& f, int dim, double lo, double hi, int n,
                           std::span<const double> breakpoints) {
  if (dim < 0) throw DomainError("integrate_hypercube: negative dimension");
  std::vector<double> point(dim);
  if (dim == 0) return f(point);
  return hypercube_axis(f, point, 0, lo, hi, n, breakpoints);
}

double integrate_simplex(const IntegrandN& f, int dim, double lo, double hi, int n,
                         std::span<const double> breakpoints) {
  if (dim < 0) throw DomainError("integrate_simplex: negative dimension");
  std::vector<double> point(dim);
  if (dim == 0) return f(point);
  return simplex_axis(f, point, 0, lo, hi, n, breakpoints);
}

}  // namespace bmrep::quad
