#pragma once

#include <functional>
#include <span>
#include <vector>

namespace bmrep::quad {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point rule, computed once per n by Newton iteration on P_n and cached.
const GaussRule& gauss_legendre(int n);

using Integrand1 = std::function<double(double)>;
using IntegrandN = std::function<double(std::span<const double>)>;

// Composite rule over [lo, hi], one n-point panel between consecutive
// breakpoints (breakpoints outside (lo, hi) are ignored).
double integrate(const Integrand1& f, double lo, double hi, int n,
                 std::span<const double> breakpoints = {});

// Tensor-product rule over the hypercube [lo, hi]^dim.
double integrate_hypercube(const IntegrandN& f, int dim, double lo, double hi, int n,
                           std::span<const double> breakpoints = {});

// Nested rule over the ordered simplex lo <= s_1 <= ... <= s_dim <= hi.
// Each inner axis runs from the previous coordinate to hi and is split at
// the breakpoints it contains.
double integrate_simplex(const IntegrandN& f, int dim, double lo, double hi, int n,
                         std::span<const double> breakpoints = {});

}  // namespace bmrep::quad
