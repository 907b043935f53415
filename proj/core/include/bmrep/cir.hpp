#pragma once

#include <span>
#include <vector>

#include "bmrep/kernel.hpp"

namespace bmrep {

// Bond price in the extended CIR model r = sum_{i<d} X_i^2 with
// dX_i = -b(t) X_i dt + sigma(t) dW_i, from the first Dyson terms.
struct CIRCoefficients {
  double tau = 0.0;
  double t = 0.0;
  double r = 0.0;
  int d = 1;
  int order = 2;
  double A0 = 0.0;  // coefficient of 1
  double A1 = 0.0;  // coefficient of X^2
  double A2 = 0.0;  // coefficient of X^4
  double tau_tilde = 0.0;  // int_t^T e^{2 btilde(t) - 2 btilde(u)} du
  double price = 0.0;
  double C = 0.0;  // tau_tilde - A1 / A0
  double A = 0.0;  // -d log A0
  // Size of the first neglected order, (tau max|sigma|^2)^3.
  double truncation_heuristic = 0.0;
};

struct CIROptions {
  int nodes = 48;
  double max_tau = 2.0;
};

CIRCoefficients cir_price(double tau, double r_t, int d, const Kernel& sigma, const Kernel& b,
                          int order = 2, double t = 0.0, const CIROptions& options = {});

// C(t, t + tau) for every tau in the grid, from backward integration of
// dC/dt = 2 b C + 2 sigma^2 C^2 - 1 with C(T, T) = 0.
std::vector<double> riccati_reference(std::span<const double> tau_grid, const Kernel& sigma,
                                      const Kernel& b, double t = 0.0);

}  // namespace bmrep
