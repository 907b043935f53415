#include "bmrep/cir.hpp"

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>

#include "bmrep/error.hpp"
#include "bmrep/format.hpp"
#include "bmrep/quadrature.hpp"

namespace bmrep {

namespace {

class Coefficients {
 public:
  Coefficients(const Kernel& sigma, const Kernel& b, double T, int nodes)
      : sigma_(sigma), b_(b), T_(T), nodes_(nodes) {}

  double sigma(double s) const { return sigma_(s); }
  double btilde(double s) const {
    if (b_.is_zero()) return 0.0;
    return poly::integrate_exp(b_.rate(), b_.monomial(), 0.0, s);
  }
  // int_s^T e^{-2 btilde(u)} du
  double tail(double s) const {
    if (b_.is_zero()) return T_ - s;
    return quad::integrate([this](double u) { return std::exp(-2.0 * btilde(u)); }, s, T_, nodes_);
  }

 private:
  Kernel sigma_;
  Kernel b_;
  double T_;
  int nodes_;
};

}  // namespace

CIRCoefficients cir_price(double tau, double r_t, int d, const Kernel& sigma, const Kernel& b,
                          int order, double t, const CIROptions& options) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("cir_price needs tau >= 0");
  if (d < 1) throw DomainError("cir_price needs d >= 1");
  if (order < 0 || order > 2) throw DomainError("cir_price supports orders 0..2");
  if (t < 0.0) throw DomainError("cir_price needs t >= 0");
  const double T = t + tau;
  const Coefficients c(sigma, b, T, options.nodes);
  const auto& rule = quad::gauss_legendre(options.nodes);

  double smax = 0.0;
  for (double x : rule.nodes) smax = std::max(smax, std::abs(c.sigma(t + 0.5 * tau * (x + 1.0))));
  CIRCoefficients out;
  out.tau = tau;
  out.t = t;
  out.r = r_t;
  out.d = d;
  out.order = order;
  out.truncation_heuristic = std::pow(tau * smax * smax, 3);
  if (tau > options.max_tau)
    throw NumericalError("dyson", "cir_price",
                         "tau " + format_number(tau) + " too large for the truncated expansion (tau^6 scale " +
                             format_number(out.truncation_heuristic) + ")");

  const double bt = c.btilde(t);
  auto P = [&](double s) { return c.sigma(s) * std::exp(bt + c.btilde(s)) * c.tail(s); };
  auto q = [&](double u, double v) {
    return 2.0 * c.sigma(u) * c.sigma(v) * std::exp(c.btilde(u) + c.btilde(v)) * c.tail(std::max(u, v));
  };

  double single0 = 0.0, single1 = 0.0;
  double double0 = 0.0, double1 = 0.0, double2 = 0.0;
  const double h = 0.5 * tau;
  for (int i = 0; i < options.nodes; ++i) {
    const double s1 = t + h * (rule.nodes[i] + 1.0);
    const double w1 = h * rule.weights[i];
    const double p1 = P(s1);
    const double q11 = q(s1, s1);
    single0 += w1 * q11;
    single1 += w1 * 4.0 * p1 * p1;
    const double h2 = 0.5 * (T - s1);
    double in0 = 0.0, in1 = 0.0, in2 = 0.0;
    for (int j = 0; j < options.nodes; ++j) {
      const double s2 = s1 + h2 * (rule.nodes[j] + 1.0);
      const double w2 = h2 * rule.weights[j];
      const double p2 = P(s2);
      const double q22 = q(s2, s2);
      const double q12 = q(s1, s2);
      in0 += w2 * (q11 * q22 + 2.0 * q12 * q12);
      in1 += w2 * (4.0 * p2 * p2 * q11 + 4.0 * p1 * p1 * q22 + 16.0 * p1 * p2 * q12);
      in2 += w2 * 16.0 * p1 * p1 * p2 * p2;
    }
    double0 += w1 * in0;
    double1 += w1 * in1;
    double2 += w1 * in2;
  }
  out.A0 = 1.0 - 0.5 * single0 + 0.25 * double0;
  out.A1 = 0.5 * single1 - 0.25 * double1;
  out.A2 = 0.25 * double2;
  out.tau_tilde = std::exp(2.0 * bt) * c.tail(t);

  const double base = std::pow(out.A0, d - 1);
  double bracket = base * out.A0;
  if (order >= 1) bracket += base * out.A1 * r_t;
  if (order >= 2) bracket += base * out.A2 * r_t * r_t;
  out.price = std::exp(-out.tau_tilde * r_t) * bracket;
  out.C = out.tau_tilde - (tau > 0.0 ? out.A1 / out.A0 : 0.0);
  out.A = -d * std::log(out.A0);
  if (!std::isfinite(out.price) || !(out.A0 > 0.0))
    throw NumericalError("dyson", "cir_price", "non-finite coefficients");
  return out;
}

std::vector<double> riccati_reference(std::span<const double> tau_grid, const Kernel& sigma,
                                      const Kernel& b, double t) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 1>;
  std::vector<double> out;
  out.reserve(tau_grid.size());
  auto rhs = [&](const State& c, State& dc, double s) {
    const double sg = sigma(s);
    dc[0] = 2.0 * b(s) * c[0] + 2.0 * sg * sg * c[0] * c[0] - 1.0;
  };
  for (double tau : tau_grid) {
    if (!(tau >= 0.0)) throw DomainError("riccati_reference needs tau >= 0");
    if (tau == 0.0) {
      out.push_back(0.0);
      continue;
    }
    State c{0.0};
    auto stepper = ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
    const std::size_t steps =
        ode::integrate_adaptive(stepper, rhs, c, t + tau, t, -std::min(1e-3, tau / 16.0));
    if (!std::isfinite(c[0]) || steps > 10'000'000)
      throw NumericalError("dyson", "riccati_reference", "ODE integration failed");
    out.push_back(c[0]);
  }
  return out;
}

}  // namespace bmrep
