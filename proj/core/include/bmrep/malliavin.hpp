#pragma once

#include <vector>

#include "bmrep/expr.hpp"

namespace bmrep {

inline constexpr int kDefaultOrderCap = 64;

// D_s F for a symbolic time s. The result carries indicator, kernel and
// ramp factors in s:
//   D_s W(u)                = 1{s <= u}
//   D_s int_a^b f dW        = f(s) 1{a <= s <= b}
//   D_s int_a^b W(u) du     = (b - max(s, a))^+
// with product and chain rules through exp and smooth nodes.
Expr malliavin_derivative(const Expr& f, const SymbolicTime& s);

// D^2_{s_k} ... D^2_{s_1} F, simplified after every application.
Expr iterated_second_derivative(const Expr& f, const std::vector<SymbolicTime>& times,
                                int order_cap = kDefaultOrderCap);

// D^l at the concrete time s (all indicator and kernel factors evaluated).
Expr derivative_at(const Expr& f, double s, int order = 1, int order_cap = kDefaultOrderCap);

// D_T^l F for a cylindrical functional whose latest time is T.
Expr derivative_at_terminal(const Expr& f, int order, double terminal,
                            int order_cap = kDefaultOrderCap);

// int D_s F h(s) ds evaluated on the path, with exact integration of the
// deterministic factors.
double derivative_pairing(const Expr& f, const DeterministicKernel& h, const PathContext& path);

}  // namespace bmrep
