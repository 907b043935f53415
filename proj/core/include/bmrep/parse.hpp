#pragma once

#include <string_view>

#include "bmrep/expr.hpp"

namespace bmrep {

// Parses the plain-text functional syntax:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary ('*' unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' integer)?
//   primary := number | '(' expr ')' | call
//   call    := W(t) | pow(expr, n) | exp(expr) | neg(expr) | scale(c, expr)
//            | intdt(W, a, b) | wint(kernel, a, b) | apply(name, expr)
//            | dapply(name, k, expr) | sum(expr, ...) | prod(expr, ...)
//   kernel  := poly[c0, c1, ...] | revpoly(A)[c0, ...] | exppoly(r)[c0, ...]
//
// Canonical text produced by Expr::text() for functionals without symbolic
// times parses back to the same expression.
Expr parse_expr(std::string_view text);
Kernel parse_kernel(std::string_view text);

}  // namespace bmrep
