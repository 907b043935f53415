#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "bmrep/expr.hpp"
#include "bmrep/path.hpp"

namespace bmrep::testsupport {

// Seeded random functionals over the times {0.25, 0.5, 0.75, 1}: point
// values, time and Wiener integrals, sums, products, small powers, exp and
// the whitelisted smooth functions. Sizes stay small enough for repeated
// second derivatives.
std::vector<Expr> expression_corpus(std::uint64_t seed, std::size_t count);

// Polynomial functionals of W(1) of degree <= max_degree.
std::vector<Expr> polynomial_corpus(std::uint64_t seed, std::size_t count, int max_degree);

// Exact Brownian path on a uniform grid of [0, horizon].
PathContext random_path(std::mt19937_64& rng, double horizon = 1.0, int steps = 64);

// Path through (t, w) that is linear on [0, t] and constant afterwards.
PathContext frozen_prefix(double t, double w, double horizon = 1.0);

}  // namespace bmrep::testsupport
