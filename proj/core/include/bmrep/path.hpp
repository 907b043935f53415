#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bmrep/kernel.hpp"

namespace bmrep {

// Linear functional of the grid values: sum_j weight_j * W(grid_j).
struct LinearForm {
  std::vector<std::pair<std::size_t, double>> weights;

  double apply(std::span<const double> values) const {
    double acc = 0.0;
    for (const auto& [j, w] : weights) acc += w * values[j];
    return acc;
  }
};

// Linear forms of the three path primitives on a fixed grid. Between grid
// points the path is the linear interpolant, so all three are exact linear
// functionals of the stored values. Horizons are applied by the caller.
namespace forms {
LinearForm brownian(std::span<const double> grid, double u);
LinearForm wiener_integral(std::span<const double> grid, const DeterministicKernel& f);
LinearForm time_integral(std::span<const double> grid, double a, double b);
}  // namespace forms

// A discretely stored Brownian path with an optional freezing horizon t.
// With a horizon set every primitive is evaluated on omega^t, the path
// stopped at t. An optional Cameron-Martin shift W + eps * int_0^. h is
// applied exactly (not through the grid).
class PathContext {
 public:
  PathContext(std::vector<double> times, std::vector<double> values,
              std::optional<double> horizon = std::nullopt);

  // Path through the given knots, linear in between.
  static PathContext from_knots(std::vector<std::pair<double, double>> knots,
                                std::optional<double> horizon = std::nullopt);

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::optional<double> horizon() const noexcept { return horizon_; }
  double coverage() const noexcept { return times_.back(); }

  PathContext with_horizon(std::optional<double> t) const;
  PathContext shifted(const DeterministicKernel& h, double eps) const;

  double brownian(double u) const;
  double wiener_integral(const DeterministicKernel& f) const;
  double time_integral(double a, double b) const;

 private:
  double stop(double u) const { return horizon_ ? std::min(u, *horizon_) : u; }
  double shift_at(double u) const;

  std::vector<double> times_;
  std::vector<double> values_;
  std::optional<double> horizon_;
  std::optional<DeterministicKernel> shift_;
  double eps_ = 0.0;
};

}  // namespace bmrep
