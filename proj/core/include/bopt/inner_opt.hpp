#ifndef BOPT_INNER_OPT_HPP
#define BOPT_INNER_OPT_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <span>

#include "bopt/matrix.hpp"

namespace bopt {

/// Axis-aligned box with lower_j < upper_j.
struct Box {
  Vector lower;
  Vector upper;

  std::size_t dim() const noexcept { return lower.size(); }
  /// Throws DimensionMismatch / RangeError when the invariants are broken.
  void check() const;
  bool contains(std::span<const double> x) const;
  static Box unit(std::size_t dim) { return {Vector(dim, 0.0), Vector(dim, 1.0)}; }
};

struct InnerBudget {
  int global_evals = 1000;
  int local_evals = 200;
};

/// Function to maximize. May return -infinity for infeasible points.
using Objective = std::function<double(std::span<const double>)>;

struct Maximum {
  Point x;
  double value = 0.0;
  std::size_t evaluations = 0;
};

/// DIRECT (DIviding RECTangles) global search over the box.
Maximum direct_maximize(const Objective& f, const Box& box, int max_evals);

/// Bounded Nelder-Mead ascent from x0. If f(x0) is already known it can be
/// passed to save one evaluation.
Maximum simplex_refine(const Objective& f, std::span<const double> x0, const Box& box,
                       int max_evals, std::optional<double> f0 = std::nullopt);

/// DIRECT followed by Nelder-Mead from the best DIRECT point.
Maximum maximize(const Objective& f, const Box& box, const InnerBudget& budget);

}  // namespace bopt

#endif  // BOPT_INNER_OPT_HPP
