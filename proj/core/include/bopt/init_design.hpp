#ifndef BOPT_INIT_DESIGN_HPP
#define BOPT_INIT_DESIGN_HPP

#include <cstddef>
#include <random>

#include "bopt/inner_opt.hpp"
#include "bopt/matrix.hpp"
#include "bopt/params.hpp"

namespace bopt {

/// Highest dimension supported by sobol().
inline constexpr std::size_t kSobolMaxDim = 21;

/// Latin hypercube: per dimension, exactly one point in each stratum [i/n, (i+1)/n).
Matrix lhs(std::size_t n, std::size_t d, std::mt19937_64& rng);

/// Points 1..n of the unscrambled Sobol sequence (the origin is skipped).
/// Throws UnsupportedDimension for d > kSobolMaxDim.
Matrix sobol(std::size_t n, std::size_t d);

Matrix uniform_design(std::size_t n, std::size_t d, std::mt19937_64& rng);

Matrix initial_design(InitMethod method, std::size_t n, std::size_t d, std::mt19937_64& rng);

/// Affine map from the unit cube onto the box.
Matrix scale(const Matrix& points, const Box& box);
Point scale(std::span<const double> u, const Box& box);
/// Inverse of scale().
Point unscale(std::span<const double> x, const Box& box);

}  // namespace bopt

#endif  // BOPT_INIT_DESIGN_HPP
