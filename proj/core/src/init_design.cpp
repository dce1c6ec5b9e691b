#include "bopt/init_design.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>

#include "bopt/errors.hpp"

namespace bopt {

namespace {

// Joe & Kuo direction numbers (new-joe-kuo-6.21201) for dimensions 2..21:
// polynomial degree s, coefficient bits a, initial values m_1..m_s.
struct DirectionEntry {
  unsigned s;
  unsigned a;
  std::array<std::uint32_t, 7> m;
};

constexpr std::array<DirectionEntry, kSobolMaxDim - 1> kJoeKuo = {{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
    {6, 19, {1, 1, 1, 15, 7, 5}},
    {6, 22, {1, 3, 1, 15, 13, 25}},
    {6, 25, {1, 1, 5, 5, 19, 61}},
    {7, 1, {1, 3, 7, 11, 23, 15, 103}},
    {7, 4, {1, 3, 7, 13, 13, 15, 69}},
}};

constexpr unsigned kBits = 32;

std::array<std::uint32_t, kBits> direction_numbers(std::size_t dim_index) {
  std::array<std::uint32_t, kBits> v{};
  if (dim_index == 0) {
    for (unsigned i = 0; i < kBits; ++i) v[i] = 1u << (kBits - 1 - i);
    return v;
  }
  const DirectionEntry& e = kJoeKuo[dim_index - 1];
  for (unsigned i = 0; i < e.s; ++i) v[i] = e.m[i] << (kBits - 1 - i);
  for (unsigned i = e.s; i < kBits; ++i) {
    v[i] = v[i - e.s] ^ (v[i - e.s] >> e.s);
    for (unsigned k = 1; k < e.s; ++k)
      if ((e.a >> (e.s - 1 - k)) & 1u) v[i] ^= v[i - k];
  }
  return v;
}

}  // namespace

Matrix lhs(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  Matrix out(n, d);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::size_t> perm(n);
  for (std::size_t j = 0; j < d; ++j) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = (static_cast<double>(perm[i]) + unif(rng)) / static_cast<double>(n);
      // Stay inside the half-open stratum even if rounding reaches its upper edge.
      const double upper = static_cast<double>(perm[i] + 1) / static_cast<double>(n);
      out(i, j) = v < upper ? v : std::nextafter(upper, 0.0);
    }
  }
  return out;
}

Matrix sobol(std::size_t n, std::size_t d) {
  if (d == 0 || d > kSobolMaxDim)
    throw UnsupportedDimension("Sobol sequence supports 1.." + std::to_string(kSobolMaxDim) +
                               " dimensions, got " + std::to_string(d));
  Matrix out(n, d);
  constexpr double scale = 1.0 / 4294967296.0;  // 2^-32
  for (std::size_t j = 0; j < d; ++j) {
    const auto v = direction_numbers(j);
    std::uint32_t x = 0;
    // Gray-code order: point k differs from point k-1 by the direction number
    // indexed by the lowest zero bit of k-1.
    for (std::size_t k = 1; k <= n; ++k) {
      std::size_t c = 0;
      std::size_t value = k - 1;
      while (value & 1u) {
        value >>= 1;
        ++c;
      }
      x ^= v[c];
      out(k - 1, j) = static_cast<double>(x) * scale;
    }
  }
  return out;
}

Matrix uniform_design(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  Matrix out(n, d);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) out(i, j) = unif(rng);
  return out;
}

Matrix initial_design(InitMethod method, std::size_t n, std::size_t d, std::mt19937_64& rng) {
  switch (method) {
    case InitMethod::LHS: return lhs(n, d, rng);
    case InitMethod::SOBOL: return sobol(n, d);
    case InitMethod::UNIFORM: return uniform_design(n, d, rng);
  }
  return {};
}

Point scale(std::span<const double> u, const Box& box) {
  if (u.size() != box.dim()) throw DimensionMismatch("point does not match the box");
  Point x(u.size());
  for (std::size_t j = 0; j < u.size(); ++j)
    x[j] = box.lower[j] + u[j] * (box.upper[j] - box.lower[j]);
  return x;
}

Point unscale(std::span<const double> x, const Box& box) {
  if (x.size() != box.dim()) throw DimensionMismatch("point does not match the box");
  Point u(x.size());
  for (std::size_t j = 0; j < x.size(); ++j)
    u[j] = (x[j] - box.lower[j]) / (box.upper[j] - box.lower[j]);
  return u;
}

Matrix scale(const Matrix& points, const Box& box) {
  Matrix out(points.rows(), points.cols());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    Point x = scale(points.row(i), box);
    std::copy(x.begin(), x.end(), out.row(i).begin());
  }
  return out;
}

}  // namespace bopt
