#ifndef BOPT_LINALG_HPP
#define BOPT_LINALG_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bopt/matrix.hpp"

namespace bopt {

/// Lower-triangular Cholesky factor L with L L^T = A.
///
/// Rows are stored contiguously in packed row-major order (row i holds
/// entries 0..i), so appending a bordered row writes only at the end of the
/// buffer. Capacity grows geometrically; an append copies nothing until the
/// reserved capacity is exhausted.
class CholFactor {
 public:
  CholFactor() = default;

  std::size_t order() const noexcept { return n_; }

  /// Entry (i, j); zero above the diagonal.
  double operator()(std::size_t i, std::size_t j) const {
    return j > i ? 0.0 : packed_[offset(i) + j];
  }
  /// Entries 0..i of row i.
  std::span<const double> row(std::size_t i) const { return {packed_.data() + offset(i), i + 1}; }
  double diag(std::size_t i) const { return packed_[offset(i) + i]; }

  /// log det(L L^T).
  double log_det() const;

  /// Dense copy of L.
  Matrix dense() const;

  /// Borders the factored matrix with a new last row/column in O(n^2).
  /// Throws NotPositiveDefinite if corner - |z|^2 <= 0, leaving *this unchanged.
  void append(std::span<const double> cross, double corner);

  void reserve(std::size_t order);

  friend bool operator==(const CholFactor&, const CholFactor&) = default;

 private:
  friend CholFactor cholesky(const Matrix& A);
  static constexpr std::size_t offset(std::size_t i) noexcept { return i * (i + 1) / 2; }

  std::size_t n_ = 0;
  std::vector<double> packed_;
};

enum class TriSide {
  lower,             // solve L x = b
  upper_transposed,  // solve L^T x = b
};

/// Factorizes a symmetric matrix; only the lower triangle is read.
/// Throws NotPositiveDefinite carrying the offending pivot index.
CholFactor cholesky(const Matrix& A);

/// Returns the factor of [[A, cross], [cross^T, corner]].
CholFactor chol_append(const CholFactor& factor, std::span<const double> cross, double corner);

Vector tri_solve(const CholFactor& factor, std::span<const double> b, TriSide side);

/// In-place variants used on hot paths; b is overwritten with the solution.
void tri_solve_inplace(const CholFactor& factor, std::span<double> b, TriSide side);

/// A^{-1} b through two triangular solves.
Vector chol_solve(const CholFactor& factor, std::span<const double> b);

/// Per-thread call counters, used to verify that hot paths do not refactorize.
struct LinalgStats {
  std::uint64_t full_factorizations = 0;
  std::uint64_t appends = 0;
};
/// Counters of the calling thread.
LinalgStats& linalg_stats();

}  // namespace bopt

#endif  // BOPT_LINALG_HPP
