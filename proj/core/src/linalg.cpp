#include "bopt/linalg.hpp"

#include <cmath>

#include "bopt/errors.hpp"

namespace bopt {

LinalgStats& linalg_stats() {
  thread_local LinalgStats stats;
  return stats;
}

double CholFactor::log_det() const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += std::log(diag(i));
  return 2.0 * s;
}

Matrix CholFactor::dense() const {
  Matrix L(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j <= i; ++j) L(i, j) = packed_[offset(i) + j];
  return L;
}

void CholFactor::reserve(std::size_t order) { packed_.reserve(offset(order)); }

void CholFactor::append(std::span<const double> cross, double corner) {
  if (cross.size() != n_)
    throw DimensionMismatch("append expects a border of length " + std::to_string(n_));
  const std::size_t start = packed_.size();
  if (packed_.capacity() < start + n_ + 1) packed_.reserve(2 * (start + n_ + 1));
  packed_.resize(start + n_ + 1);
  double* z = packed_.data() + start;

  // Forward substitution L z = cross, written straight into the new row.
  double zz = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double* li = packed_.data() + offset(i);
    double s = cross[i];
    for (std::size_t k = 0; k < i; ++k) s -= li[k] * z[k];
    z[i] = s / li[i];
    zz += z[i] * z[i];
  }
  const double pivot = corner - zz;
  if (!(pivot > 0.0) || !std::isfinite(pivot)) {
    packed_.resize(start);
    throw NotPositiveDefinite(n_, pivot);
  }
  z[n_] = std::sqrt(pivot);
  ++n_;
  ++linalg_stats().appends;
}

CholFactor cholesky(const Matrix& A) {
  if (A.rows() != A.cols()) throw DimensionMismatch("cholesky expects a square matrix");
  ++linalg_stats().full_factorizations;
  const std::size_t n = A.rows();
  CholFactor f;
  f.packed_.resize(CholFactor::offset(n));
  f.n_ = n;
  for (std::size_t i = 0; i < n; ++i) {
    double* li = f.packed_.data() + CholFactor::offset(i);
    for (std::size_t j = 0; j < i; ++j) {
      const double* lj = f.packed_.data() + CholFactor::offset(j);
      double s = A(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      li[j] = s / lj[j];
    }
    double s = A(i, i);
    for (std::size_t k = 0; k < i; ++k) s -= li[k] * li[k];
    if (!(s > 0.0) || !std::isfinite(s)) throw NotPositiveDefinite(i, s);
    li[i] = std::sqrt(s);
  }
  return f;
}

CholFactor chol_append(const CholFactor& factor, std::span<const double> cross, double corner) {
  CholFactor out = factor;
  out.append(cross, corner);
  return out;
}

void tri_solve_inplace(const CholFactor& factor, std::span<double> b, TriSide side) {
  const std::size_t n = factor.order();
  if (b.size() != n)
    throw DimensionMismatch("triangular solve expects length " + std::to_string(n) + ", got " +
                            std::to_string(b.size()));
  if (side == TriSide::lower) {
    for (std::size_t i = 0; i < n; ++i) {
      auto li = factor.row(i);
      double s = b[i];
      for (std::size_t k = 0; k < i; ++k) s -= li[k] * b[k];
      b[i] = s / li[i];
    }
  } else {
    // Column-oriented back substitution so that rows are read contiguously.
    for (std::size_t i = n; i-- > 0;) {
      auto li = factor.row(i);
      b[i] /= li[i];
      const double bi = b[i];
      for (std::size_t k = 0; k < i; ++k) b[k] -= li[k] * bi;
    }
  }
}

Vector tri_solve(const CholFactor& factor, std::span<const double> b, TriSide side) {
  Vector x(b.begin(), b.end());
  tri_solve_inplace(factor, x, side);
  return x;
}

Vector chol_solve(const CholFactor& factor, std::span<const double> b) {
  Vector x(b.begin(), b.end());
  tri_solve_inplace(factor, x, TriSide::lower);
  tri_solve_inplace(factor, x, TriSide::upper_transposed);
  return x;
}

}  // namespace bopt
