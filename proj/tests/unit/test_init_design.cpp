#include <doctest.h>

#include <algorithm>
#include <random>

#include "bopt/errors.hpp"
#include "bopt/init_design.hpp"
#include "oracles.hpp"

using namespace bopt;

namespace {

// Exact star discrepancy in two dimensions over anchored boxes whose corners
// are point coordinates or 1, counting both open and closed boxes.
double star_discrepancy_2d(const Matrix& pts) {
  const std::size_t n = pts.rows();
  std::vector<double> xs{1.0}, ys{1.0};
  for (std::size_t i = 0; i < n; ++i) {
    xs.push_back(pts(i, 0));
    ys.push_back(pts(i, 1));
  }
  double worst = 0.0;
  for (double a : xs)
    for (double b : ys) {
      std::size_t open = 0, closed = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (pts(i, 0) < a && pts(i, 1) < b) ++open;
        if (pts(i, 0) <= a && pts(i, 1) <= b) ++closed;
      }
      const double vol = a * b;
      worst = std::max({worst, vol - static_cast<double>(open) / n,
                        static_cast<double>(closed) / n - vol});
    }
  return worst;
}

bool in_unit_cube(const Matrix& m) {
  return std::all_of(m.data().begin(), m.data().end(), [](double v) { return v >= 0.0 && v <= 1.0; });
}

}  // namespace

TEST_SUITE_BEGIN("init_design");

TEST_CASE("LHS single point") {
  std::mt19937_64 rng(1);
  const Matrix m = lhs(1, 3, rng);
  REQUIRE(m.rows() == 1);
  for (double v : m.row(0)) {
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("property: LHS projections are stratified") {
  std::mt19937_64 rng(2);
  for (std::size_t n : {2u, 10u, 37u})
    for (std::size_t d : {1u, 2u, 6u}) {
      const Matrix m = lhs(n, d, rng);
      CHECK(in_unit_cube(m));
      for (std::size_t j = 0; j < d; ++j) {
        std::vector<std::size_t> strata;
        for (std::size_t i = 0; i < n; ++i)
          strata.push_back(static_cast<std::size_t>(std::floor(m(i, j) * static_cast<double>(n))));
        std::sort(strata.begin(), strata.end());
        for (std::size_t i = 0; i < n; ++i) CHECK(strata[i] == i);
      }
    }
}

TEST_CASE("LHS is reproducible") {
  std::mt19937_64 a(99), b(99);
  CHECK(lhs(10, 2, a) == lhs(10, 2, b));
}

TEST_CASE("Sobol first points") {
  const Matrix s1 = sobol(3, 1);
  CHECK(s1(0, 0) == 0.5);
  CHECK(s1(1, 0) == 0.75);
  CHECK(s1(2, 0) == 0.25);
  const Matrix s2 = sobol(1, 2);
  CHECK(s2(0, 0) == 0.5);
  CHECK(s2(0, 1) == 0.5);
}

TEST_CASE("oracle: Sobol equals the Gray-code reference and frozen values") {
  const auto ref = oracle::sobol_reference(16, 6);
  const Matrix lib6 = sobol(16, 6);
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(lib6(i, j) == ref[i][j]);

  const Matrix lib = sobol(16, kSobolMaxDim);
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < kSobolMaxDim; ++j)
      CHECK(lib(i, j) == oracle::kSobolFrozen32[i][j] / 32.0);

  // Longer prefix against the reference, to exercise higher bits.
  const auto ref_long = oracle::sobol_reference(1000, 6);
  const Matrix lib_long = sobol(1000, 6);
  for (std::size_t i = 0; i < 1000; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(lib_long(i, j) == ref_long[i][j]);
}

TEST_CASE("Sobol dimension limit") {
  CHECK_THROWS_AS(sobol(4, kSobolMaxDim + 1), UnsupportedDimension);
  CHECK(kSobolMaxDim >= 10);
}

TEST_CASE("Sobol has lower discrepancy than uniform points") {
  const double sobol_d = star_discrepancy_2d(sobol(64, 2));
  std::vector<double> uniform_d;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    uniform_d.push_back(star_discrepancy_2d(uniform_design(64, 2, rng)));
  }
  std::nth_element(uniform_d.begin(), uniform_d.begin() + 10, uniform_d.end());
  CAPTURE(sobol_d);
  CHECK(sobol_d < uniform_d[10]);
}

TEST_CASE("property: every design lies in the unit cube") {
  std::mt19937_64 rng(5);
  for (InitMethod m : {InitMethod::LHS, InitMethod::SOBOL, InitMethod::UNIFORM}) {
    const Matrix pts = initial_design(m, 50, 5, rng);
    CHECK(pts.rows() == 50);
    CHECK(pts.cols() == 5);
    CHECK(in_unit_cube(pts));
  }
}

TEST_CASE("scaling") {
  const std::vector<double> u{0.25, 0.5};
  CHECK(scale(u, Box::unit(2)) == u);
  const Box b{{-5.0, 0.0}, {10.0, 15.0}};
  CHECK(scale(std::vector<double>{0.5, 0.5}, b) == std::vector<double>{2.5, 7.5});
  CHECK(scale(std::vector<double>{0.0, 1.0}, b) == std::vector<double>{-5.0, 15.0});
  CHECK(scale(std::vector<double>{1.0, 0.0}, b) == std::vector<double>{10.0, 0.0});
  const std::vector<double> x{3.3, 14.0};
  const auto back = scale(unscale(x, b), b);
  CHECK(back[0] == doctest::Approx(x[0]));
  CHECK(back[1] == doctest::Approx(x[1]));

  Matrix pts(2, 2);
  pts(1, 0) = pts(1, 1) = 1.0;
  const Matrix scaled = scale(pts, b);
  CHECK(scaled(0, 0) == -5.0);
  CHECK(scaled(1, 1) == 15.0);
}

TEST_SUITE_END();
