#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bopt/errors.hpp"
#include "bopt/kernels.hpp"
#include "bopt/linalg.hpp"

using namespace bopt;

namespace {

KernelSpec kernel(const char* text) { return KernelSpec::from_tree(parse_expression(text)); }

// Closed forms written out independently of the library.
double matern3(double r, double l) {
  const double a = std::sqrt(3.0) * r / l;
  return (1.0 + a) * std::exp(-a);
}
double matern5(double r, double l) {
  const double a = std::sqrt(5.0) * r / l;
  return (1.0 + a + a * a / 3.0) * std::exp(-a);
}
double rq(double r, double l, double alpha) {
  return std::pow(1.0 + r * r / (2.0 * alpha * l * l), -alpha);
}

std::vector<double> random_point(std::mt19937_64& rng, std::size_t d, double lo = -2.0,
                                 double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> x(d);
  for (double& v : x) v = u(rng);
  return x;
}

double norm(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_SUITE_BEGIN("kernels");

TEST_CASE("parameter counts") {
  CHECK(kernel("kMaternISO3").n_params() == 1);
  CHECK(kernel("kRQISO").n_params() == 2);
  CHECK(kernel("kSum(kMaternISO3,kRQISO)").n_params() == 3);
  CHECK(kernel("kProd(kSum(kSEISO,kConst),kMaternISO1)").n_params() == 3);
  CHECK_THROWS_AS(kernel("cEI"), UnknownIdentifier);
}

TEST_CASE("MaternISO3 examples") {
  const KernelSpec k = kernel("kMaternISO3");
  const HyperParams hp{{1.0}};
  const std::vector<double> a{0.3, -0.2}, b{1.3, -0.2};
  CHECK(kernel_eval(k, hp, a, a) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(kernel_eval(k, hp, a, b) == doctest::Approx(0.4833577245965077).epsilon(1e-12));
}

TEST_CASE("sum of unit kernels at zero distance") {
  const KernelSpec k = kernel("kSum(kMaternISO3,kRQISO)");
  const std::vector<double> a{0.1, 0.7};
  CHECK(kernel_eval(k, HyperParams{{0.4, 0.7, 2.0}}, a, a) == doctest::Approx(2.0));
}

TEST_CASE("leaf closed forms") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto a = random_point(rng, 3), b = random_point(rng, 3);
    const double r = norm(a, b);
    const double l = 0.2 + 0.05 * t;
    CHECK(kernel_eval(kernel("kMaternISO1"), {{l}}, a, b) == doctest::Approx(std::exp(-r / l)));
    CHECK(kernel_eval(kernel("kMaternISO3"), {{l}}, a, b) == doctest::Approx(matern3(r, l)));
    CHECK(kernel_eval(kernel("kMaternISO5"), {{l}}, a, b) == doctest::Approx(matern5(r, l)));
    CHECK(kernel_eval(kernel("kSEISO"), {{l}}, a, b) ==
          doctest::Approx(std::exp(-r * r / (2 * l * l))));
    CHECK(kernel_eval(kernel("kRQISO"), {{l, 1.5}}, a, b) == doctest::Approx(rq(r, l, 1.5)));
    CHECK(kernel_eval(kernel("kConst"), {{l}}, a, b) == doctest::Approx(l));
  }
}

TEST_CASE("dimension mismatch") {
  const std::vector<double> a{0.0, 1.0}, b{0.0};
  CHECK_THROWS_AS(kernel_eval(kernel("kSEISO"), {{1.0}}, a, b), DimensionMismatch);
}

TEST_CASE("property: symmetry and stationarity") {
  std::mt19937_64 rng(11);
  const char* specs[] = {"kMaternISO1", "kMaternISO5", "kSEISO", "kRQISO",
                         "kSum(kMaternISO3,kRQISO)", "kProd(kSEISO,kSum(kConst,kMaternISO1))"};
  for (const char* s : specs) {
    const KernelSpec k = kernel(s);
    for (int t = 0; t < 100; ++t) {
      HyperParams hp;
      for (std::size_t j = 0; j < k.n_params(); ++j)
        hp.theta.push_back(std::uniform_real_distribution<double>(0.1, 3.0)(rng));
      const auto a = random_point(rng, 4), b = random_point(rng, 4), shift = random_point(rng, 4);
      CHECK(kernel_eval(k, hp, a, b) == kernel_eval(k, hp, b, a));
      auto a2 = a, b2 = b;
      for (int j = 0; j < 4; ++j) {
        a2[j] += shift[j];
        b2[j] += shift[j];
      }
      CHECK(kernel_eval(k, hp, a2, b2) == doctest::Approx(kernel_eval(k, hp, a, b)).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: combinators are pointwise sum and product") {
  std::mt19937_64 rng(5);
  const KernelSpec s = kernel("kSum(kMaternISO3,kRQISO)");
  const KernelSpec p = kernel("kProd(kMaternISO3,kRQISO)");
  const KernelSpec m = kernel("kMaternISO3"), q = kernel("kRQISO");
  for (int t = 0; t < 100; ++t) {
    const auto a = random_point(rng, 2), b = random_point(rng, 2);
    const HyperParams hp{{0.7, 1.3, 0.9}};
    const double km = kernel_eval(m, {{0.7}}, a, b);
    const double kq = kernel_eval(q, {{1.3, 0.9}}, a, b);
    CHECK(kernel_eval(s, hp, a, b) == doctest::Approx(km + kq).epsilon(1e-14));
    CHECK(kernel_eval(p, hp, a, b) == doctest::Approx(km * kq).epsilon(1e-14));
  }
}

TEST_CASE("gram matrix") {
  const KernelSpec k = kernel("kMaternISO3");
  const HyperParams hp{{1.0}};
  Matrix one(1, 2);
  one(0, 0) = 0.4;
  CHECK(gram_matrix(k, hp, one)(0, 0) == 1.0);

  Matrix twins(2, 2);
  twins(0, 0) = twins(1, 0) = 0.3;
  twins(0, 1) = twins(1, 1) = 0.8;
  const Matrix G = gram_matrix(k, hp, twins);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(G(i, j) == doctest::Approx(1.0));

  std::mt19937_64 rng(9);
  Matrix X(3, 2);
  for (std::size_t i = 0; i < 3; ++i)
    for (double& v : X.row(i)) v = std::uniform_real_distribution<double>(0, 1)(rng);
  const Matrix G3 = gram_matrix(k, {{0.5}}, X);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(G3(i, j) == doctest::Approx(kernel_eval(k, {{0.5}}, X.row(i), X.row(j))));
      CHECK(G3(i, j) == G3(j, i));
    }
}

TEST_CASE("cross kernel") {
  const KernelSpec k = kernel("kRQISO");
  const HyperParams hp{{0.4, 2.0}};
  std::mt19937_64 rng(21);
  Matrix X(5, 3);
  for (std::size_t i = 0; i < 5; ++i)
    for (double& v : X.row(i)) v = std::uniform_real_distribution<double>(0, 1)(rng);
  const auto first = cross_kernel(k, hp, X, X.row(0));
  CHECK(first[0] == doctest::Approx(1.0));
  CHECK(cross_kernel(k, hp, Matrix(0, 3), X.row(0)).empty());

  const std::vector<double> xq{0.2, 0.9, 0.4};
  Matrix Xa = X;
  Xa.append_row(xq);
  const Matrix G = gram_matrix(k, hp, Xa);
  const auto kv = cross_kernel(k, hp, X, xq);
  for (std::size_t i = 0; i < 5; ++i) CHECK(kv[i] == doctest::Approx(G(i, 5)));
}

TEST_CASE("mean basis") {
  const std::vector<double> x{2.0, 3.0};
  CHECK(mean_basis(BasisSpec::from_tree(parse_expression("mConst"), 2), x) ==
        std::vector<double>{1.0});
  CHECK(mean_basis(BasisSpec::from_tree(parse_expression("mLinear"), 2), x) ==
        std::vector<double>{1.0, 2.0, 3.0});
  CHECK(mean_basis(BasisSpec::from_tree(parse_expression("mZero"), 2), x).empty());
  CHECK(BasisSpec::from_tree(parse_expression("mLinear"), 6).p() == 7);
}

TEST_CASE("hyperprior log density") {
  Params p = default_params();
  p.kernel_hp_mean = {1.0};
  p.kernel_hp_std = {5.0};
  CHECK(hyperprior_logpdf(p, {{1.0}}) ==
        doctest::Approx(-std::log(5.0 * std::sqrt(2.0 * std::numbers::pi))));
  CHECK(hyperprior_logpdf(p, {{1.0}}) == doctest::Approx(-2.5283764).epsilon(1e-7));

  p.kernel_name = "kRQISO";
  p.kernel_hp_mean = {0.5, 2.0};
  p.kernel_hp_std = {1.5, 0.7};
  const double expected = -std::log(0.5 * 1.5 * std::sqrt(2 * std::numbers::pi)) -
                          std::log(2.0 * 0.7 * std::sqrt(2 * std::numbers::pi));
  CHECK(hyperprior_logpdf(p, {{0.5, 2.0}}) == doctest::Approx(expected));

  // Off the mode: log-normal density written out.
  const double t0 = 0.8, t1 = 3.1;
  auto lognormal = [](double t, double m, double s) {
    const double z = (std::log(t) - std::log(m)) / s;
    return -0.5 * z * z - std::log(t * s * std::sqrt(2 * std::numbers::pi));
  };
  CHECK(hyperprior_logpdf(p, {{t0, t1}}) ==
        doctest::Approx(lognormal(t0, 0.5, 1.5) + lognormal(t1, 2.0, 0.7)));

  CHECK_THROWS_AS(hyperprior_logpdf(p, {{1.0}}), LengthMismatch);
}

TEST_CASE("hyperprior flattens as the std grows") {
  Params p = default_params();
  double previous = std::numeric_limits<double>::infinity();
  for (double s = 0.5; s < 1e6; s *= 4.0) {
    p.kernel_hp_std = {s};
    const double v = hyperprior_logpdf(p, {{2.0}});
    CHECK(v < previous);
    previous = v;
  }
  CHECK(previous < -10.0);
}

TEST_CASE("property: jittered Gram matrices factorize") {
  std::mt19937_64 rng(17);
  const char* specs[] = {"kMaternISO3", "kMaternISO5", "kSEISO", "kRQISO"};
  for (const char* s : specs) {
    const KernelSpec k = kernel(s);
    for (std::size_t n : {5u, 50u, 200u}) {
      Matrix X(n, 2);
      for (std::size_t i = 0; i < n; ++i)
        for (double& v : X.row(i)) v = std::uniform_real_distribution<double>(0, 1)(rng);
      HyperParams hp{std::vector<double>(k.n_params(), 0.3)};
      Matrix G = gram_matrix(k, hp, X);
      for (std::size_t i = 0; i < n; ++i) G(i, i) += 1e-10;
      CAPTURE(s);
      CAPTURE(n);
      CHECK_NOTHROW(cholesky(G));
    }
  }
}

TEST_SUITE_END();
