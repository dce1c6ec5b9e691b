#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "bopt/bench.hpp"
#include "bopt/inner_opt.hpp"
#include "bopt/kernels.hpp"
#include "bopt/linalg.hpp"
#include "bopt/params.hpp"
#include "bopt/surrogate.hpp"

namespace {

bopt::Matrix spd(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bopt::Matrix X(n, 3);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 3; ++j) X(i, j) = u(rng);
  bopt::Params p = bopt::default_params();
  p.kernel_name = "kSEISO";
  const auto cfg = bopt::SurrogateConfig::from_params(p, 3);
  bopt::Matrix K = bopt::gram_matrix(cfg.kernel, {{0.3}}, X);
  for (std::size_t i = 0; i < n; ++i) K(i, i) += 1e-2;
  return K;
}

bopt::Matrix leading(const bopt::Matrix& A, std::size_t n) {
  bopt::Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = A(i, j);
  return out;
}

void BM_Cholesky(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const bopt::Matrix A = spd(n);
  for (auto _ : state) benchmark::DoNotOptimize(bopt::cholesky(A));
}
BENCHMARK(BM_Cholesky)->Arg(101)->Arg(201)->Arg(501);

void BM_CholAppend(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const bopt::Matrix A = spd(n + 1);
  const bopt::CholFactor base = bopt::cholesky(leading(A, n));
  std::vector<double> cross(n);
  for (std::size_t i = 0; i < n; ++i) cross[i] = A(n, i);
  for (auto _ : state) benchmark::DoNotOptimize(bopt::chol_append(base, cross, A(n, n)));
}
BENCHMARK(BM_CholAppend)->Arg(100)->Arg(200)->Arg(500);

void BM_Predict(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bopt::Dataset data;
  data.X = bopt::Matrix(0, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> x{u(rng), u(rng)};
    data.add(x, std::sin(5.0 * x[0]) + x[1]);
  }
  const bopt::Params p = bopt::default_params();
  const auto cfg = std::make_shared<const bopt::SurrogateConfig>(bopt::SurrogateConfig::from_params(p, 2));
  const bopt::PosteriorState s = bopt::fit(cfg, data, {{0.3}});
  const std::vector<double> xq{0.4, 0.6};
  for (auto _ : state) benchmark::DoNotOptimize(bopt::predict(s, xq));
}
BENCHMARK(BM_Predict)->Arg(50)->Arg(200);

void BM_DirectBranin(benchmark::State& state) {
  const bopt::bench::Benchmark b = bopt::bench::get_benchmark("branin");
  const bopt::Objective f = [&](std::span<const double> x) { return -b.evaluate(x); };
  for (auto _ : state) benchmark::DoNotOptimize(bopt::direct_maximize(f, b.box, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_DirectBranin)->Arg(500)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
