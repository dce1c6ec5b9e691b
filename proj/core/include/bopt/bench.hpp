#ifndef BOPT_BENCH_HPP
#define BOPT_BENCH_HPP

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bopt/inner_opt.hpp"
#include "bopt/optimizer.hpp"
#include "bopt/params.hpp"

namespace bopt::bench {

/// Standard Branin on [-5, 10] x [0, 15].
double branin(std::span<const double> x);
/// Six-hump camel on [-3, 3] x [-2, 2].
double camelback(std::span<const double> x);
/// Hartmann-6 on [0, 1]^6.
double hartmann6(std::span<const double> x);

struct Benchmark {
  std::string name;
  Box box;
  double f_star = 0.0;  // global minimum value
  std::function<double(std::span<const double>)> evaluate;

  std::size_t dim() const noexcept { return box.dim(); }
};

/// One of "branin", "camelback", "hartmann6"; throws UnknownIdentifier otherwise.
Benchmark get_benchmark(const std::string& name);

/// y_best - f_star, floored at zero.
double gap(double y_best, const Benchmark& bench);

/// Mean and standard deviation of the gap at each checkpoint.
struct GapRow {
  std::string benchmark;
  std::string label;
  std::vector<std::size_t> checkpoints;
  std::vector<double> mean_gap;
  std::vector<double> std_gap;
  double mean_time_s = 0.0;
  double std_time_s = 0.0;
  std::size_t n_runs = 0;
};

struct RunTrace {
  std::size_t run_id = 0;
  History history;
  double wall_time_s = 0.0;
};

struct ExperimentOptions {
  std::string label;
  unsigned threads = 1;
  /// Writes elapsed_ms as 0 so that repeated experiments are byte-identical.
  bool zero_timing = false;
};

struct Experiment {
  GapRow row;
  std::vector<RunTrace> runs;
  std::size_t dim = 0;
  double f_star = 0.0;
};

/// Runs n_runs optimizations with seeds base_seed + i and aggregates the gap
/// of the best value among the first c evaluations for every checkpoint c.
Experiment run_experiment(const Params& config, const Benchmark& bench, std::size_t n_runs,
                          std::uint64_t base_seed, const std::vector<std::size_t>& checkpoints,
                          const ExperimentOptions& options = {});

/// Per-evaluation CSV:
/// run_id,iteration,eval_index,x_0..x_{d-1},y,y_best,gap,elapsed_ms
void write_csv(std::ostream& out, const Experiment& experiment, bool zero_timing = false);

/// Rebuilds gap statistics from a CSV written by write_csv().
GapRow summarize_csv(std::istream& in, const std::vector<std::size_t>& checkpoints,
                     const std::string& label);

/// Table with one "mean (std)" cell per checkpoint plus the wall time.
void print_table(std::ostream& out, const std::vector<GapRow>& rows);

double mean(std::span<const double> v);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double stddev(std::span<const double> v);

}  // namespace bopt::bench

#endif  // BOPT_BENCH_HPP
