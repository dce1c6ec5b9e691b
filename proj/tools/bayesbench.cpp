// bayesbench: optimization-gap experiments on standard benchmarks, and a
// driver that optimizes an external command.

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "bopt/bench.hpp"
#include "bopt/errors.hpp"
#include "bopt/optimizer.hpp"
#include "bopt/params.hpp"

namespace {

// Runs `command` through /bin/sh, writes the point to its stdin and parses a
// single number from its stdout.
double evaluate_command(const std::string& command, std::span<const double> x) {
  int to_child[2];
  int from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0)
    throw bopt::Error(std::string("pipe failed: ") + std::strerror(errno));

  const pid_t pid = fork();
  if (pid < 0) throw bopt::Error(std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);

  std::ostringstream line;
  line << std::setprecision(17);
  for (std::size_t i = 0; i < x.size(); ++i) line << (i ? " " : "") << x[i];
  line << '\n';
  const std::string payload = line.str();
  std::size_t written = 0;
  while (written < payload.size()) {
    const ssize_t n = write(to_child[1], payload.data() + written, payload.size() - written);
    if (n <= 0) break;
    written += static_cast<std::size_t>(n);
  }
  close(to_child[1]);

  std::string output;
  char buf[4096];
  ssize_t n;
  while ((n = read(from_child[0], buf, sizeof(buf))) > 0) output.append(buf, static_cast<std::size_t>(n));
  close(from_child[0]);

  int status = 0;
  waitpid(pid, &status, 0);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
    throw bopt::Error("target command failed with status " + std::to_string(status));
  std::istringstream in(output);
  double value;
  if (!(in >> value)) throw bopt::Error("target command did not print a number: '" + output + "'");
  return value;
}

std::vector<std::size_t> default_checkpoints(const bopt::Params& p) {
  const auto total = static_cast<std::size_t>(p.n_init_samples + p.n_iterations);
  if (total > 50) return {50, total};
  return {total};
}

int cmd_run(const std::string& config_path, const std::string& function, std::size_t runs,
            std::uint64_t seed, std::vector<std::size_t> checkpoints, const std::string& out_path,
            int budget, unsigned threads, bool deterministic, std::string label) {
  bopt::Params params = bopt::load_params(config_path);
  if (budget > 0) {
    if (budget < params.n_init_samples)
      throw bopt::RangeError("--budget is smaller than n_init_samples");
    params.n_iterations = budget - params.n_init_samples;
  }
  if (checkpoints.empty()) checkpoints = default_checkpoints(params);
  if (label.empty()) label = std::filesystem::path(config_path).stem().string();
  const bopt::bench::Benchmark bench = bopt::bench::get_benchmark(function);

  bopt::bench::ExperimentOptions options{label, threads, deterministic};
  const bopt::bench::Experiment exp =
      bopt::bench::run_experiment(params, bench, runs, seed, checkpoints, options);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw bopt::Error("cannot write '" + out_path + "'");
    bopt::bench::write_csv(out, exp, deterministic);
  }
  std::cout << function << " (f* = " << std::setprecision(10) << bench.f_star << "), "
            << runs << " run(s), init design " << bopt::to_string(params.init_method) << "\n";
  bopt::bench::print_table(std::cout, {exp.row});
  return 0;
}

int cmd_table(const std::vector<std::string>& inputs, const std::vector<std::size_t>& checkpoints) {
  std::vector<bopt::bench::GapRow> rows;
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) throw bopt::Error("cannot read '" + path + "'");
    rows.push_back(
        bopt::bench::summarize_csv(in, checkpoints, std::filesystem::path(path).stem().string()));
  }
  bopt::bench::print_table(std::cout, rows);
  return 0;
}

int cmd_optimize(const std::string& config_path, std::size_t dim, const std::vector<double>& lower,
                 const std::vector<double>& upper, const std::string& target_cmd,
                 std::optional<std::uint64_t> seed, const std::string& out_path) {
  bopt::Params params = config_path.empty() ? bopt::default_params() : bopt::load_params(config_path);
  if (seed) params.random_seed = *seed;
  if (lower.size() != dim || upper.size() != dim)
    throw bopt::DimensionMismatch("--lower and --upper need " + std::to_string(dim) + " values");
  bopt::Problem problem{dim, {lower, upper},
                        [&](std::span<const double> x) { return evaluate_command(target_cmd, x); },
                        {}};
  bopt::Optimizer opt(problem, params);
  const bopt::OptResult result = opt.run();

  if (!out_path.empty()) {
    std::ofstream out(out_path);
    out << "iteration,eval_index";
    for (std::size_t j = 0; j < dim; ++j) out << ",x_" << j;
    out << ",y,y_best,criterion\n" << std::setprecision(17);
    for (const auto& rec : result.history) {
      out << rec.iteration << ',' << rec.eval_index;
      for (double v : rec.x) out << ',' << v;
      out << ',' << rec.y << ',' << rec.y_best << ',' << rec.criterion << '\n';
    }
  }
  std::cout << std::setprecision(17) << "x_best =";
  for (double v : result.x_best) std::cout << ' ' << v;
  std::cout << "\ny_best = " << result.y_best << "\nevaluations = " << result.n_evals << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian optimization benchmarks and external-target driver"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run repeated optimizations on a benchmark function");
  std::string config_path, function, out_path, label;
  std::size_t runs = 10;
  std::uint64_t seed = 0;
  std::vector<std::size_t> checkpoints;
  int budget = 0;
  unsigned threads = 1;
  bool deterministic = false;
  run->add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
  run->add_option("--function", function, "Benchmark function")
      ->required()
      ->check(CLI::IsMember({"branin", "camelback", "hartmann6"}));
  run->add_option("--runs", runs, "Number of seeded runs");
  run->add_option("--seed", seed, "Seed of the first run (run i uses seed + i)");
  run->add_option("--checkpoints", checkpoints, "Sample counts at which to report the gap")
      ->delimiter(',');
  run->add_option("--out", out_path, "Per-evaluation CSV output");
  run->add_option("--budget", budget, "Total evaluations (overrides n_iterations)");
  run->add_option("--threads", threads, "Runs executed in parallel");
  run->add_option("--label", label, "Row label (defaults to the config file name)");
  run->add_flag("--deterministic", deterministic, "Write elapsed_ms as 0 for byte-identical CSVs");

  auto* table = app.add_subcommand("table", "Summarize result CSVs as mean (std) gaps");
  std::vector<std::string> inputs;
  std::vector<std::size_t> table_checkpoints = {50, 200};
  table->add_option("--in", inputs, "Result CSV file(s)")->required()->check(CLI::ExistingFile);
  table->add_option("--checkpoints", table_checkpoints, "Sample counts")->delimiter(',');

  auto* optimize = app.add_subcommand("optimize", "Minimize an external command");
  std::string opt_config, target_cmd, opt_out;
  std::size_t dim = 0;
  std::vector<double> lower, upper;
  std::optional<std::uint64_t> opt_seed;
  optimize->add_option("--config", opt_config, "Configuration file")->check(CLI::ExistingFile);
  optimize->add_option("--dim", dim, "Input dimension")->required();
  optimize->add_option("--lower", lower, "Lower bounds")->required()->delimiter(',');
  optimize->add_option("--upper", upper, "Upper bounds")->required()->delimiter(',');
  optimize->add_option("--target-cmd", target_cmd,
                       "Command reading coordinates on stdin and printing the value")
      ->required();
  optimize->add_option("--seed", opt_seed, "Random seed (overrides the config)");
  optimize->add_option("--out", opt_out, "History CSV output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run)
      return cmd_run(config_path, function, runs, seed, checkpoints, out_path, budget, threads,
                     deterministic, label);
    if (*table) return cmd_table(inputs, table_checkpoints);
    if (*optimize)
      return cmd_optimize(opt_config, dim, lower, upper, target_cmd, opt_seed, opt_out);
  } catch (const std::exception& e) {
    std::cerr << "bayesbench: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
