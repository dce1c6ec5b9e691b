#include "bopt/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "bopt/errors.hpp"

namespace bopt::bench {

double branin(std::span<const double> x) {
  constexpr double pi = std::numbers::pi;
  const double b = 5.1 / (4.0 * pi * pi);
  const double c = 5.0 / pi;
  const double t = 1.0 / (8.0 * pi);
  const double u = x[1] - b * x[0] * x[0] + c * x[0] - 6.0;
  return u * u + 10.0 * (1.0 - t) * std::cos(x[0]) + 10.0;
}

double camelback(std::span<const double> x) {
  const double x1 = x[0], x2 = x[1];
  const double x1s = x1 * x1, x2s = x2 * x2;
  return (4.0 - 2.1 * x1s + x1s * x1s / 3.0) * x1s + x1 * x2 + (-4.0 + 4.0 * x2s) * x2s;
}

double hartmann6(std::span<const double> x) {
  static constexpr double alpha[4] = {1.0, 1.2, 3.0, 3.2};
  static constexpr double A[4][6] = {{10, 3, 17, 3.5, 1.7, 8},
                                     {0.05, 10, 17, 0.1, 8, 14},
                                     {3, 3.5, 1.7, 10, 17, 8},
                                     {17, 8, 0.05, 10, 0.1, 14}};
  static constexpr double P[4][6] = {{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                                     {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                                     {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                                     {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < 6; ++j) {
      const double d = x[j] - P[i][j];
      inner += A[i][j] * d * d;
    }
    sum += alpha[i] * std::exp(-inner);
  }
  return -sum;
}

Benchmark get_benchmark(const std::string& name) {
  if (name == "branin") return {name, {{-5.0, 0.0}, {10.0, 15.0}}, 0.39788735772973816, branin};
  if (name == "camelback")
    return {name, {{-3.0, -2.0}, {3.0, 2.0}}, -1.0316284534898774, camelback};
  if (name == "hartmann6")
    return {name, Box::unit(6), -3.3223680114155147, hartmann6};
  throw UnknownIdentifier("unknown benchmark '" + name + "'");
}

double gap(double y_best, const Benchmark& bench) {
  return std::max(y_best - bench.f_star, 0.0);
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

namespace {

double best_within(const History& history, std::size_t count) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < std::min(count, history.size()); ++i)
    best = std::min(best, history[i].y);
  return best;
}

GapRow aggregate(const std::string& benchmark, const std::string& label,
                 const std::vector<std::size_t>& checkpoints,
                 const std::vector<std::vector<double>>& gaps_per_run,
                 const std::vector<double>& times) {
  GapRow row;
  row.benchmark = benchmark;
  row.label = label;
  row.checkpoints = checkpoints;
  row.n_runs = gaps_per_run.size();
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    std::vector<double> at;
    for (const auto& g : gaps_per_run) at.push_back(g[c]);
    row.mean_gap.push_back(mean(at));
    row.std_gap.push_back(stddev(at));
  }
  row.mean_time_s = mean(times);
  row.std_time_s = stddev(times);
  return row;
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Experiment run_experiment(const Params& config, const Benchmark& bench, std::size_t n_runs,
                          std::uint64_t base_seed, const std::vector<std::size_t>& checkpoints,
                          const ExperimentOptions& options) {
  const std::size_t total =
      static_cast<std::size_t>(config.n_init_samples) + static_cast<std::size_t>(config.n_iterations);
  for (std::size_t c : checkpoints)
    if (c == 0 || c > total)
      throw RangeError("checkpoint " + std::to_string(c) + " is outside 1.." +
                       std::to_string(total));

  Experiment exp;
  exp.dim = bench.dim();
  exp.f_star = bench.f_star;
  exp.runs.resize(n_runs);
  std::vector<std::exception_ptr> errors(n_runs);

  auto do_run = [&](std::size_t i) {
    try {
      Params p = config;
      p.random_seed = base_seed + i;
      Problem problem{bench.dim(), bench.box, bench.evaluate, {}};
      const auto t0 = std::chrono::steady_clock::now();
      Optimizer opt(problem, p);
      OptResult result = opt.run();
      const auto t1 = std::chrono::steady_clock::now();
      exp.runs[i] = {i, std::move(result.history), std::chrono::duration<double>(t1 - t0).count()};
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, n_runs));
  if (threads == 1) {
    for (std::size_t i = 0; i < n_runs; ++i) do_run(i);
  } else {
    std::vector<std::thread> pool;
    std::mutex mu;
    std::size_t next = 0;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        while (true) {
          std::size_t i;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= n_runs) return;
            i = next++;
          }
          do_run(i);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < n_runs; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw Error("run " + std::to_string(i) + " (seed " + std::to_string(base_seed + i) +
                  ") failed: " + e.what());
    }
  }

  std::vector<std::vector<double>> gaps;
  std::vector<double> times;
  for (const auto& run : exp.runs) {
    std::vector<double> g;
    for (std::size_t c : checkpoints) g.push_back(gap(best_within(run.history, c), bench));
    gaps.push_back(std::move(g));
    times.push_back(run.wall_time_s);
  }
  exp.row = aggregate(bench.name, options.label, checkpoints, gaps, times);
  return exp;
}

void write_csv(std::ostream& out, const Experiment& experiment, bool zero_timing) {
  out << "run_id,iteration,eval_index";
  for (std::size_t j = 0; j < experiment.dim; ++j) out << ",x_" << j;
  out << ",y,y_best,gap,elapsed_ms\n";
  for (const auto& run : experiment.runs) {
    for (const auto& rec : run.history) {
      out << run.run_id << ',' << rec.iteration << ',' << rec.eval_index;
      for (double v : rec.x) out << ',' << fmt(v);
      out << ',' << fmt(rec.y) << ',' << fmt(rec.y_best) << ','
          << fmt(std::max(rec.y_best - experiment.f_star, 0.0)) << ','
          << fmt(zero_timing ? 0.0 : rec.elapsed_ms) << '\n';
    }
  }
}

GapRow summarize_csv(std::istream& in, const std::vector<std::size_t>& checkpoints,
                     const std::string& label) {
  std::string line;
  if (!std::getline(in, line)) throw Error("empty results file");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error("results file lacks column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_run = column("run_id"), c_eval = column("eval_index"),
                    c_gap = column("gap"), c_time = column("elapsed_ms");

  struct RunData {
    std::map<std::size_t, double> gap_at;  // eval_index -> gap of best so far
    double last_ms = 0.0;
  };
  std::map<std::size_t, RunData> runs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) throw Error("malformed results row: " + line);
    RunData& rd = runs[std::stoul(cells[c_run])];
    rd.gap_at[std::stoul(cells[c_eval])] = std::stod(cells[c_gap]);
    rd.last_ms = std::max(rd.last_ms, std::stod(cells[c_time]));
  }

  std::vector<std::vector<double>> gaps;
  std::vector<double> times;
  for (const auto& [id, rd] : runs) {
    std::vector<double> g;
    for (std::size_t c : checkpoints) {
      auto it = rd.gap_at.find(c - 1);
      if (it == rd.gap_at.end())
        throw RangeError("run " + std::to_string(id) + " has fewer than " + std::to_string(c) +
                         " evaluations");
      g.push_back(it->second);
    }
    gaps.push_back(std::move(g));
    times.push_back(rd.last_ms / 1000.0);
  }
  return aggregate("", label, checkpoints, gaps, times);
}

void print_table(std::ostream& out, const std::vector<GapRow>& rows) {
  if (rows.empty()) return;
  std::size_t label_width = 10;
  for (const auto& r : rows)
    label_width = std::max(label_width, (r.benchmark.empty() ? r.label : r.benchmark + " " + r.label).size());
  out << std::left << std::setw(static_cast<int>(label_width)) << "config";
  for (std::size_t c : rows.front().checkpoints)
    out << " | " << std::setw(18) << ("Gap " + std::to_string(c) + " samp.");
  out << " | Time (s)\n";
  for (const auto& r : rows) {
    const std::string name = r.benchmark.empty() ? r.label : r.benchmark + " " + r.label;
    out << std::left << std::setw(static_cast<int>(label_width)) << name;
    for (std::size_t k = 0; k < r.checkpoints.size(); ++k) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(5) << r.mean_gap[k] << " (" << std::setprecision(3)
           << r.std_gap[k] << ")";
      out << " | " << std::setw(18) << cell.str();
    }
    std::ostringstream t;
    t << std::fixed << std::setprecision(1) << r.mean_time_s << " (" << std::setprecision(2)
      << r.std_time_s << ")";
    out << " | " << t.str() << '\n';
  }
}

}  // namespace bopt::bench
