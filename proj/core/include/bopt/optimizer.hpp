#ifndef BOPT_OPTIMIZER_HPP
#define BOPT_OPTIMIZER_HPP

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bopt/criteria.hpp"
#include "bopt/inner_opt.hpp"
#include "bopt/learning.hpp"
#include "bopt/params.hpp"
#include "bopt/surrogate.hpp"

namespace bopt {

/// Minimization problem over a box. `reachable` is optional; when empty every
/// point in the box is reachable.
struct Problem {
  std::size_t dim = 0;
  Box box;
  std::function<double(std::span<const double>)> evaluate;
  std::function<bool(std::span<const double>)> reachable;
};

struct HistoryRecord {
  int iteration = 0;  // 0 for initial-design points, then 1, 2, ...
  std::size_t eval_index = 0;
  Point x;
  double y = 0.0;
  double y_best = 0.0;
  std::string criterion;       // "init", "epsilon", or the criterion that nominated x
  std::vector<double> theta;   // particle mean of the kernel parameters in use
  double elapsed_ms = 0.0;     // since the optimizer was created
};

using History = std::vector<HistoryRecord>;

struct OptResult {
  Point x_best;
  double y_best = 0.0;
  History history;
  std::size_t n_evals = 0;
};

/// Instrumentation counters.
struct OptimizerStats {
  std::size_t relearns = 0;              // includes the one at initialization
  std::size_t full_refits = 0;           // posterior rebuilt from scratch
  std::size_t incremental_updates = 0;   // posterior extended by one point
  std::size_t factorizations_outside_relearn = 0;
};

/// Sequential model-based minimizer.
///
/// Each iteration relearns the kernel parameters when due (refitting the
/// posterior from scratch), proposes the maximizer of the acquisition
/// criterion, evaluates it and extends the posterior in O(n^2).
///
/// The stepping interface can be driven externally with propose()/tell().
/// A throwing target leaves the optimizer unchanged apart from the random
/// stream; the same proposal is returned again by the next propose().
class Optimizer {
 public:
  /// Parses and validates all expression fields; throws before any evaluation.
  Optimizer(Problem problem, Params params);

  /// Evaluates the initial design and fits the first posterior.
  /// Throws InitDesignInfeasible if no reachable design can be drawn.
  void initialize();

  /// One full iteration: propose, evaluate, tell.
  HistoryRecord step();

  /// Runs until n_init_samples + n_iterations evaluations have been made.
  OptResult run();

  /// Next point to evaluate (in problem coordinates). Repeated calls without
  /// tell() return the same point.
  Point propose();

  /// Reports the value at the last proposed point. Throws OutOfOrder if there
  /// is no pending proposal or x differs from it.
  HistoryRecord tell(std::span<const double> x, double y);

  bool initialized() const noexcept { return initialized_; }
  bool finished() const noexcept;
  std::size_t n_evals() const noexcept { return data_.size(); }
  const History& history() const noexcept { return history_; }
  const OptimizerStats& stats() const noexcept { return stats_; }
  const Params& params() const noexcept { return params_; }
  const ThetaPosterior& theta() const noexcept { return theta_; }

  /// Observations, with inputs normalized to the unit cube.
  const Dataset& dataset() const noexcept { return data_; }
  /// Current posterior, one state per theta particle, fitted to centered responses.
  const std::vector<PosteriorState>& posterior() const noexcept { return states_; }
  /// Same posterior rebuilt from scratch with the current theta.
  std::vector<PosteriorState> refit_posterior() const;
  /// Particle-averaged predictive mean/scale at a point in problem coordinates.
  Predictive predict(std::span<const double> x) const;

  OptResult result() const;

 private:
  struct Pending {
    Point u;  // unit-cube coordinates
    Point x;  // problem coordinates
    std::string criterion;
    std::vector<Point> nominees;  // GP-Hedge nominees (unit cube)
  };

  bool is_reachable(std::span<const double> u) const;
  void generate_design();
  void relearn();
  void refit();
  Point random_reachable(Rng& rng, int max_tries, bool& found) const;
  Point avoid_duplicates(Point u, Rng& rng) const;
  Maximum maximize_criterion(CriterionLeaf leaf, double y_best_centered, Rng& rng) const;
  double centered_best() const;
  std::vector<double> theta_mean() const;
  double elapsed_ms() const;

  Problem problem_;
  Params params_;
  std::shared_ptr<const SurrogateConfig> config_;
  CriterionSpec criterion_;
  Rng rng_;

  Dataset data_;  // unit-cube inputs, raw responses
  Matrix design_;
  std::size_t design_next_ = 0;
  bool initialized_ = false;
  int steps_done_ = 0;
  int learned_at_step_ = -1;

  ThetaPosterior theta_;
  std::vector<PosteriorState> states_;
  double y_offset_ = 0.0;
  HedgeState hedge_;

  std::optional<Pending> pending_;
  bool pending_relearned_ = false;
  History history_;
  OptimizerStats stats_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace bopt

#endif  // BOPT_OPTIMIZER_HPP
