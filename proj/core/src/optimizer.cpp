#include "bopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "bopt/errors.hpp"
#include "bopt/init_design.hpp"

namespace bopt {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kDuplicateTol = 1e-8;
constexpr double kDuplicatePerturbation = 1e-3;
constexpr int kRandomProposalTries = 1000;
}  // namespace

Optimizer::Optimizer(Problem problem, Params params)
    : problem_(std::move(problem)), params_(std::move(params)) {
  validate(params_);
  problem_.box.check();
  if (problem_.dim == 0) problem_.dim = problem_.box.dim();
  if (problem_.dim != problem_.box.dim())
    throw DimensionMismatch("problem dimension does not match its box");
  if (!problem_.evaluate) throw Error("problem has no target function");
  config_ = std::make_shared<const SurrogateConfig>(
      SurrogateConfig::from_params(params_, problem_.dim));
  criterion_ = CriterionSpec::from_tree(parse_expression(params_.crit_name));
  hedge_ = HedgeState::uniform(criterion_.leaves().size(), params_.hedge_eta);
  rng_.seed(params_.random_seed);
  data_.X = Matrix(0, problem_.dim);
  start_ = std::chrono::steady_clock::now();
}

bool Optimizer::finished() const noexcept {
  return initialized_ && steps_done_ >= params_.n_iterations;
}

double Optimizer::elapsed_ms() const {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
      .count();
}

bool Optimizer::is_reachable(std::span<const double> u) const {
  if (!problem_.reachable) return true;
  return problem_.reachable(scale(u, problem_.box));
}

void Optimizer::generate_design() {
  const std::size_t n = static_cast<std::size_t>(params_.n_init_samples);
  const std::size_t d = problem_.dim;
  Matrix design = initial_design(params_.init_method, n, d, rng_);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::size_t attempts = 0;
  const std::size_t cap = 100 * n;
  for (std::size_t i = 0; i < n; ++i) {
    while (!is_reachable(design.row(i))) {
      if (++attempts > cap)
        throw InitDesignInfeasible("could not draw " + std::to_string(n) +
                                   " reachable initial points in " + std::to_string(cap) +
                                   " attempts");
      for (double& v : design.row(i)) v = unif(rng_);
    }
  }
  design_ = std::move(design);
  design_next_ = 0;
}

void Optimizer::initialize() {
  if (initialized_) return;
  if (design_.empty()) generate_design();
  while (!initialized_) {
    Point x = propose();
    const double y = problem_.evaluate(x);
    tell(x, y);
  }
}

HistoryRecord Optimizer::step() {
  if (!initialized_) initialize();
  if (finished()) throw Error("evaluation budget exhausted");
  Point x = propose();
  const double y = problem_.evaluate(x);
  return tell(x, y);
}

OptResult Optimizer::run() {
  initialize();
  while (!finished()) step();
  return result();
}

OptResult Optimizer::result() const {
  OptResult out;
  out.history = history_;
  out.n_evals = data_.size();
  out.y_best = std::numeric_limits<double>::infinity();
  for (const auto& rec : history_) {
    if (rec.y < out.y_best) {
      out.y_best = rec.y;
      out.x_best = rec.x;
    }
  }
  return out;
}

double Optimizer::centered_best() const {
  return *std::min_element(data_.y.begin(), data_.y.end()) - y_offset_;
}

std::vector<double> Optimizer::theta_mean() const {
  std::vector<double> mean;
  if (theta_.particles.empty()) return mean;
  mean.assign(theta_.particles.front().theta.size(), 0.0);
  for (const auto& hp : theta_.particles)
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += hp.theta[j];
  for (double& v : mean) v /= static_cast<double>(theta_.particles.size());
  return mean;
}

void Optimizer::relearn() {
  y_offset_ = 0.0;
  if (config_->basis.p() == 0) {
    for (double v : data_.y) y_offset_ += v;
    y_offset_ /= static_cast<double>(data_.size());
  }
  Dataset centered = data_;
  for (double& v : centered.y) v -= y_offset_;

  SurrogateConfig learn_config = *config_;
  if (params_.l_type == LearningType::ML) learn_config.sc_type = ScoreType::SC_ML;
  if (params_.l_type == LearningType::MAP) learn_config.sc_type = ScoreType::SC_MAP;

  if (centered.size() < 2) {
    theta_ = {{prior_mean_theta(params_)}, 0};
  } else if (params_.l_type == LearningType::MCMC) {
    std::optional<HyperParams> start;
    if (!theta_.particles.empty()) start = theta_.particles.back();
    theta_ = learn_mcmc(learn_config, centered, params_, rng_, start);
  } else {
    theta_ = learn_point(learn_config, centered, params_);
  }
  ++stats_.relearns;
  refit();
}

void Optimizer::refit() {
  states_ = refit_posterior();
  ++stats_.full_refits;
}

std::vector<PosteriorState> Optimizer::refit_posterior() const {
  Dataset centered = data_;
  for (double& v : centered.y) v -= y_offset_;
  std::vector<PosteriorState> states;
  states.reserve(theta_.particles.size());
  for (const auto& hp : theta_.particles) states.push_back(fit(config_, centered, hp));
  return states;
}

Predictive Optimizer::predict(std::span<const double> x) const {
  if (states_.empty()) throw Error("optimizer has no posterior yet");
  const Point u = unscale(x, problem_.box);
  Predictive out{0.0, 0.0, states_.front().dof};
  for (const auto& s : states_) {
    const Predictive p = bopt::predict(s, u);
    out.mean += p.mean;
    out.scale += p.scale;
  }
  out.mean = out.mean / static_cast<double>(states_.size()) + y_offset_;
  out.scale /= static_cast<double>(states_.size());
  return out;
}

Point Optimizer::random_reachable(Rng& rng, int max_tries, bool& found) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Point u(problem_.dim);
  for (int t = 0; t < max_tries; ++t) {
    for (double& v : u) v = unif(rng);
    if (is_reachable(u)) {
      found = true;
      return u;
    }
  }
  found = false;
  return u;
}

Point Optimizer::avoid_duplicates(Point u, Rng& rng) const {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    auto row = data_.X.row(i);
    double dist = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) dist = std::max(dist, std::abs(row[j] - u[j]));
    if (dist > kDuplicateTol) continue;
    std::uniform_real_distribution<double> unif(-0.5 * kDuplicatePerturbation,
                                                0.5 * kDuplicatePerturbation);
    Point moved = u;
    for (double& v : moved) v = std::clamp(v + unif(rng), 0.0, 1.0);
    return is_reachable(moved) ? moved : u;
  }
  return u;
}

Maximum Optimizer::maximize_criterion(CriterionLeaf leaf, double y_best_centered,
                                      Rng& rng) const {
  Objective f = [&](std::span<const double> u) {
    if (!is_reachable(u)) return kNegInf;
    return crit_eval(leaf, states_, u, y_best_centered, params_, rng);
  };
  return maximize(f, Box::unit(problem_.dim),
                  {params_.n_inner_global_evals, params_.n_inner_local_evals});
}

Point Optimizer::propose() {
  if (pending_) return pending_->x;

  if (!initialized_) {
    if (design_.empty()) generate_design();
    Point u(design_.row(design_next_).begin(), design_.row(design_next_).end());
    Point x = scale(u, problem_.box);
    pending_ = Pending{std::move(u), x, "init", {}};
    return x;
  }

  const int k = steps_done_;
  pending_relearned_ = false;
  if (k > 0 && relearn_due(k, params_) && learned_at_step_ != k) {
    relearn();
    learned_at_step_ = k;
    pending_relearned_ = true;
  }
  const std::uint64_t factorizations_before = linalg_stats().full_factorizations;

  Rng iter_rng(rng_());
  Pending next;
  bool chosen = false;
  if (epsilon_override(params_, iter_rng)) {
    next.u = random_reachable(iter_rng, kRandomProposalTries, chosen);
    next.criterion = "epsilon";
  }
  if (!chosen) {
    const double y_best = centered_best();
    const auto& leaves = criterion_.leaves();
    if (criterion_.is_hedge()) {
      for (CriterionLeaf leaf : leaves) {
        Maximum m = maximize_criterion(leaf, y_best, iter_rng);
        next.nominees.push_back(m.x);
      }
      const std::size_t pick = hedge_select(hedge_, iter_rng);
      next.u = next.nominees[pick];
      next.criterion = std::string(criterion_name(leaves[pick]));
      chosen = is_reachable(next.u);
    } else {
      Maximum m = maximize_criterion(leaves.front(), y_best, iter_rng);
      next.u = m.x;
      next.criterion = std::string(criterion_name(leaves.front()));
      chosen = m.value != kNegInf;
    }
    if (!chosen) {
      next.u = random_reachable(iter_rng, kRandomProposalTries, chosen);
      next.nominees.clear();
      next.criterion = "random";
      if (!chosen) throw NoFeasibleProposal("no reachable point found for the next proposal");
    }
  }
  next.u = avoid_duplicates(std::move(next.u), iter_rng);
  next.x = scale(next.u, problem_.box);
  pending_ = std::move(next);
  if (!pending_relearned_)
    stats_.factorizations_outside_relearn +=
        linalg_stats().full_factorizations - factorizations_before;
  return pending_->x;
}

HistoryRecord Optimizer::tell(std::span<const double> x, double y) {
  if (!pending_) throw OutOfOrder("tell() called without a pending proposal");
  if (x.size() != pending_->x.size() || !std::equal(x.begin(), x.end(), pending_->x.begin()))
    throw OutOfOrder("tell() point does not match the pending proposal");
  if (!std::isfinite(y)) throw RangeError("observed value must be finite");

  HistoryRecord rec;
  rec.x = pending_->x;
  rec.y = y;
  rec.criterion = pending_->criterion;

  if (!initialized_) {
    const Dataset before = data_;
    data_.add(pending_->u, y);
    rec.iteration = 0;
    if (design_next_ + 1 == static_cast<std::size_t>(params_.n_init_samples)) {
      try {
        relearn();
      } catch (...) {
        data_ = before;
        throw;
      }
      initialized_ = true;
      learned_at_step_ = 0;
    }
    ++design_next_;
  } else {
    const std::uint64_t factorizations_before = linalg_stats().full_factorizations;
    std::vector<PosteriorState> next;
    next.reserve(states_.size());
    for (const auto& s : states_) next.push_back(update(s, pending_->u, y - y_offset_));
    data_.add(pending_->u, y);
    states_ = std::move(next);
    ++stats_.incremental_updates;
    if (!pending_->nominees.empty()) {
      std::vector<double> rewards;
      for (const auto& u : pending_->nominees) {
        double mean = 0.0;
        for (const auto& s : states_) mean += bopt::predict(s, u).mean;
        rewards.push_back(-(mean / static_cast<double>(states_.size()) + y_offset_));
      }
      hedge_ = hedge_update(hedge_, rewards);
    }
    stats_.factorizations_outside_relearn +=
        linalg_stats().full_factorizations - factorizations_before;
    ++steps_done_;
    rec.iteration = steps_done_;
  }

  rec.eval_index = data_.size() - 1;
  rec.y_best = history_.empty() ? y : std::min(history_.back().y_best, y);
  rec.theta = theta_mean();
  rec.elapsed_ms = elapsed_ms();
  history_.push_back(rec);
  pending_.reset();

  if (params_.verbose != Verbosity::quiet) {
    std::cerr << "[bopt] eval " << rec.eval_index << " iter " << rec.iteration << " ("
              << rec.criterion << ") y = " << rec.y << " best = " << rec.y_best << '\n';
  }
  return rec;
}

}  // namespace bopt
