#include "bopt/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bopt/errors.hpp"

namespace bopt {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogThetaMin = std::log(1e-4);
const double kLogThetaMax = std::log(1e4);

HyperParams from_log(std::span<const double> u) {
  HyperParams hp;
  hp.theta.reserve(u.size());
  for (double v : u) hp.theta.push_back(std::exp(v));
  return hp;
}
}  // namespace

Box log_theta_box(const Params& params) {
  Box box;
  for (std::size_t j = 0; j < params.kernel_hp_mean.size(); ++j) {
    const double center = std::log(params.kernel_hp_mean[j]);
    const double half = 3.0 * params.kernel_hp_std[j];
    double lo = std::clamp(center - half, kLogThetaMin, kLogThetaMax);
    double hi = std::clamp(center + half, kLogThetaMin, kLogThetaMax);
    if (!(lo < hi)) {
      // Prior mean outside the clamp range; keep a thin box around the clamp edge.
      lo = std::min(lo, kLogThetaMax - 1e-3);
      hi = lo + 1e-3;
    }
    box.lower.push_back(lo);
    box.upper.push_back(hi);
  }
  return box;
}

HyperParams prior_mean_theta(const Params& params) { return {params.kernel_hp_mean}; }

ThetaPosterior learn_point(const SurrogateConfig& config, const Dataset& data,
                           const Params& params) {
  const Box box = log_theta_box(params);
  const HyperParams prior = prior_mean_theta(params);
  const double prior_score = score(config, data, prior);

  Objective objective = [&](std::span<const double> u) {
    return score(config, data, from_log(u));
  };
  Maximum best = maximize(objective, box,
                          {params.n_learn_global_evals, params.n_learn_local_evals});
  if (!std::isfinite(best.value) || best.value < prior_score) return {{prior}, 0};
  return {{from_log(best.x)}, 0};
}

double mcmc_log_target(const SurrogateConfig& config, const Dataset& data,
                       std::span<const double> log_theta, const Box& bounds) {
  if (!bounds.contains(log_theta)) return kNegInf;
  double lp = score(config, data, from_log(log_theta));
  if (config.sc_type == ScoreType::SC_MAP)
    for (double u : log_theta) lp += u;
  return lp;
}

std::size_t slice_sweep(const LogDensity& log_p, std::vector<double>& x, double& log_fx,
                        Rng& rng, const SliceSettings& settings) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::size_t collapsed = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    // Auxiliary height: log y = log p(x) + log U, i.e. log p(x) - Exp(1).
    const double log_y = log_fx + std::log(unif(rng));
    const double x0 = x[j];

    double left = x0 - settings.width * unif(rng);
    double right = left + settings.width;
    auto eval_at = [&](double v) {
      const double saved = x[j];
      x[j] = v;
      const double lp = log_p(x);
      x[j] = saved;
      return lp;
    };
    // Stepping out with the step budget split randomly between the two sides.
    int j_steps = static_cast<int>(std::floor(settings.max_step_out * unif(rng)));
    int k_steps = settings.max_step_out - 1 - j_steps;
    while (j_steps-- > 0 && eval_at(left) > log_y) left -= settings.width;
    while (k_steps-- > 0 && eval_at(right) > log_y) right += settings.width;

    bool accepted = false;
    for (int it = 0; it < settings.max_shrink; ++it) {
      const double proposal = left + unif(rng) * (right - left);
      const double lp = eval_at(proposal);
      if (lp > log_y) {
        x[j] = proposal;
        log_fx = lp;
        accepted = true;
        break;
      }
      if (proposal < x0) left = proposal;
      else right = proposal;
    }
    if (!accepted) ++collapsed;
  }
  return collapsed;
}

ThetaPosterior learn_mcmc(const SurrogateConfig& config, const Dataset& data,
                          const Params& params, Rng& rng, std::optional<HyperParams> start) {
  const Box bounds = log_theta_box(params);
  LogDensity target = [&](std::span<const double> u) {
    return mcmc_log_target(config, data, u, bounds);
  };

  std::vector<double> u;
  const HyperParams initial = start ? *start : prior_mean_theta(params);
  for (std::size_t j = 0; j < initial.theta.size(); ++j)
    u.push_back(std::clamp(std::log(initial.theta[j]), bounds.lower[j], bounds.upper[j]));
  double log_fu = target(u);
  if (!std::isfinite(log_fu)) {
    // Start from the box center if the requested start is not supported.
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = 0.5 * (bounds.lower[j] + bounds.upper[j]);
    log_fu = target(u);
  }

  ThetaPosterior out;
  if (!std::isfinite(log_fu)) {
    // Nothing in the box can be fitted; report the prior means.
    out.particles.assign(static_cast<std::size_t>(params.mcmc_particles), initial);
    return out;
  }
  for (int i = 0; i < params.mcmc_burnin; ++i)
    out.collapsed_slices += slice_sweep(target, u, log_fu, rng);
  for (int i = 0; i < params.mcmc_particles; ++i) {
    out.collapsed_slices += slice_sweep(target, u, log_fu, rng);
    out.particles.push_back(from_log(u));
  }
  return out;
}

bool relearn_due(int iteration, const Params& params) {
  if (params.l_type == LearningType::MCMC) return true;
  return iteration % params.learn_frequency == 0;
}

}  // namespace bopt
