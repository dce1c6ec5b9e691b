#ifndef BOPT_LEARNING_HPP
#define BOPT_LEARNING_HPP

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bopt/inner_opt.hpp"
#include "bopt/kernels.hpp"
#include "bopt/params.hpp"
#include "bopt/surrogate.hpp"

namespace bopt {

/// Kernel-parameter posterior: a single point estimate (ML/MAP) or MCMC
/// particles with uniform weights.
struct ThetaPosterior {
  std::vector<HyperParams> particles;
  std::size_t collapsed_slices = 0;  // slice updates that fell back to the current point

  friend bool operator==(const ThetaPosterior&, const ThetaPosterior&) = default;
};

/// log theta_j in [log m_j - 3 s_j, log m_j + 3 s_j], clamped to [log 1e-4, log 1e4].
Box log_theta_box(const Params& params);

/// Prior means of the hyperprior as a HyperParams.
HyperParams prior_mean_theta(const Params& params);

/// Maximizes score() over the log-theta box (DIRECT, then Nelder-Mead).
/// Falls back to the prior means if every candidate scores -infinity.
ThetaPosterior learn_point(const SurrogateConfig& config, const Dataset& data,
                           const Params& params);

/// Coordinate-wise slice sampling on log theta; burn-in sweeps are discarded,
/// then one particle is kept per sweep. The chain starts at `start` when
/// given, otherwise at the prior means.
ThetaPosterior learn_mcmc(const SurrogateConfig& config, const Dataset& data,
                          const Params& params, Rng& rng,
                          std::optional<HyperParams> start = std::nullopt);

/// Log density over log theta used by learn_mcmc. Under SC_MAP the score is
/// a density in theta, so the change of variables adds sum(log theta).
double mcmc_log_target(const SurrogateConfig& config, const Dataset& data,
                       std::span<const double> log_theta, const Box& bounds);

using LogDensity = std::function<double(std::span<const double>)>;

struct SliceSettings {
  double width = 1.0;
  int max_step_out = 10;
  int max_shrink = 100;
};

/// One coordinate-wise slice-sampling sweep, updating x in place. Returns the
/// number of coordinates whose shrinkage collapsed (those keep their value).
/// `log_fx` holds log p(x) on entry and is updated.
std::size_t slice_sweep(const LogDensity& log_p, std::vector<double>& x, double& log_fx,
                        Rng& rng, const SliceSettings& settings = {});

/// true iff iteration is a multiple of learn_frequency. MCMC relearns at
/// every iteration regardless of learn_frequency.
bool relearn_due(int iteration, const Params& params);

}  // namespace bopt

#endif  // BOPT_LEARNING_HPP
