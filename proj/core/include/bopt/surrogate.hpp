#ifndef BOPT_SURROGATE_HPP
#define BOPT_SURROGATE_HPP

#include <cstddef>
#include <limits>
#include <memory>
#include <random>
#include <span>

#include "bopt/grammar.hpp"
#include "bopt/kernels.hpp"
#include "bopt/linalg.hpp"
#include "bopt/matrix.hpp"
#include "bopt/params.hpp"

namespace bopt {

/// Observed inputs (rows of X) and responses y.
struct Dataset {
  Matrix X;
  Vector y;

  std::size_t size() const noexcept { return y.size(); }
  std::size_t dim() const noexcept { return X.cols(); }
  void add(std::span<const double> x, double value) {
    X.append_row(x);
    y.push_back(value);
  }
  /// Throws DimensionMismatch / RangeError when the invariants are broken.
  void check() const;
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

enum class SurrogateKind {
  gaussian_process,  // sGaussianProcess: vague prior on w, ML signal variance
  student_t_nig,     // sStudentTProcessNIG: normal-inverse-gamma prior on (w, sigma_s^2)
};

/// Everything about the model that does not depend on data or theta.
struct SurrogateConfig {
  SurrogateKind kind = SurrogateKind::gaussian_process;
  KernelSpec kernel;
  BasisSpec basis;
  double noise = 1e-6;
  double prior_alpha = 1.0;
  double prior_beta = 1.0;
  Vector w0;  // length p
  double w_scale = 10.0;
  ScoreType sc_type = ScoreType::SC_MAP;
  Params hyperprior;  // source of kernel_hp_mean / kernel_hp_std

  static SurrogateConfig from_params(const SpecTree& surr, const Params& params, std::size_t dim);
  static SurrogateConfig from_params(const Params& params, std::size_t dim);
};

/// Pointwise predictive distribution of the latent function.
struct Predictive {
  double mean = 0.0;
  double scale = 0.0;
  double dof = std::numeric_limits<double>::infinity();
};

/// Fitted surrogate. Holds every quantity that does not depend on the query
/// point, so predict() only does triangular solves against stored factors.
struct PosteriorState {
  std::shared_ptr<const SurrogateConfig> config;
  Dataset data;
  HyperParams hp;
  double diag_noise = 0.0;  // noise plus any jitter added during factorization

  CholFactor factor;               // R = K(theta) + diag_noise I
  std::vector<Vector> linv_phi;    // columns of L^{-1} Phi (p vectors of length n)
  Vector linv_y;                   // L^{-1} y
  Matrix weight_factor;            // lower Cholesky factor of the p x p weight precision
  Vector w_n;                      // posterior basis weights
  Vector resid_alpha;              // R^{-1} (y - Phi w_n)
  double sigma2 = 1.0;             // signal-variance multiplier for the predictive scale
  double alpha_n = 0.0;            // NIG only
  double beta_n = 0.0;             // NIG only
  double dof = std::numeric_limits<double>::infinity();
  double log_evidence = 0.0;

  std::size_t size() const noexcept { return data.size(); }
  friend bool operator==(const PosteriorState&, const PosteriorState&) = default;
};

/// Throws NotPositiveDefinite (after jitter escalation) or DegenerateBasis.
PosteriorState fit(std::shared_ptr<const SurrogateConfig> config, const Dataset& data,
                   const HyperParams& hp);
PosteriorState fit(const SpecTree& surr, const Dataset& data, const HyperParams& hp,
                   const Params& params);

/// Adds one observation in O(n^2) by bordering the stored factor.
PosteriorState update(const PosteriorState& state, std::span<const double> x_new, double y_new);

Predictive predict(const PosteriorState& state, std::span<const double> xq);

/// Log evidence (SC_ML) or log evidence plus hyperprior (SC_MAP). Returns
/// -infinity when the model cannot be fitted. An empty dataset scores as the
/// hyperprior alone.
double score(const SurrogateConfig& config, const Dataset& data, const HyperParams& hp);
double score(const SpecTree& surr, const Dataset& data, const HyperParams& hp,
             const Params& params);

using Rng = std::mt19937_64;

/// mean + scale * t, t ~ Student-t(dof) (standard normal for infinite dof).
double sample_predictive(const PosteriorState& state, std::span<const double> xq, Rng& rng);
double sample_predictive(const Predictive& pred, Rng& rng);

}  // namespace bopt

#endif  // BOPT_SURROGATE_HPP
