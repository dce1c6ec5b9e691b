#ifndef BOPT_PARAMS_HPP
#define BOPT_PARAMS_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bopt {

enum class LearningType { ML, MAP, MCMC };
enum class ScoreType { SC_ML, SC_MAP };
enum class InitMethod { LHS, SOBOL, UNIFORM };
enum class Verbosity { quiet, info, debug };

/// Full run configuration. Every field has a default (see default_params()).
struct Params {
  std::string surr_name = "sGaussianProcess";
  std::string crit_name = "cEI";
  std::string kernel_name = "kMaternISO5";
  std::string mean_name = "mConst";

  // Log-normal hyperprior on kernel parameters; std is in log space.
  std::vector<double> kernel_hp_mean = {1.0};
  std::vector<double> kernel_hp_std = {1.0};

  // Inverse-gamma prior on the signal variance and normal prior on the
  // basis weights (used by sStudentTProcessNIG). Empty mean_w0 means zeros.
  double prior_alpha = 1.0;
  double prior_beta = 1.0;
  std::vector<double> mean_w0 = {};
  double mean_w_scale = 10.0;

  double noise = 1e-6;

  LearningType l_type = LearningType::MAP;
  ScoreType sc_type = ScoreType::SC_MAP;
  int learn_frequency = 20;

  int n_iterations = 190;
  int n_init_samples = 10;
  InitMethod init_method = InitMethod::LHS;

  // Criterion maximization budget.
  int n_inner_global_evals = 1000;
  int n_inner_local_evals = 200;
  // Score maximization budget (ML/MAP learning).
  int n_learn_global_evals = 500;
  int n_learn_local_evals = 100;

  double epsilon = 0.0;
  double hedge_eta = 1.0;
  double lcb_kappa = 2.0;

  int mcmc_particles = 10;
  int mcmc_burnin = 100;

  std::uint64_t random_seed = 0;
  Verbosity verbose = Verbosity::quiet;

  friend bool operator==(const Params&, const Params&) = default;
};

Params default_params();

/// Parses a flat `key = value` document; absent keys keep their defaults.
/// Throws UnknownKey, TypeMismatch, RangeError, SyntaxError, or the grammar
/// errors raised while validating the expression fields.
Params parse_params(std::string_view doc);
Params load_params(const std::string& path);

/// Checks ranges and cross-field consistency; throws on the first violation.
void validate(const Params& params);

/// Emits a document that parse_params() maps back to the same Params.
std::string render_params(const Params& params);

std::string_view to_string(LearningType t);
std::string_view to_string(ScoreType t);
std::string_view to_string(InitMethod m);
std::string_view to_string(Verbosity v);

}  // namespace bopt

#endif  // BOPT_PARAMS_HPP
