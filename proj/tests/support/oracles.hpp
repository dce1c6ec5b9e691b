#ifndef BOPT_TEST_ORACLES_HPP
#define BOPT_TEST_ORACLES_HPP

// Independent reference implementations used by the unit and acceptance
// tests. They share no numerical code with the library beyond kernel
// evaluation.

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "bopt/criteria.hpp"
#include "bopt/kernels.hpp"
#include "bopt/surrogate.hpp"

namespace oracle {

Eigen::MatrixXd to_eigen(const bopt::Matrix& m);
Eigen::MatrixXd to_eigen(const bopt::CholFactor& f);
Eigen::VectorXd to_eigen(const std::vector<double>& v);

/// Random symmetric positive definite matrix: a squared-exponential Gram
/// matrix over random points plus a diagonal shift.
bopt::Matrix random_spd(std::size_t n, std::mt19937_64& rng, double shift = 1e-3);

/// Dense-inverse evaluation of the GP and NIG posterior formulas.
struct DensePosterior {
  bool nig = false;
  Eigen::MatrixXd X, Phi, Rinv, A_inv;  // A = Phi^T R^-1 Phi (+ W0^-1)
  Eigen::VectorXd y, w_n;
  double sigma2 = 0.0, alpha_n = 0.0, beta_n = 0.0, dof = 0.0, log_evidence = 0.0;
  const bopt::SurrogateConfig* config = nullptr;
  bopt::HyperParams hp;

  bopt::Predictive predict(const std::vector<double>& xq) const;
};

DensePosterior dense_posterior(const bopt::SurrogateConfig& config, const bopt::Dataset& data,
                               const bopt::HyperParams& hp, double diag_noise);

/// Log density of a multivariate Student-t with nu degrees of freedom.
double mvt_logpdf(const Eigen::VectorXd& y, const Eigen::VectorXd& mu, const Eigen::MatrixXd& shape,
                  double nu);

/// NIG marginal likelihood of y expressed as a multivariate Student-t:
/// dof 2 alpha, location Phi w0, shape (beta / alpha)(R + Phi W0 Phi^T).
double nig_marginal_t(const bopt::SurrogateConfig& config, const bopt::Dataset& data,
                      const bopt::HyperParams& hp, double diag_noise);

struct MonteCarlo {
  double mean = 0.0;
  double std_error = 0.0;
};
/// E[max(y_best - Y, 0)] for Y ~ mean + scale * T_dof.
MonteCarlo mc_expected_improvement(const bopt::Predictive& pred, double y_best, std::size_t draws,
                                   std::uint64_t seed);

/// Sobol points 1..n for d <= 6 computed as XORs of direction numbers
/// selected by the bits of the Gray code of each index.
std::vector<std::vector<double>> sobol_reference(std::size_t n, std::size_t d);

/// First 16 unscrambled Sobol points (indices 1..16) in 21 dimensions,
/// times 32. Frozen from an independent reference generator.
extern const int kSobolFrozen32[16][21];

/// Alternative Hartmann-6 written from the exponent sum in matrix form.
double hartmann6_alt(const std::vector<double>& x);

/// Kolmogorov-Smirnov distance between a sample and a continuous cdf.
template <class Cdf>
double ks_distance(std::vector<double> sample, Cdf cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::max(f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f));
  }
  return d;
}

}  // namespace oracle

#endif  // BOPT_TEST_ORACLES_HPP
