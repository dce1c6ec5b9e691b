#include "bopt/surrogate.hpp"

#include <cmath>
#include <numbers>

#include "bopt/errors.hpp"

namespace bopt {

void Dataset::check() const {
  if (X.rows() != y.size())
    throw DimensionMismatch("dataset has " + std::to_string(X.rows()) + " inputs but " +
                            std::to_string(y.size()) + " responses");
  for (double v : X.data())
    if (!std::isfinite(v)) throw RangeError("dataset inputs must be finite");
  for (double v : y)
    if (!std::isfinite(v)) throw RangeError("dataset responses must be finite");
}

SurrogateConfig SurrogateConfig::from_params(const SpecTree& surr, const Params& params,
                                             std::size_t dim) {
  require_kind(surr, ComponentKind::surrogate, "surrogate");
  SurrogateConfig c;
  c.kind = surr.node == "sStudentTProcessNIG" ? SurrogateKind::student_t_nig
                                               : SurrogateKind::gaussian_process;
  c.kernel = KernelSpec::from_tree(parse_expression(params.kernel_name));
  c.basis = BasisSpec::from_tree(parse_expression(params.mean_name), dim);
  c.noise = params.noise;
  c.prior_alpha = params.prior_alpha;
  c.prior_beta = params.prior_beta;
  if (params.mean_w0.empty()) {
    c.w0.assign(c.basis.p(), 0.0);
  } else if (params.mean_w0.size() == c.basis.p()) {
    c.w0 = params.mean_w0;
  } else {
    throw LengthMismatch("mean_w0 has " + std::to_string(params.mean_w0.size()) +
                         " entries but the basis has " + std::to_string(c.basis.p()));
  }
  c.w_scale = params.mean_w_scale;
  c.sc_type = params.sc_type;
  c.hyperprior = params;
  return c;
}

SurrogateConfig SurrogateConfig::from_params(const Params& params, std::size_t dim) {
  return from_params(parse_expression(params.surr_name), params, dim);
}

namespace {

constexpr double kJitterStart = 1e-10;
constexpr double kJitterMax = 1e-4;

// Dense lower Cholesky of a small p x p matrix (basis weight precision).
// Kept apart from cholesky() so the kernel-matrix factorization counter only
// reflects the n x n factor.
Matrix small_cholesky(const Matrix& A) {
  const std::size_t p = A.rows();
  Matrix L(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = A(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      if (i == j) {
        if (!(s > 0.0)) throw DegenerateBasis("basis design matrix is rank deficient");
        L(i, i) = std::sqrt(s);
      } else {
        L(i, j) = s / L(j, j);
      }
    }
  }
  return L;
}

void small_lower_solve(const Matrix& L, Vector& b) {
  for (std::size_t i = 0; i < b.size(); ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= L(i, k) * b[k];
    b[i] = s / L(i, i);
  }
}

void small_upper_solve(const Matrix& L, Vector& b) {
  for (std::size_t i = b.size(); i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < b.size(); ++k) s -= L(k, i) * b[k];
    b[i] = s / L(i, i);
  }
}

// Fills every field derived from factor, linv_phi and linv_y.
void finalize(PosteriorState& s) {
  const SurrogateConfig& c = *s.config;
  const std::size_t n = s.size();
  const std::size_t p = c.basis.p();
  const bool nig = c.kind == SurrogateKind::student_t_nig;

  if (!nig && n <= p)
    throw DegenerateBasis("sGaussianProcess needs more than " + std::to_string(p) +
                          " observation(s) for this basis");

  // Weight precision: Phi^T R^{-1} Phi (+ W0^{-1} for the NIG prior).
  Matrix precision(p, p);
  Vector rhs(p);
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      const double v = dot(s.linv_phi[a], s.linv_phi[b]);
      precision(a, b) = v;
      precision(b, a) = v;
    }
    rhs[a] = dot(s.linv_phi[a], s.linv_y);
  }
  if (nig) {
    for (std::size_t a = 0; a < p; ++a) {
      precision(a, a) += 1.0 / c.w_scale;
      rhs[a] += c.w0[a] / c.w_scale;
    }
  }
  s.weight_factor = p > 0 ? small_cholesky(precision) : Matrix();
  s.w_n = rhs;
  small_lower_solve(s.weight_factor, s.w_n);
  small_upper_solve(s.weight_factor, s.w_n);

  // L^{-1}(y - Phi w_n), then R^{-1}(y - Phi w_n).
  Vector linv_resid = s.linv_y;
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t i = 0; i < n; ++i) linv_resid[i] -= s.linv_phi[a][i] * s.w_n[a];
  s.resid_alpha = linv_resid;
  tri_solve_inplace(s.factor, s.resid_alpha, TriSide::upper_transposed);

  const double log_det_r = s.factor.log_det();
  double log_det_precision = 0.0;
  for (std::size_t a = 0; a < p; ++a) log_det_precision += 2.0 * std::log(s.weight_factor(a, a));
  const double log_2pi = std::log(2.0 * std::numbers::pi);

  if (!nig) {
    const double m = static_cast<double>(n - p);
    const double quad = dot(linv_resid, linv_resid);
    s.sigma2 = quad / m;
    s.dof = m;
    s.alpha_n = 0.0;
    s.beta_n = 0.0;
    if (!(s.sigma2 > 0.0)) {
      // Data fit exactly by the basis; keep a tiny positive variance.
      s.sigma2 = std::numeric_limits<double>::min();
    }
    // Restricted likelihood with the signal variance profiled out.
    s.log_evidence = -0.5 * m * (log_2pi + std::log(s.sigma2) + 1.0) - 0.5 * log_det_r -
                     0.5 * log_det_precision;
  } else {
    const double alpha = c.prior_alpha;
    const double beta = c.prior_beta;
    double w0_term = 0.0;
    for (std::size_t a = 0; a < p; ++a) w0_term += c.w0[a] * c.w0[a] / c.w_scale;
    // w_n^T P w_n = |L_P^T w_n|^2
    double wn_term = 0.0;
    for (std::size_t a = 0; a < p; ++a) {
      double t = 0.0;
      for (std::size_t b = a; b < p; ++b) t += s.weight_factor(b, a) * s.w_n[b];
      wn_term += t * t;
    }
    s.alpha_n = alpha + 0.5 * static_cast<double>(n);
    s.beta_n = beta + 0.5 * (dot(s.linv_y, s.linv_y) + w0_term - wn_term);
    if (!(s.beta_n > 0.0)) s.beta_n = beta;  // round-off guard; beta_n >= beta analytically
    s.sigma2 = s.beta_n / s.alpha_n;
    s.dof = 2.0 * s.alpha_n;
    const double log_det_w0 = static_cast<double>(p) * std::log(c.w_scale);
    s.log_evidence = -0.5 * static_cast<double>(n) * log_2pi - 0.5 * log_det_r -
                     0.5 * log_det_w0 - 0.5 * log_det_precision + alpha * std::log(beta) -
                     s.alpha_n * std::log(s.beta_n) + std::lgamma(s.alpha_n) -
                     std::lgamma(alpha);
  }
}

CholFactor factorize_with_jitter(const Matrix& K, double noise, double& diag_noise) {
  Matrix R = K;
  for (std::size_t i = 0; i < R.rows(); ++i) R(i, i) += noise;
  try {
    diag_noise = noise;
    return cholesky(R);
  } catch (const NotPositiveDefinite&) {
  }
  for (double jitter = kJitterStart;; jitter *= 10.0) {
    Matrix Rj = R;
    for (std::size_t i = 0; i < Rj.rows(); ++i) Rj(i, i) += jitter;
    try {
      diag_noise = noise + jitter;
      return cholesky(Rj);
    } catch (const NotPositiveDefinite&) {
      if (jitter >= kJitterMax) throw;
    }
  }
}

}  // namespace

PosteriorState fit(std::shared_ptr<const SurrogateConfig> config, const Dataset& data,
                   const HyperParams& hp) {
  data.check();
  hp.check();
  if (data.size() == 0) throw DimensionMismatch("cannot fit a surrogate to an empty dataset");
  if (data.dim() != config->basis.dim())
    throw DimensionMismatch("dataset dimension does not match the surrogate");
  if (hp.theta.size() != config->kernel.n_params())
    throw LengthMismatch("hyperparameter count does not match the kernel");

  PosteriorState s;
  s.config = std::move(config);
  s.data = data;
  s.hp = hp;
  const SurrogateConfig& c = *s.config;
  const std::size_t n = data.size();
  const std::size_t p = c.basis.p();

  s.factor = factorize_with_jitter(gram_matrix(c.kernel, hp, data.X), c.noise, s.diag_noise);

  s.linv_phi.assign(p, Vector(n));
  for (std::size_t i = 0; i < n; ++i) {
    Vector phi = mean_basis(c.basis, data.X.row(i));
    for (std::size_t a = 0; a < p; ++a) s.linv_phi[a][i] = phi[a];
  }
  for (auto& col : s.linv_phi) tri_solve_inplace(s.factor, col, TriSide::lower);
  s.linv_y = tri_solve(s.factor, data.y, TriSide::lower);
  finalize(s);
  return s;
}

PosteriorState fit(const SpecTree& surr, const Dataset& data, const HyperParams& hp,
                   const Params& params) {
  return fit(std::make_shared<const SurrogateConfig>(
                 SurrogateConfig::from_params(surr, params, data.dim())),
             data, hp);
}

PosteriorState update(const PosteriorState& state, std::span<const double> x_new, double y_new) {
  const SurrogateConfig& c = *state.config;
  if (x_new.size() != state.data.dim())
    throw DimensionMismatch("update point has the wrong dimension");
  if (!std::isfinite(y_new)) throw RangeError("observations must be finite");

  Vector cross = cross_kernel(c.kernel, state.hp, state.data.X, x_new);
  const double corner = c.kernel.eval_sq_dist(0.0, state.hp.theta) + state.diag_noise;

  PosteriorState s = state;
  try {
    s.factor.append(cross, corner);
  } catch (const NotPositiveDefinite&) {
    Dataset augmented = state.data;
    augmented.add(x_new, y_new);
    return fit(state.config, augmented, state.hp);
  }
  s.data.add(x_new, y_new);

  const std::size_t n = state.size();
  auto row = s.factor.row(n);
  const double l_nn = row[n];
  auto extend = [&](Vector& col, double value) {
    double acc = value;
    for (std::size_t k = 0; k < n; ++k) acc -= row[k] * col[k];
    col.push_back(acc / l_nn);
  };
  Vector phi = mean_basis(c.basis, x_new);
  for (std::size_t a = 0; a < phi.size(); ++a) extend(s.linv_phi[a], phi[a]);
  extend(s.linv_y, y_new);
  finalize(s);
  return s;
}

Predictive predict(const PosteriorState& s, std::span<const double> xq) {
  const SurrogateConfig& c = *s.config;
  if (xq.size() != s.data.dim())
    throw DimensionMismatch("query has dimension " + std::to_string(xq.size()) + ", expected " +
                            std::to_string(s.data.dim()));
  Vector k = cross_kernel(c.kernel, s.hp, s.data.X, xq);
  const Vector phi = mean_basis(c.basis, xq);
  const std::size_t p = phi.size();

  Predictive out;
  out.mean = dot(k, s.resid_alpha);
  for (std::size_t a = 0; a < p; ++a) out.mean += phi[a] * s.w_n[a];

  tri_solve_inplace(s.factor, k, TriSide::lower);  // k <- L^{-1} k*
  double var = c.kernel.eval_sq_dist(0.0, s.hp.theta) - dot(k, k);
  if (p > 0) {
    Vector h(p);
    for (std::size_t a = 0; a < p; ++a) h[a] = phi[a] - dot(s.linv_phi[a], k);
    small_lower_solve(s.weight_factor, h);
    var += dot(h, h);
  }
  out.scale = std::sqrt(std::max(var, 0.0) * s.sigma2);
  out.dof = s.dof;
  return out;
}

double score(const SurrogateConfig& config, const Dataset& data, const HyperParams& hp) {
  const double prior =
      config.sc_type == ScoreType::SC_MAP ? hyperprior_logpdf(config.hyperprior, hp) : 0.0;
  if (data.size() == 0) return prior;
  try {
    auto shared = std::make_shared<const SurrogateConfig>(config);
    return fit(shared, data, hp).log_evidence + prior;
  } catch (const NotPositiveDefinite&) {
    return -std::numeric_limits<double>::infinity();
  } catch (const DegenerateBasis&) {
    return -std::numeric_limits<double>::infinity();
  }
}

double score(const SpecTree& surr, const Dataset& data, const HyperParams& hp,
             const Params& params) {
  return score(SurrogateConfig::from_params(surr, params, data.dim()), data, hp);
}

double sample_predictive(const Predictive& pred, Rng& rng) {
  if (pred.scale == 0.0) return pred.mean;
  double t = 0.0;
  if (std::isinf(pred.dof)) {
    t = std::normal_distribution<double>(0.0, 1.0)(rng);
  } else {
    t = std::student_t_distribution<double>(pred.dof)(rng);
  }
  return pred.mean + pred.scale * t;
}

double sample_predictive(const PosteriorState& state, std::span<const double> xq, Rng& rng) {
  return sample_predictive(predict(state, xq), rng);
}

}  // namespace bopt
