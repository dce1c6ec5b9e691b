#include "bopt/kernels.hpp"

#include <cmath>
#include <numbers>

#include "bopt/errors.hpp"

namespace bopt {

void HyperParams::check() const {
  for (double t : theta)
    if (!(t > 0.0) || !std::isfinite(t))
      throw RangeError("kernel hyperparameters must be finite and positive");
}

KernelSpec KernelSpec::from_tree(const SpecTree& tree) {
  require_kind(tree, ComponentKind::kernel, "kernel");
  KernelSpec spec;
  spec.tree_ = tree;
  spec.root_ = spec.compile(tree);
  return spec;
}

std::size_t KernelSpec::compile(const SpecTree& tree) {
  Node node{Op::constant, n_params_, 0, 0};
  const std::string& name = tree.node;
  if (name == "kSum" || name == "kProd") {
    node.op = name == "kSum" ? Op::sum : Op::prod;
    node.left = compile(tree.children[0]);
    node.right = compile(tree.children[1]);
  } else {
    if (name == "kMaternISO1") node.op = Op::matern1;
    else if (name == "kMaternISO3") node.op = Op::matern3;
    else if (name == "kMaternISO5") node.op = Op::matern5;
    else if (name == "kSEISO") node.op = Op::se;
    else if (name == "kRQISO") node.op = Op::rq;
    else node.op = Op::constant;
    n_params_ += static_cast<std::size_t>(lookup(name)->n_params);
  }
  nodes_.push_back(node);
  return nodes_.size() - 1;
}

double KernelSpec::eval_sq_dist(double r2, std::span<const double> theta) const {
  return eval_node(root_, r2, theta);
}

double KernelSpec::eval_node(std::size_t idx, double r2, std::span<const double> theta) const {
  const Node& n = nodes_[idx];
  switch (n.op) {
    case Op::matern1: {
      const double r = std::sqrt(r2) / theta[n.offset];
      return std::exp(-r);
    }
    case Op::matern3: {
      const double r = std::sqrt(3.0 * r2) / theta[n.offset];
      return (1.0 + r) * std::exp(-r);
    }
    case Op::matern5: {
      const double r = std::sqrt(5.0 * r2) / theta[n.offset];
      return (1.0 + r + r * r / 3.0) * std::exp(-r);
    }
    case Op::se: {
      const double l = theta[n.offset];
      return std::exp(-0.5 * r2 / (l * l));
    }
    case Op::rq: {
      const double l = theta[n.offset];
      const double a = theta[n.offset + 1];
      return std::pow(1.0 + r2 / (2.0 * a * l * l), -a);
    }
    case Op::constant:
      return theta[n.offset];
    case Op::sum:
      return eval_node(n.left, r2, theta) + eval_node(n.right, r2, theta);
    case Op::prod:
      return eval_node(n.left, r2, theta) * eval_node(n.right, r2, theta);
  }
  return 0.0;
}

BasisSpec BasisSpec::from_tree(const SpecTree& tree, std::size_t dim) {
  require_kind(tree, ComponentKind::mean, "mean function");
  BasisSpec spec;
  spec.tree_ = tree;
  spec.dim_ = dim;
  if (tree.node == "mZero") {
    spec.kind_ = Kind::zero;
    spec.p_ = 0;
  } else if (tree.node == "mConst") {
    spec.kind_ = Kind::constant;
    spec.p_ = 1;
  } else {
    spec.kind_ = Kind::linear;
    spec.p_ = dim + 1;
  }
  return spec;
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw DimensionMismatch("points have dimensions " + std::to_string(a.size()) + " and " +
                            std::to_string(b.size()));
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void check_length(const KernelSpec& spec, const HyperParams& hp) {
  if (hp.theta.size() != spec.n_params())
    throw LengthMismatch("kernel expects " + std::to_string(spec.n_params()) +
                         " hyperparameter(s), got " + std::to_string(hp.theta.size()));
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const HyperParams& hp, std::span<const double> x1,
                   std::span<const double> x2) {
  check_length(spec, hp);
  return spec.eval_sq_dist(squared_distance(x1, x2), hp.theta);
}

Matrix gram_matrix(const KernelSpec& spec, const HyperParams& hp, const Matrix& X) {
  check_length(spec, hp);
  const std::size_t n = X.rows();
  Matrix K(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    K(i, i) = spec.eval_sq_dist(0.0, hp.theta);
    for (std::size_t j = 0; j < i; ++j) {
      const double v = spec.eval_sq_dist(squared_distance(X.row(i), X.row(j)), hp.theta);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

Vector cross_kernel(const KernelSpec& spec, const HyperParams& hp, const Matrix& X,
                    std::span<const double> xq) {
  check_length(spec, hp);
  Vector out(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i)
    out[i] = spec.eval_sq_dist(squared_distance(X.row(i), xq), hp.theta);
  return out;
}

Vector mean_basis(const BasisSpec& spec, std::span<const double> x) {
  if (x.size() != spec.dim_)
    throw DimensionMismatch("basis expects dimension " + std::to_string(spec.dim_));
  switch (spec.kind_) {
    case BasisSpec::Kind::zero:
      return {};
    case BasisSpec::Kind::constant:
      return {1.0};
    case BasisSpec::Kind::linear: {
      Vector phi(spec.p_);
      phi[0] = 1.0;
      for (std::size_t i = 0; i < x.size(); ++i) phi[i + 1] = x[i];
      return phi;
    }
  }
  return {};
}

double hyperprior_logpdf(const Params& params, const HyperParams& hp) {
  const std::size_t n = hp.theta.size();
  if (params.kernel_hp_mean.size() != n || params.kernel_hp_std.size() != n)
    throw LengthMismatch("hyperprior has " + std::to_string(params.kernel_hp_mean.size()) +
                         " mean(s) and " + std::to_string(params.kernel_hp_std.size()) +
                         " std(s) for " + std::to_string(n) + " parameter(s)");
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  double lp = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double log_t = std::log(hp.theta[j]);
    const double s = params.kernel_hp_std[j];
    const double z = (log_t - std::log(params.kernel_hp_mean[j])) / s;
    lp += -0.5 * z * z - std::log(s) - half_log_2pi - log_t;
  }
  return lp;
}

}  // namespace bopt
