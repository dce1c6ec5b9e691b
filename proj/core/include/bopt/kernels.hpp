#ifndef BOPT_KERNELS_HPP
#define BOPT_KERNELS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "bopt/grammar.hpp"
#include "bopt/matrix.hpp"
#include "bopt/params.hpp"

namespace bopt {

/// Kernel parameters theta, in the tree order of the kernel expression.
struct HyperParams {
  std::vector<double> theta;

  /// Throws RangeError unless every entry is finite and strictly positive.
  void check() const;
  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

/// Compiled isotropic kernel expression. Leaves have unit signal (k(x,x) = 1)
/// except kConst, whose value is its own parameter.
class KernelSpec {
 public:
  /// Throws UnknownIdentifier if the tree contains non-kernel nodes.
  static KernelSpec from_tree(const SpecTree& tree);

  const SpecTree& tree() const noexcept { return tree_; }
  std::size_t n_params() const noexcept { return n_params_; }

  /// Kernel value as a function of the squared distance.
  double eval_sq_dist(double r2, std::span<const double> theta) const;

 private:
  enum class Op { matern1, matern3, matern5, se, rq, constant, sum, prod };
  struct Node {
    Op op;
    std::size_t offset;  // first parameter index (leaves)
    std::size_t left;    // child node indices (combinators)
    std::size_t right;
  };

  std::size_t compile(const SpecTree& tree);
  double eval_node(std::size_t idx, double r2, std::span<const double> theta) const;

  SpecTree tree_;
  std::vector<Node> nodes_;
  std::size_t root_ = 0;
  std::size_t n_params_ = 0;
};

/// Parametric mean basis phi(x).
class BasisSpec {
 public:
  static BasisSpec from_tree(const SpecTree& tree, std::size_t dim);

  std::size_t p() const noexcept { return p_; }
  std::size_t dim() const noexcept { return dim_; }
  const SpecTree& tree() const noexcept { return tree_; }

 private:
  friend Vector mean_basis(const BasisSpec& spec, std::span<const double> x);
  enum class Kind { zero, constant, linear };
  SpecTree tree_;
  Kind kind_ = Kind::zero;
  std::size_t dim_ = 0;
  std::size_t p_ = 0;
};

double kernel_eval(const KernelSpec& spec, const HyperParams& hp, std::span<const double> x1,
                   std::span<const double> x2);

/// Symmetric Gram matrix over the rows of X.
Matrix gram_matrix(const KernelSpec& spec, const HyperParams& hp, const Matrix& X);

/// Entry i is k(x_i, xq).
Vector cross_kernel(const KernelSpec& spec, const HyperParams& hp, const Matrix& X,
                    std::span<const double> xq);

Vector mean_basis(const BasisSpec& spec, std::span<const double> x);

/// Independent log-normal prior on each theta_j: log theta_j ~
/// N(log kernel_hp_mean_j, kernel_hp_std_j^2). Density is taken in theta space.
double hyperprior_logpdf(const Params& params, const HyperParams& hp);

}  // namespace bopt

#endif  // BOPT_KERNELS_HPP
