#ifndef BOPT_CRITERIA_HPP
#define BOPT_CRITERIA_HPP

#include <span>
#include <string>
#include <vector>

#include "bopt/grammar.hpp"
#include "bopt/params.hpp"
#include "bopt/surrogate.hpp"

namespace bopt {

// Criteria are maximized; the target function is minimized.

enum class CriterionLeaf { expected_improvement, lower_confidence_bound, probability_of_improvement,
                           thompson_sampling };

std::string_view criterion_name(CriterionLeaf leaf);

class CriterionSpec {
 public:
  /// Throws UnknownIdentifier for non-criterion nodes and ArityError for a
  /// nested cHedge.
  static CriterionSpec from_tree(const SpecTree& tree);

  const SpecTree& tree() const noexcept { return tree_; }
  bool is_hedge() const noexcept { return hedge_; }
  /// The single criterion, or the cHedge portfolio members in order.
  const std::vector<CriterionLeaf>& leaves() const noexcept { return leaves_; }

 private:
  SpecTree tree_;
  bool hedge_ = false;
  std::vector<CriterionLeaf> leaves_;
};

/// Expected improvement below y_best under a location-scale Student-t
/// (Gaussian when dof is infinite). Requires dof > 1; smaller dof falls back
/// to the Gaussian form since the t expectation diverges.
double expected_improvement(const Predictive& pred, double y_best);
double probability_of_improvement(const Predictive& pred, double y_best);

/// One leaf criterion averaged over the posterior states (one per theta particle).
double crit_eval(CriterionLeaf leaf, std::span<const PosteriorState> states,
                 std::span<const double> xq, double y_best, const Params& params, Rng& rng);

/// Softmax portfolio weights over acquisition functions.
struct HedgeState {
  std::vector<double> gains;
  double eta = 1.0;

  static HedgeState uniform(std::size_t arms, double eta) { return {std::vector<double>(arms, 0.0), eta}; }
};

/// Probabilities exp(eta g_k) / sum_j exp(eta g_j), computed after subtracting max(g).
std::vector<double> hedge_probabilities(const HedgeState& state);

/// Draws an arm index with hedge_probabilities().
std::size_t hedge_select(const HedgeState& state, Rng& rng);

/// g <- g + rewards, then g <- g - max(g).
HedgeState hedge_update(const HedgeState& state, std::span<const double> rewards);

/// True with probability params.epsilon.
bool epsilon_override(const Params& params, Rng& rng);

}  // namespace bopt

#endif  // BOPT_CRITERIA_HPP
