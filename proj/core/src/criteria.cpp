#include "bopt/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "bopt/errors.hpp"

namespace bopt {

std::string_view criterion_name(CriterionLeaf leaf) {
  switch (leaf) {
    case CriterionLeaf::expected_improvement: return "cEI";
    case CriterionLeaf::lower_confidence_bound: return "cLCB";
    case CriterionLeaf::probability_of_improvement: return "cPOI";
    case CriterionLeaf::thompson_sampling: return "cThompsonSampling";
  }
  return "?";
}

namespace {

CriterionLeaf leaf_of(const std::string& name) {
  if (name == "cEI") return CriterionLeaf::expected_improvement;
  if (name == "cLCB") return CriterionLeaf::lower_confidence_bound;
  if (name == "cPOI") return CriterionLeaf::probability_of_improvement;
  if (name == "cThompsonSampling") return CriterionLeaf::thompson_sampling;
  throw UnknownIdentifier("'" + name + "' is not a leaf criterion");
}

bool gaussian(double dof) { return std::isinf(dof) || dof <= 1.0; }

}  // namespace

CriterionSpec CriterionSpec::from_tree(const SpecTree& tree) {
  require_kind(tree, ComponentKind::criterion, "criterion");
  CriterionSpec spec;
  spec.tree_ = tree;
  if (tree.node == "cHedge") {
    spec.hedge_ = true;
    for (const auto& child : tree.children) {
      if (child.node == "cHedge") throw ArityError("cHedge cannot be nested");
      spec.leaves_.push_back(leaf_of(child.node));
    }
  } else {
    spec.leaves_.push_back(leaf_of(tree.node));
  }
  return spec;
}

double expected_improvement(const Predictive& pred, double y_best) {
  const double diff = y_best - pred.mean;
  if (!(pred.scale > 0.0)) return std::max(diff, 0.0);
  const double z = diff / pred.scale;
  if (gaussian(pred.dof)) {
    const boost::math::normal_distribution<double> normal;
    return diff * boost::math::cdf(normal, z) + pred.scale * boost::math::pdf(normal, z);
  }
  const double nu = pred.dof;
  const boost::math::students_t_distribution<double> t(nu);
  return diff * boost::math::cdf(t, z) +
         pred.scale * (nu + z * z) / (nu - 1.0) * boost::math::pdf(t, z);
}

double probability_of_improvement(const Predictive& pred, double y_best) {
  const double diff = y_best - pred.mean;
  if (!(pred.scale > 0.0)) return diff > 0.0 ? 1.0 : 0.0;
  const double z = diff / pred.scale;
  if (std::isinf(pred.dof)) return boost::math::cdf(boost::math::normal_distribution<double>(), z);
  return boost::math::cdf(boost::math::students_t_distribution<double>(pred.dof), z);
}

double crit_eval(CriterionLeaf leaf, std::span<const PosteriorState> states,
                 std::span<const double> xq, double y_best, const Params& params, Rng& rng) {
  if (states.empty()) throw DimensionMismatch("criterion needs at least one posterior state");
  double total = 0.0;
  for (const PosteriorState& s : states) {
    const Predictive pred = predict(s, xq);
    switch (leaf) {
      case CriterionLeaf::expected_improvement:
        total += expected_improvement(pred, y_best);
        break;
      case CriterionLeaf::lower_confidence_bound:
        total += -(pred.mean - params.lcb_kappa * pred.scale);
        break;
      case CriterionLeaf::probability_of_improvement:
        total += probability_of_improvement(pred, y_best);
        break;
      case CriterionLeaf::thompson_sampling:
        total += -sample_predictive(pred, rng);
        break;
    }
  }
  return total / static_cast<double>(states.size());
}

std::vector<double> hedge_probabilities(const HedgeState& state) {
  const double top = *std::max_element(state.gains.begin(), state.gains.end());
  std::vector<double> p(state.gains.size());
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    p[k] = std::exp(state.eta * (state.gains[k] - top));
    total += p[k];
  }
  for (double& v : p) v /= total;
  return p;
}

std::size_t hedge_select(const HedgeState& state, Rng& rng) {
  const std::vector<double> p = hedge_probabilities(state);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    acc += p[k];
    if (u < acc) return k;
  }
  // u landed in the round-off gap above the cumulative sum; pick the last
  // arm with nonzero mass.
  for (std::size_t k = p.size(); k-- > 0;)
    if (p[k] > 0.0) return k;
  return 0;
}

HedgeState hedge_update(const HedgeState& state, std::span<const double> rewards) {
  if (rewards.size() != state.gains.size())
    throw LengthMismatch("one reward per hedge arm is required");
  HedgeState out = state;
  for (std::size_t k = 0; k < rewards.size(); ++k) out.gains[k] += rewards[k];
  const double top = *std::max_element(out.gains.begin(), out.gains.end());
  for (double& g : out.gains) g -= top;
  return out;
}

bool epsilon_override(const Params& params, Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < params.epsilon;
}

}  // namespace bopt
