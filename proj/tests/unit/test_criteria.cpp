#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <random>

#include "bopt/criteria.hpp"
#include "bopt/errors.hpp"
#include "oracles.hpp"

using namespace bopt;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PosteriorState small_state(const char* surr, std::size_t n, std::uint64_t seed) {
  Params p = default_params();
  p.surr_name = surr;
  p.mean_name = "mConst";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Dataset data;
  data.X = Matrix(0, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> x{u(rng), u(rng)};
    data.add(x, std::cos(3.0 * x[0]) + x[1] * x[1]);
  }
  return fit(parse_expression(surr), data, {{0.3}}, p);
}

}  // namespace

TEST_SUITE_BEGIN("criteria");

TEST_CASE("parsing criterion specs") {
  const CriterionSpec single = CriterionSpec::from_tree(parse_expression("cPOI"));
  CHECK_FALSE(single.is_hedge());
  CHECK(single.leaves() == std::vector<CriterionLeaf>{CriterionLeaf::probability_of_improvement});
  const CriterionSpec hedge =
      CriterionSpec::from_tree(parse_expression("cHedge(cEI,cLCB,cThompsonSampling)"));
  CHECK(hedge.is_hedge());
  CHECK(hedge.leaves().size() == 3);
  CHECK_THROWS_AS(CriterionSpec::from_tree(parse_expression("cHedge(cEI,cHedge(cEI,cLCB))")),
                  ArityError);
  CHECK_THROWS_AS(CriterionSpec::from_tree(parse_expression("kSEISO")), UnknownIdentifier);
}

TEST_CASE("EI deterministic limits") {
  CHECK(expected_improvement({2.0, 0.0, kInf}, 1.0) == 0.0);
  CHECK(expected_improvement({0.25, 0.0, kInf}, 1.0) == 0.75);
  CHECK(expected_improvement({2.0, 1e-300, kInf}, 1.0) == doctest::Approx(0.0));
  CHECK(expected_improvement({0.25, 0.0, 5.0}, 1.0) == 0.75);
  CHECK(probability_of_improvement({0.25, 0.0, kInf}, 1.0) == 1.0);
  CHECK(probability_of_improvement({1.25, 0.0, kInf}, 1.0) == 0.0);
}

TEST_CASE("EI at the incumbent is the normal density at zero") {
  CHECK(expected_improvement({0.0, 1.0, kInf}, 0.0) == doctest::Approx(0.3989422804014327));
  CHECK(expected_improvement({3.0, 2.0, kInf}, 3.0) ==
        doctest::Approx(2.0 * 0.3989422804014327));
}

TEST_CASE("LCB with zero kappa is the negated mean") {
  const PosteriorState s = small_state("sGaussianProcess", 6, 1);
  Params p = default_params();
  p.lcb_kappa = 0.0;
  Rng rng(0);
  const std::vector<double> xq{0.3, 0.6};
  const std::vector<PosteriorState> states{s};
  CHECK(crit_eval(CriterionLeaf::lower_confidence_bound, states, xq, 0.0, p, rng) ==
        -predict(s, xq).mean);
  p.lcb_kappa = 2.0;
  const Predictive pr = predict(s, xq);
  CHECK(crit_eval(CriterionLeaf::lower_confidence_bound, states, xq, 0.0, p, rng) ==
        doctest::Approx(-(pr.mean - 2.0 * pr.scale)));
}

TEST_CASE("oracle: EI matches Monte Carlo improvement") {
  std::uint64_t seed = 100;
  for (const char* surr : {"sGaussianProcess", "sStudentTProcessNIG"}) {
    for (std::size_t n : {3u, 6u}) {
      const PosteriorState s = small_state(surr, n, seed++);
      const double y_best = *std::min_element(s.data.y.begin(), s.data.y.end());
      for (const std::vector<double>& xq :
           {std::vector<double>{0.5, 0.5}, std::vector<double>{0.1, 0.9}}) {
        const Predictive pred = predict(s, xq);
        CAPTURE(surr);
        CAPTURE(n);
        CAPTURE(pred.dof);
        const auto mc = oracle::mc_expected_improvement(pred, y_best, 1000000, seed++);
        CHECK(std::abs(expected_improvement(pred, y_best) - mc.mean) <= 3.0 * mc.std_error);
      }
    }
  }
  // Direct Student-t instances, including small dof.
  for (double dof : {2.5, 4.0, 30.0}) {
    const Predictive pred{0.2, 0.8, dof};
    const auto mc = oracle::mc_expected_improvement(pred, 0.0, 1000000, seed++);
    CAPTURE(dof);
    CHECK(std::abs(expected_improvement(pred, 0.0) - mc.mean) <= 3.0 * mc.std_error);
  }
}

TEST_CASE("property: EI is nonnegative") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int t = 0; t < 2000; ++t) {
    const double dof = t % 3 == 0 ? kInf : 1.5 + std::abs(u(rng)) * 10.0;
    const Predictive pred{u(rng), std::exp(u(rng)), dof};
    CHECK(expected_improvement(pred, u(rng)) >= 0.0);
  }
  for (const char* surr : {"sGaussianProcess", "sStudentTProcessNIG"}) {
    const PosteriorState s = small_state(surr, 8, 4);
    const std::vector<PosteriorState> states{s};
    Rng r(1);
    for (int t = 0; t < 200; ++t) {
      const std::vector<double> xq{std::abs(u(rng)) / 5.0, std::abs(u(rng)) / 5.0};
      CHECK(crit_eval(CriterionLeaf::expected_improvement, states, xq, 0.1 * u(rng),
                      default_params(), r) >= 0.0);
    }
  }
}

TEST_CASE("property: EI and POI increase with the scale when the mean is above the incumbent") {
  for (double dof : {kInf, 3.0, 12.0}) {
    double prev_ei = -1.0, prev_poi = -1.0;
    for (double s = 0.05; s < 20.0; s *= 1.3) {
      const Predictive pred{1.0, s, dof};
      const double ei = expected_improvement(pred, 0.0);
      const double poi = probability_of_improvement(pred, 0.0);
      CHECK(ei > prev_ei);
      CHECK(poi > prev_poi);
      prev_ei = ei;
      prev_poi = poi;
    }
  }
}

TEST_CASE("property: identical particles give single-particle values") {
  const PosteriorState s = small_state("sStudentTProcessNIG", 7, 5);
  const std::vector<PosteriorState> one{s}, many(5, s);
  const Params p = default_params();
  const std::vector<double> xq{0.4, 0.2};
  for (CriterionLeaf leaf : {CriterionLeaf::expected_improvement,
                             CriterionLeaf::lower_confidence_bound,
                             CriterionLeaf::probability_of_improvement}) {
    Rng r1(0), r2(0);
    CHECK(crit_eval(leaf, many, xq, 0.3, p, r1) ==
          doctest::Approx(crit_eval(leaf, one, xq, 0.3, p, r2)).epsilon(1e-14));
  }
}

TEST_CASE("Thompson sampling draws from the predictive") {
  const PosteriorState s = small_state("sGaussianProcess", 6, 6);
  const std::vector<PosteriorState> states{s};
  const std::vector<double> xq{0.7, 0.7};
  Rng a(5), b(5);
  const double v = crit_eval(CriterionLeaf::thompson_sampling, states, xq, 0.0, default_params(), a);
  CHECK(v == -sample_predictive(s, xq, b));
}

TEST_CASE("hedge: equal gains select uniformly") {
  const HedgeState h = HedgeState::uniform(3, 1.0);
  Rng rng(10);
  std::vector<int> counts(3, 0);
  const int n = 10000;
  for (int i = 0; i < n; ++i) ++counts[hedge_select(h, rng)];
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / 3.0) * (c - n / 3.0) / (n / 3.0);
  const double p_value = 1.0 - boost::math::cdf(boost::math::chi_squared(2.0), chi2);
  CAPTURE(chi2);
  CHECK(p_value > 0.01);
}

TEST_CASE("hedge: dominant arm without overflow") {
  const HedgeState h{{0.0, -1e6}, 1.0};
  const auto probs = hedge_probabilities(h);
  CHECK(probs[0] == 1.0);
  CHECK(probs[1] == 0.0);
  Rng rng(11);
  for (int i = 0; i < 10000; ++i) CHECK(hedge_select(h, rng) == 0);

  const HedgeState huge{{1e300, 1e300 - 1e290}, 10.0};
  for (double p : hedge_probabilities(huge)) CHECK(std::isfinite(p));
}

TEST_CASE("hedge: shifting every gain leaves selection unchanged") {
  const HedgeState h{{-0.3, -1.2, 0.0, -0.05}, 2.0};
  HedgeState shifted = h;
  for (double& g : shifted.gains) g += 123.456;
  Rng a(12), b(12);
  for (int i = 0; i < 10000; ++i) CHECK(hedge_select(h, a) == hedge_select(shifted, b));
}

TEST_CASE("hedge updates recenter") {
  const HedgeState h{{0.0, -1.0, -2.0}, 1.0};
  const HedgeState z = hedge_update(h, std::vector<double>{0.0, 0.0, 0.0});
  CHECK(z.gains == h.gains);

  const HedgeState up = hedge_update(HedgeState::uniform(3, 1.0), std::vector<double>{0.0, 2.5, 0.0});
  CHECK(up.gains[1] == 0.0);
  CHECK(up.gains[0] < 0.0);
  CHECK(up.gains[2] < 0.0);

  CHECK_THROWS_AS(hedge_update(h, std::vector<double>{1.0}), LengthMismatch);
}

TEST_CASE("property: gains never exceed zero after an update") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> normal(0.0, 3.0);
  HedgeState h = HedgeState::uniform(4, 1.0);
  for (int round = 0; round < 500; ++round) {
    std::vector<double> r(4);
    for (double& v : r) v = normal(rng);
    h = hedge_update(h, r);
    CHECK(*std::max_element(h.gains.begin(), h.gains.end()) == 0.0);
    for (double g : h.gains) CHECK(std::isfinite(g));
  }
}

TEST_CASE("hedge learns the best arm") {
  HedgeState h = HedgeState::uniform(3, 1.0);
  Rng rng(14);
  int best_late = 0;
  for (int round = 0; round < 100; ++round) {
    const std::size_t k = hedge_select(h, rng);
    if (round >= 80 && k == 0) ++best_late;
    h = hedge_update(h, std::vector<double>{1.0, 0.2, -0.5});
  }
  CHECK(best_late / 20.0 > 0.9);
}

TEST_CASE("epsilon override frequency") {
  Params p = default_params();
  Rng rng(15);
  p.epsilon = 0.0;
  for (int i = 0; i < 10000; ++i) CHECK_FALSE(epsilon_override(p, rng));
  p.epsilon = 1.0;
  for (int i = 0; i < 10000; ++i) CHECK(epsilon_override(p, rng));
  p.epsilon = 0.1;
  int hits = 0;
  for (int i = 0; i < 10000; ++i) hits += epsilon_override(p, rng);
  CHECK(std::abs(hits / 10000.0 - 0.1) <= 0.01);
}

TEST_SUITE_END();
