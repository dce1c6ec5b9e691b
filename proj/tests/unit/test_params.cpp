#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bopt/errors.hpp"
#include "bopt/params.hpp"

using namespace bopt;

TEST_SUITE_BEGIN("params");

TEST_CASE("defaults") {
  const Params p = default_params();
  CHECK(p.surr_name == "sGaussianProcess");
  CHECK(p.n_iterations == 190);
  CHECK(p.n_init_samples == 10);
  CHECK(p.l_type == LearningType::MAP);
  CHECK(p.learn_frequency == 20);
  CHECK(p.init_method == InitMethod::LHS);
  CHECK(p.n_inner_global_evals == 1000);
  CHECK(p.n_inner_local_evals == 200);
  CHECK(p.n_learn_global_evals == 500);
  CHECK(p.n_learn_local_evals == 100);
  CHECK(p.mean_w_scale == 10.0);
  CHECK(p.prior_alpha == 1.0);
  CHECK(p.prior_beta == 1.0);
  CHECK_NOTHROW(validate(p));
}

TEST_CASE("single key") {
  const Params p = parse_params("epsilon = 0.1");
  CHECK(p.epsilon == 0.1);
  Params expected = default_params();
  expected.epsilon = 0.1;
  CHECK(p == expected);
}

TEST_CASE("empty document gives defaults") {
  CHECK(parse_params("") == default_params());
  CHECK(parse_params("# only a comment\n\n   \n") == default_params());
}

TEST_CASE("range errors") {
  CHECK_THROWS_AS(parse_params("epsilon = 1.5"), RangeError);
  CHECK_THROWS_AS(parse_params("epsilon = -0.1"), RangeError);
  CHECK_THROWS_AS(parse_params("noise = -1"), RangeError);
  CHECK_THROWS_AS(parse_params("learn_frequency = 0"), RangeError);
  CHECK_THROWS_AS(parse_params("kernel_hp_mean = [-1]"), RangeError);
  CHECK_THROWS_AS(parse_params("l_type = \"EP\""), RangeError);
}

TEST_CASE("unknown keys are errors") {
  CHECK_THROWS_AS(parse_params("epsilonn = 0.1"), UnknownKey);
}

TEST_CASE("type mismatches") {
  CHECK_THROWS_AS(parse_params("epsilon = \"a lot\""), TypeMismatch);
  CHECK_THROWS_AS(parse_params("n_iterations = 2.5"), TypeMismatch);
  CHECK_THROWS_AS(parse_params("kernel_hp_mean = [1, \"x\"]"), TypeMismatch);
  CHECK_THROWS_AS(parse_params("surr_name = 3"), TypeMismatch);
}

TEST_CASE("syntax errors") {
  CHECK_THROWS_AS(parse_params("epsilon 0.1"), SyntaxError);
  CHECK_THROWS_AS(parse_params("crit_name = \"cEI"), SyntaxError);
  CHECK_THROWS_AS(parse_params("epsilon = 0.1\nepsilon = 0.2"), SyntaxError);
}

TEST_CASE("expression fields are validated") {
  CHECK_THROWS_AS(parse_params("crit_name = \"cFoo\""), UnknownIdentifier);
  CHECK_THROWS_AS(parse_params("crit_name = \"kSEISO\""), UnknownIdentifier);
  CHECK_THROWS_AS(parse_params("crit_name = \"cHedge(cEI,cHedge(cEI,cLCB))\""), ArityError);
  CHECK_THROWS_AS(parse_params("kernel_name = \"kSum(kSEISO\""), SyntaxError);
}

TEST_CASE("hyperprior length must match the kernel") {
  CHECK_THROWS_AS(parse_params("kernel_name = \"kSum(kMaternISO3,kRQISO)\""), LengthMismatch);
  CHECK_THROWS_AS(parse_params("kernel_name = \"kSum(kMaternISO3,kRQISO)\"\n"
                               "kernel_hp_mean = [1, 1]\nkernel_hp_std = [5, 5]"),
                  LengthMismatch);
  const Params p = parse_params(
      "kernel_name = \"kSum(kMaternISO3,kRQISO)\"\n"
      "kernel_hp_mean = [1, 1, 1]\nkernel_hp_std = [5, 5, 5]");
  CHECK(p.kernel_hp_mean.size() == 3);
  CHECK_THROWS_AS(parse_params("kernel_hp_mean = [1]\nkernel_hp_std = [1, 2]"), LengthMismatch);
}

TEST_CASE("full document") {
  const Params p = parse_params(R"doc(
    # preset
    surr_name = "sStudentTProcessNIG"
    crit_name = "cHedge(cEI,cLCB,cThompsonSampling)"
    kernel_name = kMaternISO3
    mean_name = "mLinear"
    kernel_hp_mean = [0.5]
    kernel_hp_std = [2.0]
    prior_alpha = 2
    mean_w0 = [0, 0, 0]
    l_type = "L_MCMC"
    sc_type = "SC_ML"
    init_method = "SOBOL"
    random_seed = 18446744073709551615
    verbose = "info"   # trailing comment
  )doc");
  CHECK(p.surr_name == "sStudentTProcessNIG");
  CHECK(p.crit_name == "cHedge(cEI,cLCB,cThompsonSampling)");
  CHECK(p.kernel_name == "kMaternISO3");
  CHECK(p.kernel_hp_mean == std::vector<double>{0.5});
  CHECK(p.prior_alpha == 2.0);
  CHECK(p.mean_w0 == std::vector<double>{0, 0, 0});
  CHECK(p.l_type == LearningType::MCMC);
  CHECK(p.sc_type == ScoreType::SC_ML);
  CHECK(p.init_method == InitMethod::SOBOL);
  CHECK(p.random_seed == 18446744073709551615ull);
  CHECK(p.verbose == Verbosity::info);
}

TEST_CASE("render_params round-trips") {
  Params p = default_params();
  p.epsilon = 0.125;
  p.noise = 1.0 / 3.0;
  p.crit_name = "cHedge(cEI,cPOI)";
  p.random_seed = 987654321987654321ull;
  p.l_type = LearningType::MCMC;
  CHECK(parse_params(render_params(p)) == p);
  CHECK(parse_params(render_params(default_params())) == default_params());
}

TEST_CASE("property: parsing is deterministic and order-insensitive") {
  const std::vector<std::string> lines = {
      "epsilon = 0.05",          "crit_name = \"cLCB\"",      "lcb_kappa = 3.5",
      "kernel_name = \"kRQISO\"", "kernel_hp_mean = [1, 2]",  "kernel_hp_std = [1, 1]",
      "n_iterations = 17",       "random_seed = 99",          "init_method = \"UNIFORM\"",
      "mean_name = \"mZero\""};
  auto join = [](const std::vector<std::string>& v) {
    std::string out;
    for (const auto& l : v) out += l + "\n";
    return out;
  };
  const Params reference = parse_params(join(lines));
  CHECK(parse_params(join(lines)) == reference);
  std::mt19937_64 rng(7);
  std::vector<std::string> shuffled = lines;
  for (int trial = 0; trial < 50; ++trial) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(parse_params(join(shuffled)) == reference);
  }
}

TEST_SUITE_END();
