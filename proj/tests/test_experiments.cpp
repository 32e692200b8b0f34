#include <doctest.h>

#include <cmath>
#include <set>

#include "seqmem/experiments.hpp"
#include "seqmem/serialize.hpp"

using namespace seqmem;

namespace {

ExperimentConfig tiny_config(std::size_t l, std::size_t n, double p,
                             double eta_tilde, std::uint64_t trials,
                             std::uint64_t seed) {
  ExperimentConfig config;
  config.neuron_count = l;
  config.sequence_length = n;
  config.p = p;
  config.eta_tilde = eta_tilde;
  config.trials = trials;
  config.seed = seed;
  return config;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("xoshiro streams are reproducible and substreams differ") {
  Xoshiro256StarStar a(42);
  Xoshiro256StarStar b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

  auto s0 = Xoshiro256StarStar::substream(42, 0);
  auto s1 = Xoshiro256StarStar::substream(42, 1);
  int distinct = 0;
  for (int i = 0; i < 16; ++i) {
    if (s0.next() != s1.next()) ++distinct;
  }
  CHECK(distinct == 16);

  Xoshiro256StarStar c(7);
  for (int i = 0; i < 1000; ++i) {
    const double x = c.next_double();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    CHECK(c.next_below(13) < 13);
  }
  CHECK_THROWS_AS(c.next_below(0), std::invalid_argument);
}

TEST_CASE("degenerate sampling probabilities") {
  Xoshiro256StarStar rng(1);
  const FiringMatrix zeros = sample_bernoulli_matrix(6, 4, 0.0, rng);
  for (std::size_t c = 0; c < 4; ++c) CHECK(zeros.column(c).popcount() == 0);
  const FiringMatrix ones = sample_bernoulli_matrix(6, 4, 1.0, rng);
  for (std::size_t c = 0; c < 4; ++c) CHECK(ones.column(c).popcount() == 6);
}

TEST_CASE("sampled density concentrates at p") {
  Xoshiro256StarStar rng(2);
  const FiringMatrix m = sample_bernoulli_matrix(1000, 1000, 0.5, rng);
  std::size_t ones = 0;
  for (std::size_t c = 0; c < 1000; ++c) ones += m.column(c).popcount();
  // 4 sigma band around 5e5 with sigma = sqrt(1e6)/2 = 500
  CHECK(ones > 500000 - 2000);
  CHECK(ones < 500000 + 2000);
}

TEST_CASE("clopper-pearson against textbook values") {
  const auto zero = clopper_pearson(0, 100, 0.95);
  CHECK(zero.low == 0.0);
  CHECK(zero.high == doctest::Approx(0.03621669264517641).epsilon(1e-10));
  const auto all = clopper_pearson(100, 100, 0.95);
  CHECK(all.low == doctest::Approx(0.9637833073548235).epsilon(1e-10));
  CHECK(all.high == 1.0);
  const auto mid = clopper_pearson(5, 50, 0.95);
  CHECK(mid.low == doctest::Approx(0.033275093589022475).epsilon(1e-9));
  CHECK(mid.high == doctest::Approx(0.21813536643420225).epsilon(1e-9));
  CHECK_THROWS_AS(clopper_pearson(5, 4, 0.95), std::invalid_argument);
}

TEST_CASE("single trials are deterministic in (seed, index)") {
  const ExperimentConfig config = tiny_config(1, 2, 0.5, 0.125, 1, 77);
  for (std::uint64_t index = 0; index < 20; ++index) {
    const TrialOutcome a = run_trial(config, index);
    const TrialOutcome b = run_trial(config, index);
    CHECK(a.perfect == b.perfect);
    CHECK(a.failure_count == b.failure_count);
  }
}

TEST_CASE("trial outcomes at L=1, N=2 match the hand analysis") {
  // (0,0) and (1,1) memorize perfectly; (1,0) and (0,1) cannot
  const ExperimentConfig config = tiny_config(1, 2, 0.5, 0.125, 1, 123);
  bool saw_constant = false;
  bool saw_alternating = false;
  for (std::uint64_t index = 0; index < 64; ++index) {
    Xoshiro256StarStar rng = Xoshiro256StarStar::substream(config.seed, index);
    const FiringMatrix m = sample_bernoulli_matrix(1, 2, 0.5, rng);
    const TrialOutcome outcome = run_trial(config, index);
    const bool constant = m.get(0, 0) == m.get(0, 1);
    CHECK(outcome.perfect == constant);
    saw_constant = saw_constant || constant;
    saw_alternating = saw_alternating || !constant;
  }
  CHECK(saw_constant);
  CHECK(saw_alternating);
}

TEST_CASE("monte carlo at L=1, N=2 brackets the exact failure rate 1/2") {
  ExperimentConfig config = tiny_config(1, 2, 0.5, 0.125, 4096, 7);
  const ExperimentReport report = monte_carlo(config);
  CHECK(report.ci_low <= 0.5);
  CHECK(report.ci_high >= 0.5);
  CHECK(report.rate == doctest::Approx(0.5).epsilon(0.1));
  CHECK(report.generator == std::string(Xoshiro256StarStar::kName));
}

TEST_CASE("a single trial reports rate zero or one") {
  const ExperimentReport report =
      monte_carlo(tiny_config(2, 2, 0.5, 0.125, 1, 3));
  CHECK((report.rate == 0.0 || report.rate == 1.0));
}

TEST_CASE("reports are byte-identical for any worker count") {
  ExperimentConfig config = tiny_config(8, 4, 0.5, 0.125, 500, 11);
  config.workers = 1;
  const ExperimentReport one = monte_carlo(config, true);
  config.workers = 2;
  const ExperimentReport two = monte_carlo(config, true);
  config.workers = 8;
  const ExperimentReport eight = monte_carlo(config, true);
  const std::string a = report_json(one, false).dump();
  const std::string b = report_json(two, false).dump();
  const std::string c = report_json(eight, false).dump();
  CHECK(a == b);
  CHECK(a == c);
  REQUIRE(one.trial_outcomes.size() == eight.trial_outcomes.size());
  for (std::size_t i = 0; i < one.trial_outcomes.size(); ++i) {
    CHECK(one.trial_outcomes[i].perfect == eight.trial_outcomes[i].perfect);
    CHECK(one.trial_outcomes[i].failure_count ==
          eight.trial_outcomes[i].failure_count);
  }
}

TEST_CASE("exhaustive enumeration: the L=1, N=2 instance is exactly 1/2") {
  CHECK(exhaustive_exact(1, 2, 0.5, 0.125) == 0.5);
}

TEST_CASE("exhaustive enumeration: failure mass vanishes with p") {
  const double at_1e2 = exhaustive_exact(2, 2, 0.01, 0.125);
  const double at_1e3 = exhaustive_exact(2, 2, 0.001, 0.125);
  CHECK(at_1e3 < at_1e2);
  CHECK(at_1e3 < 5e-3);
}

TEST_CASE("exhaustive enumeration respects its cap") {
  CHECK_THROWS_AS(exhaustive_exact(5, 5, 0.5, 0.125), std::invalid_argument);
  CHECK_NOTHROW(exhaustive_exact(5, 5, 0.5, 0.125, 25));
}

TEST_CASE("property: monte carlo brackets the exhaustive value on tiny grids") {
  // every (L, N) with L*N <= 12, both p values, with and without disturbance
  for (const double eta_tilde : {0.0, 0.125}) {
    for (const double p : {0.25, 0.5}) {
      for (std::size_t l = 1; l <= 6; ++l) {
        for (std::size_t n = 2; l * n <= 12; ++n) {
          const double exact = exhaustive_exact(l, n, p, eta_tilde);
          ExperimentConfig config = tiny_config(l, n, p, eta_tilde, 100000,
                                                1000 + l * 13 + n);
          config.workers = 2;
          config.confidence = 0.999;
          const ExperimentReport report = monte_carlo(config);
          // the 99.9% interval around the observed rate covers the truth
          CHECK(report.ci_low <= exact);
          CHECK(report.ci_high >= exact);
        }
      }
    }
  }
}

TEST_CASE("property: observed failure rates stay below the analytic bound") {
  // grid restricted to parameter sets where the bound is informative (< 1)
  struct GridPoint {
    std::size_t l;
    std::size_t n;
  };
  for (const GridPoint point : {GridPoint{10000, 4}, {15000, 6}, {20000, 8}}) {
    ExperimentConfig config =
        tiny_config(point.l, point.n, 0.5, 0.125, 100, 55);
    config.workers = 2;
    config.confidence = 0.999;
    const ExperimentReport report = monte_carlo(config);
    CHECK(report.bound_total < 1.0);
    CHECK(report.ci_low <= report.bound_total);
  }
}

TEST_CASE("mgf diagnostic at t=0 is exactly one") {
  const MgfDiagnostic diag = estimate_mgf(4, 3, 0.5, 0.0, 1000, 5);
  CHECK(diag.estimate == 1.0);
  CHECK(diag.bound == 1.0);
  CHECK(diag.std_error == 0.0);
}

TEST_CASE("mgf diagnostic stays below its bound") {
  const MgfDiagnostic diag = estimate_mgf(10, 5, 0.5, 0.1, 100000, 99);
  CHECK(diag.bound == doctest::Approx(1.0644944589178594).epsilon(1e-14));
  CHECK(diag.estimate <=
        diag.bound * (1.0 + 5.0 * diag.std_error / diag.estimate));
  CHECK(std::abs(diag.mean_s) <= 4.0 * diag.mean_s_std_error);
}

}  // TEST_SUITE
