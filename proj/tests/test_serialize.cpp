#include <doctest.h>

#include <bit>
#include <cstdint>
#include <sstream>

#include "seqmem/serialize.hpp"
#include "test_helpers.hpp"

using namespace seqmem;
using seqmem::testing::random_matrix;
using seqmem::testing::worked_matrix;

TEST_SUITE("serialize") {

TEST_CASE("hex float encoding is a lossless round trip") {
  for (const double v : {0.0, -0.0, 0.5, 0.1875, -1.0 / 3.0, 1e-300, 1e300,
                         std::numeric_limits<double>::denorm_min(),
                         std::numeric_limits<double>::max()}) {
    const double back = double_from_hex(double_to_hex(v));
    CHECK(std::bit_cast<std::uint64_t>(back) == std::bit_cast<std::uint64_t>(v));
  }
  Xoshiro256StarStar rng(8);
  int tested = 0;
  while (tested < 1000) {
    const auto bits = rng.next();
    const double v = std::bit_cast<double>(bits);
    if (std::isnan(v) || std::isinf(v)) continue;
    ++tested;
    CHECK(std::bit_cast<std::uint64_t>(double_from_hex(double_to_hex(v))) ==
          bits);
  }
  CHECK_THROWS_AS(double_from_hex("zz"), std::runtime_error);
  CHECK_THROWS_AS(double_from_hex("1p-1 junk"), std::runtime_error);
}

TEST_CASE("single-pass network file round trip preserves margins exactly") {
  const SinglePassNetwork net = train_single_pass(worked_matrix(), 0.5, 0.125);
  std::stringstream buffer;
  write_network(buffer, net);
  const NetworkVariant loaded = read_network(buffer);
  REQUIRE(std::holds_alternative<SinglePassNetwork>(loaded));
  const auto& back = std::get<SinglePassNetwork>(loaded);
  CHECK(back.params().theta == net.params().theta);
  CHECK(back.params().p == net.params().p);
  CHECK(back.params().eta_tilde == net.params().eta_tilde);
  const auto before = verify_memorization(net, worked_matrix());
  const auto after = verify_memorization(back, worked_matrix());
  CHECK(before.perfect == after.perfect);
  CHECK(before.min_fire_margin == after.min_fire_margin);
  CHECK(before.min_silence_margin == after.min_silence_margin);
}

TEST_CASE("dense network file round trip preserves inner products exactly") {
  Xoshiro256StarStar rng(21);
  const FiringMatrix m = random_matrix(8, 8, 0.5, rng);
  TrainConfig config;
  config.max_updates = 800;
  config.tolerance = 1e-6;
  config.seed = 5;
  config.eta_tilde = 0.2;
  const SgdResult trained = sgd_train(m, config);
  std::stringstream buffer;
  write_network(buffer, trained.network);
  const NetworkVariant loaded = read_network(buffer);
  REQUIRE(std::holds_alternative<DenseNetwork>(loaded));
  const auto& back = std::get<DenseNetwork>(loaded);
  for (std::size_t l = 0; l < 8; ++l) {
    for (std::size_t c = 0; c < 8; ++c) {
      CHECK(back.inner_product(l, m.column(c)) ==
            trained.network.inner_product(l, m.column(c)));
    }
  }
}

TEST_CASE("network reader rejects unknown versions and modes") {
  const SinglePassNetwork net = train_single_pass(worked_matrix(), 0.5, 0.125);
  std::stringstream buffer;
  write_network(buffer, net);
  std::string text = buffer.str();

  {
    std::string doctored = text;
    doctored.replace(doctored.find("\"format_version\": 1"),
                     std::string("\"format_version\": 1").size(),
                     "\"format_version\": 2");
    std::istringstream in(doctored);
    CHECK_THROWS_WITH_AS(read_network(in),
                         "unsupported network file format version",
                         std::runtime_error);
  }
  {
    std::string doctored = text;
    doctored.replace(doctored.find("single-pass"),
                     std::string("single-pass").size(), "other-mode");
    std::istringstream in(doctored);
    CHECK_THROWS_AS(read_network(in), std::runtime_error);
  }
  {
    std::istringstream in("{ not json");
    CHECK_THROWS_AS(read_network(in), std::runtime_error);
  }
}

TEST_CASE("report json uses snake_case keys and drops elapsed on request") {
  ExperimentConfig config;
  config.neuron_count = 2;
  config.sequence_length = 2;
  config.trials = 4;
  const ExperimentReport report = monte_carlo(config);
  const auto with = report_json(report, true);
  const auto without = report_json(report, false);
  CHECK(with.contains("elapsed_seconds"));
  CHECK_FALSE(without.contains("elapsed_seconds"));
  for (const char* key : {"L", "N", "p", "eta_tilde", "mode", "trials", "seed",
                          "confidence", "failures", "rate", "ci_low", "ci_high",
                          "bound_total", "generator"}) {
    CHECK(with.contains(key));
  }
  CHECK(with["mode"] == "single-pass");
  CHECK_FALSE(with.contains("workers"));
}

TEST_CASE("verification json carries failures and inconsistencies") {
  const std::vector<FiringVector> cols = {FiringVector::from_string("10"),
                                          FiringVector::from_string("10"),
                                          FiringVector::from_string("01")};
  const FiringMatrix m = FiringMatrix::from_columns(cols);
  const SinglePassNetwork net = train_single_pass(m, 0.5, 0.125);
  const auto j = verification_json(verify_memorization(net, m));
  CHECK(j["perfect"] == false);
  CHECK(j["failures"].size() > 0);
  CHECK(j["inconsistencies"].size() == 1);
  CHECK(j["failures"][0].contains("kind"));
}

TEST_CASE("csv writers produce the documented headers") {
  {
    const std::vector<SweepRow> rows = {{10, 1e-3, 34002, 0.0009995, 0.0009995, 0.0}};
    std::ostringstream out;
    write_sweep_csv(out, rows);
    CHECK(out.str().rfind("N,target,L_min,bound_at_L_min,term_hebb,term_binom\n",
                          0) == 0);
    CHECK(out.str().find("10,0.001,34002,") != std::string::npos);
  }
  {
    const std::vector<ResidualSample> history = {{0, 1.0, 2.0}, {1, 0.5, 1.0}};
    std::ostringstream out;
    write_residual_csv(out, history);
    CHECK(out.str() ==
          "update_index,residual_max,residual_l2\n0,1,2\n1,0.5,1\n");
  }
  {
    const std::vector<TrialOutcome> outcomes = {{true, 0}, {false, 3}};
    std::ostringstream out;
    write_trials_csv(out, outcomes);
    CHECK(out.str() ==
          "trial_index,perfect,failure_count\n0,1,0\n1,0,3\n");
  }
}

TEST_CASE("mgf json shape") {
  const MgfDiagnostic diag = estimate_mgf(4, 3, 0.5, 0.05, 1000, 1);
  const auto j = mgf_json(diag);
  for (const char* key : {"L", "N", "p", "t", "samples", "seed", "estimate",
                          "bound", "std_error", "mean_s", "mean_s_std_error"}) {
    CHECK(j.contains(key));
  }
}

}  // TEST_SUITE
