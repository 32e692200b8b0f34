#include "seqmem/experiments.hpp"

#include <boost/math/distributions/binomial.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "seqmem/bounds.hpp"
#include "seqmem/single_pass.hpp"

namespace seqmem {

void ExperimentConfig::validate() const {
  if (neuron_count < 1) {
    throw std::invalid_argument("L must be >= 1");
  }
  if (sequence_length < 2) {
    throw std::invalid_argument("N must be >= 2");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("p must lie in [0, 1]");
  }
  if (!(eta_tilde >= 0.0 && eta_tilde < 1.0)) {
    throw std::invalid_argument("eta_tilde must lie in [0, 1)");
  }
  if (trials < 1) {
    throw std::invalid_argument("trials must be >= 1");
  }
  if (workers < 1) {
    throw std::invalid_argument("workers must be >= 1");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("confidence must lie in (0, 1)");
  }
}

ConfidenceInterval clopper_pearson(std::uint64_t successes,
                                   std::uint64_t trials, double confidence) {
  if (trials < 1 || successes > trials) {
    throw std::invalid_argument("clopper_pearson: need 0 <= successes <= trials");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("confidence must lie in (0, 1)");
  }
  using boost::math::binomial_distribution;
  const double alpha = 1.0 - confidence;
  ConfidenceInterval ci;
  ci.low = binomial_distribution<double>::find_lower_bound_on_p(
      static_cast<double>(trials), static_cast<double>(successes), alpha / 2,
      binomial_distribution<double>::clopper_pearson_exact_interval);
  ci.high = binomial_distribution<double>::find_upper_bound_on_p(
      static_cast<double>(trials), static_cast<double>(successes), alpha / 2,
      binomial_distribution<double>::clopper_pearson_exact_interval);
  return ci;
}

FiringMatrix sample_bernoulli_matrix(std::size_t neuron_count,
                                     std::size_t sequence_length, double p,
                                     Xoshiro256StarStar& rng) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("p must lie in [0, 1]");
  }
  FiringMatrix m(neuron_count, sequence_length);
  for (std::size_t n = 0; n < sequence_length; ++n) {
    for (std::size_t l = 0; l < neuron_count; ++l) {
      if (rng.next_double() < p) m.set(l, n, true);
    }
  }
  return m;
}

namespace {

TrialOutcome evaluate_trial(const ExperimentConfig& config,
                            const FiringMatrix& matrix) {
  if (config.mode == TrainMode::kSinglePass) {
    const VerificationReport report =
        verify_single_pass_gram(matrix, config.p, config.eta_tilde);
    return {report.perfect, report.failures.size()};
  }
  TrainConfig train = config.multi;
  train.eta_tilde = config.eta_tilde;
  train.p = config.p;
  const SgdResult sgd = sgd_train(matrix, train);
  const VerificationReport report = verify_memorization(sgd.network, matrix);
  const bool perfect = report.perfect && !sgd.structurally_unmemorizable;
  return {perfect, report.failures.size()};
}

}  // namespace

TrialOutcome run_trial(const ExperimentConfig& config,
                       std::uint64_t trial_index) {
  config.validate();
  Xoshiro256StarStar rng = Xoshiro256StarStar::substream(config.seed, trial_index);
  const FiringMatrix matrix = sample_bernoulli_matrix(
      config.neuron_count, config.sequence_length, config.p, rng);
  return evaluate_trial(config, matrix);
}

ExperimentReport monte_carlo(const ExperimentConfig& config, bool keep_trials) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  std::vector<TrialOutcome> outcomes(config.trials);
  const auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      Xoshiro256StarStar rng = Xoshiro256StarStar::substream(config.seed, i);
      const FiringMatrix matrix = sample_bernoulli_matrix(
          config.neuron_count, config.sequence_length, config.p, rng);
      outcomes[i] = evaluate_trial(config, matrix);
    }
  };

  const unsigned workers = static_cast<unsigned>(
      std::min<std::uint64_t>(config.workers, config.trials));
  if (workers <= 1) {
    run_range(0, config.trials);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::uint64_t chunk = (config.trials + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = static_cast<std::uint64_t>(w) * chunk;
      const std::uint64_t end = std::min<std::uint64_t>(begin + chunk, config.trials);
      if (begin >= end) break;
      pool.emplace_back(run_range, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  ExperimentReport report;
  report.config = config;
  for (const TrialOutcome& out : outcomes) {
    if (!out.perfect) ++report.failures;
  }
  report.rate = static_cast<double>(report.failures) /
                static_cast<double>(config.trials);
  const ConfidenceInterval ci =
      clopper_pearson(report.failures, config.trials, config.confidence);
  report.ci_low = ci.low;
  report.ci_high = ci.high;
  // The analytic bound applies to the single-pass rule; it is reported for
  // both modes as the reference value at these parameters. Degenerate p has
  // no bound (the formula needs 0 < p < 1).
  if (config.p > 0.0 && config.p < 1.0) {
    report.bound_total = theorem_bound({config.neuron_count,
                                        config.sequence_length, config.p,
                                        config.eta_tilde})
                             .total;
  } else {
    report.bound_total = 1.0;
  }
  report.generator = std::string(Xoshiro256StarStar::kName);
  if (keep_trials) report.trial_outcomes = std::move(outcomes);
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

double exhaustive_exact(std::size_t neuron_count, std::size_t sequence_length,
                        double p, double eta_tilde, std::size_t cap_bits) {
  const std::size_t bits = neuron_count * sequence_length;
  if (bits > cap_bits) {
    throw std::invalid_argument(
        "exhaustive enumeration capped at L*N <= " + std::to_string(cap_bits));
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("p must lie in (0, 1)");
  }
  // Weights of failing matrices are accumulated with Kahan compensation.
  double failure_mass = 0.0;
  double carry = 0.0;
  FiringMatrix matrix(neuron_count, sequence_length);
  const std::uint64_t total = std::uint64_t{1} << bits;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    std::size_t ones = 0;
    for (std::size_t b = 0; b < bits; ++b) {
      const bool bit = (mask >> b) & 1u;
      if (bit) ++ones;
      matrix.set(b % neuron_count, b / neuron_count, bit);
    }
    const VerificationReport report =
        verify_single_pass_gram(matrix, p, eta_tilde);
    if (report.perfect) continue;
    const double weight =
        std::pow(p, static_cast<double>(ones)) *
        std::pow(1.0 - p, static_cast<double>(bits - ones));
    const double y = weight - carry;
    const double t = failure_mass + y;
    carry = (t - failure_mass) - y;
    failure_mass = t;
  }
  return failure_mass;
}

MgfDiagnostic estimate_mgf(std::size_t neuron_count,
                           std::size_t sequence_length, double p, double t,
                           std::uint64_t samples, std::uint64_t seed) {
  if (samples < 1000) {
    throw std::invalid_argument("samples must be >= 1000");
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("p must lie in (0, 1)");
  }
  MgfDiagnostic diag;
  diag.neuron_count = neuron_count;
  diag.sequence_length = sequence_length;
  diag.p = p;
  diag.t = t;
  diag.samples = samples;
  diag.seed = seed;
  diag.bound = mgf_bound(t, neuron_count, sequence_length);

  double sum_e = 0.0;
  double sum_e2 = 0.0;
  double sum_s = 0.0;
  double sum_s2 = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    Xoshiro256StarStar rng = Xoshiro256StarStar::substream(seed, i);
    const FiringMatrix m =
        sample_bernoulli_matrix(neuron_count, sequence_length, p, rng);
    // S at (neuron 0, step 0): the input is the last column; every other
    // step j with a_{0,j} = 1 contributes <input, a_{j-1}> - p*pc(input).
    const BitSpan input = m.predecessor(0);
    const double shift = p * static_cast<double>(input.popcount());
    double s = 0.0;
    for (std::size_t j = 1; j < sequence_length; ++j) {
      if (!m.get(0, j)) continue;
      s += static_cast<double>(and_popcount(input, m.predecessor(j))) - shift;
    }
    const double e = std::exp(t * s);
    sum_e += e;
    sum_e2 += e * e;
    sum_s += s;
    sum_s2 += s * s;
  }
  const double n = static_cast<double>(samples);
  diag.estimate = sum_e / n;
  diag.mean_s = sum_s / n;
  const double var_e = std::max(0.0, sum_e2 / n - diag.estimate * diag.estimate);
  const double var_s = std::max(0.0, sum_s2 / n - diag.mean_s * diag.mean_s);
  diag.std_error = std::sqrt(var_e / n);
  diag.mean_s_std_error = std::sqrt(var_s / n);
  return diag;
}

}  // namespace seqmem
