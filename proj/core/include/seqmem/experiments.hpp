#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seqmem/firing.hpp"
#include "seqmem/multi_pass.hpp"
#include "seqmem/rng.hpp"

namespace seqmem {

enum class TrainMode { kSinglePass, kMultiPass };

struct ExperimentConfig {
  std::size_t neuron_count = 1;     // L
  std::size_t sequence_length = 2;  // N
  double p = 0.5;
  double eta_tilde = 0.125;
  TrainMode mode = TrainMode::kSinglePass;
  TrainConfig multi;                // used when mode == kMultiPass
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  unsigned workers = 1;             // performance knob, never affects results
  double confidence = 0.99;         // for the Clopper-Pearson interval

  void validate() const;
};

struct TrialOutcome {
  bool perfect = false;
  std::uint64_t failure_count = 0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::uint64_t failures = 0;       // trials with imperfect memorization
  double rate = 0.0;                // failures / trials
  double ci_low = 0.0;              // exact (Clopper-Pearson) interval
  double ci_high = 1.0;
  double bound_total = 0.0;         // failure bound at the same parameters
  double elapsed_seconds = 0.0;
  std::string generator;            // PRNG algorithm name and version
  std::vector<TrialOutcome> trial_outcomes;  // filled only on request
};

struct ConfidenceInterval {
  double low = 0.0;
  double high = 1.0;
};

// Exact two-sided binomial confidence interval for `successes` out of
// `trials` at the given confidence level.
ConfidenceInterval clopper_pearson(std::uint64_t successes,
                                   std::uint64_t trials, double confidence);

// i.i.d. Bernoulli(p) matrix drawn from the given stream, filled column by
// column, within a column from neuron 0 upward; one stream read per entry.
FiringMatrix sample_bernoulli_matrix(std::size_t neuron_count,
                                     std::size_t sequence_length, double p,
                                     Xoshiro256StarStar& rng);

// One seeded trial: draw a matrix from substream(config.seed, trial_index),
// train in the configured mode, verify under worst-case disturbance (Gram
// fast path for single-pass). Multi-pass structural unmemorizability counts
// as a failure.
TrialOutcome run_trial(const ExperimentConfig& config, std::uint64_t trial_index);

// Runs config.trials independent trials distributed over config.workers.
// Aggregation is a sum of counts, so the report does not depend on the
// worker count or the scheduling order. Set keep_trials to retain one
// TrialOutcome per trial (for CSV dumps).
ExperimentReport monte_carlo(const ExperimentConfig& config,
                             bool keep_trials = false);

// Exact failure probability by enumerating every binary L x N matrix,
// weighting each by p^ones (1-p)^zeros and verifying it under worst-case
// disturbance with single-pass training. Capped at L*N <= cap_bits.
double exhaustive_exact(std::size_t neuron_count, std::size_t sequence_length,
                        double p, double eta_tilde, std::size_t cap_bits = 20);

struct MgfDiagnostic {
  std::size_t neuron_count = 0;
  std::size_t sequence_length = 0;
  double p = 0.0;
  double t = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double estimate = 0.0;         // sample mean of exp(t S)
  double bound = 0.0;            // exp(t^2 L N / 8)
  double std_error = 0.0;        // standard error of the estimate
  double mean_s = 0.0;           // sample mean of S
  double mean_s_std_error = 0.0;
};

// Samples the interference statistic S at the fixed entry (neuron 0,
// step 0): S = sum over the other steps j of a_{0,j} <a_{N-1}, a_{j-1} - p>,
// one fresh matrix per sample, and compares the empirical MGF to its bound.
MgfDiagnostic estimate_mgf(std::size_t neuron_count,
                           std::size_t sequence_length, double p, double t,
                           std::uint64_t samples, std::uint64_t seed);

}  // namespace seqmem
