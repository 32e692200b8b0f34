#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace seqmem {

// Inputs of the memorization failure bound. The bound is stated for
// eta_tilde in (0, 1); evaluation also accepts eta_tilde = 0, which is the
// no-disturbance instance of the same expression.
struct BoundParams {
  std::uint64_t neuron_count = 1;     // L >= 1
  std::uint64_t sequence_length = 2;  // N >= 2
  double p = 0.5;                     // in (0, 1)
  double eta_tilde = 0.125;           // in [0, 1)

  void validate() const;
};

// The two-term failure probability bound
//   2 L N exp(-(1-eta~)^2 p^2 (1-p)^2 L / (8 N))  (interference tail)
// + L N exp(-D_KL((1+eta~)p/2 || p) L)            (binomial lower tail).
// Both terms are assembled in the log domain; underflow to 0 is accepted
// (the true value is smaller than anything representable).
struct BoundResult {
  double term_hebb = 0.0;
  double term_binom = 0.0;
  double total = 0.0;
  double clamped = 0.0;  // min(1, total)
};

// KL divergence (nats) between Bernoulli(p1) and Bernoulli(p2),
// p1 ln(p1/p2) + (1-p1) ln((1-p1)/(1-p2)). Requires 0 < p1, p2 < 1.
double kl_bernoulli(double p1, double p2);

BoundResult theorem_bound(const BoundParams& params);

// Smallest L >= 1 with theorem_bound(...).total <= target, for 0<target<1.
// Found by doubling then bisection; the bracketing postcondition
// bound(L) <= target < bound(L-1) is re-checked before returning.
std::uint64_t min_L_for_target(std::uint64_t sequence_length, double p,
                               double eta_tilde, double target);

// floor((1-eta~)^2 p^2 (1-p)^2 L / (16 ln L)): the longest sequence length
// for which the bound is guaranteed to vanish as L grows. 0 means no
// guaranteed N. Requires L >= 2.
std::uint64_t sufficient_N(std::uint64_t neuron_count, double p,
                           double eta_tilde);

// Chernoff bound on the binomial lower tail:
// Pr[Bin(L, p) <= (1-delta) L p] <= exp(-D_KL((1-delta)p || p) L).
double binomial_tail_bound(std::uint64_t trials, double p, double delta);

// Sum_{i<=k} C(L,i) p^i (1-p)^(L-i), terms evaluated in log space and
// accumulated with compensation; >= 12 significant digits for L <= 1e4.
double exact_binomial_cdf(std::uint64_t trials, double p, std::uint64_t k);

// exp(t^2 L N / 8): the bound on E[exp(t S)] for the interference term S.
double mgf_bound(double t, std::uint64_t neuron_count,
                 std::uint64_t sequence_length);

// Binary entropy in bits.
double binary_entropy(double p);

// C_{p,eta~} = (1-eta~)^2 p^2 (1-p)^2 H_b(p) / 16, the single-pass
// capacity constant in bits.
double capacity_constant(double p, double eta_tilde);

struct CapacitySummary {
  double typical_set_bits;                // H_b(p) N L
  double capacity_constant;               // C_{p, eta~}
  double single_pass_per_neuron_lb;       // C_{p, eta~} L / ln L
  double multi_pass_per_neuron_lb;        // H_b(p) L
  double single_pass_per_connection_lb;   // C_{p, eta~} / ln L
  double multi_pass_per_connection_lb;    // H_b(p)
  double hopfield_hebbian_reference;      // L / (2 ln L), documentation value
  double hopfield_storkey_reference;      // L / sqrt(2 ln L), documentation value
};

CapacitySummary capacity_summary(std::uint64_t neuron_count,
                                 std::uint64_t sequence_length, double p,
                                 double eta_tilde);

struct SweepRow {
  std::uint64_t sequence_length;
  double target;
  std::uint64_t min_neuron_count;
  double bound_at_min;
  double term_hebb;
  double term_binom;
};

// One row per (N, target) pair, N ascending then target descending.
std::vector<SweepRow> bound_sweep(std::span<const std::uint64_t> n_values,
                                  std::span<const double> targets, double p,
                                  double eta_tilde);

// The parameter grid of the reference level plot: 17 sequence lengths,
// levels 1e-3 .. 1e-12, p = 1/2, eta~ = 1/8.
std::vector<std::uint64_t> default_sweep_n_values();
std::vector<double> default_sweep_targets();

}  // namespace seqmem
