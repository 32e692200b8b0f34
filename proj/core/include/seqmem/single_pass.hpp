#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "seqmem/firing.hpp"
#include "seqmem/network.hpp"

namespace seqmem {

// One-shot quasi-Hebbian network in its exact integer representation.
// Neuron l stores the count vector c_l = sum of predecessor columns over the
// firing set J_l = {n : a_{l,n} = 1} together with |J_l|; the implied real
// weight vector is w_l = c_l - |J_l| * p * 1. Keeping counts instead of
// reals makes training order-independent, serialization lossless, and the
// inner product <a, w_l> computable with a single rounding beyond the
// representation of p.
class SinglePassNetwork {
 public:
  static constexpr double kMarginEpsilon = 0.0;

  SinglePassNetwork(std::vector<std::vector<std::uint32_t>> counts,
                    std::vector<std::uint32_t> j_card, NetworkParams params);

  const NetworkParams& params() const { return params_; }
  std::size_t neuron_count() const { return params_.neuron_count; }

  // <input, c_l> as an exact integer.
  std::uint64_t count_dot(std::size_t neuron, BitSpan input) const;

  // <input, w_l> = <input, c_l> - p * |J_l| * popcount(input), evaluated as
  // fma(-p, |J_l|*popcount, count_dot): one rounding total.
  double inner_product(std::size_t neuron, BitSpan input) const;

  std::span<const std::uint32_t> counts(std::size_t neuron) const {
    return counts_.at(neuron);
  }
  std::uint32_t j_cardinality(std::size_t neuron) const {
    return j_card_.at(neuron);
  }

  // Implied real weights, materialized on demand.
  double weight(std::size_t neuron, std::size_t i) const;
  std::vector<double> weight_vector(std::size_t neuron) const;

  SinglePassNetwork with_eta_tilde(double eta_tilde) const;

 private:
  std::vector<std::vector<std::uint32_t>> counts_;
  std::vector<std::uint32_t> j_card_;
  NetworkParams params_;
};

// Whole-sequence training: one pass over the columns, threshold
// L*p*(1-p)/4, wrap-around a_0 := a_N resolved internally.
SinglePassNetwork train_single_pass(const FiringMatrix& matrix, double p,
                                    double eta_tilde);

// Strictly online training state. The caller supplies the firing vector
// preceding the first column (for cyclic sequences that is the last column;
// a truly online learner must obtain it out of band).
class StreamState {
 public:
  StreamState(FiringVector initial, double p, double eta_tilde);

  // Consume the firing vector of the next time step. Only rows firing in
  // `column` are touched; only the previous firing vector is read.
  void consume(const FiringVector& column);

  std::size_t step() const { return step_; }
  const FiringVector& previous() const { return previous_; }
  std::span<const std::uint32_t> counts(std::size_t neuron) const {
    return counts_.at(neuron);
  }
  std::uint32_t j_cardinality(std::size_t neuron) const {
    return j_card_.at(neuron);
  }

  SinglePassNetwork finish() const;

 private:
  std::vector<std::vector<std::uint32_t>> counts_;
  std::vector<std::uint32_t> j_card_;
  FiringVector previous_;
  std::size_t step_ = 0;
  double p_;
  double eta_tilde_;
};

// Functional form of StreamState::consume.
StreamState stream_update(StreamState state, const FiringVector& column);

// Worst-case verification of single-pass memorization straight from the
// pattern matrix, without materializing count vectors. Uses the Gram
// identity <a_{n-1}, w_l> = sum_{j in J_l} G[n-1][j-1] - p |J_l| pc(a_{n-1})
// with G[i][j] = popcount(a_i AND a_j), which turns verification into
// O(N^2 L / 64 + L N^2 p) work and reproduces the exact inner products
// bit for bit. This is the designated fast path for Monte Carlo trials.
VerificationReport verify_single_pass_gram(const FiringMatrix& matrix, double p,
                                           double eta_tilde);

}  // namespace seqmem
