#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "seqmem/firing.hpp"
#include "seqmem/rng.hpp"

namespace seqmem {

struct NetworkParams {
  std::size_t neuron_count = 0;  // L
  double theta = 0.0;            // firing threshold, shared across neurons
  double eta_tilde = 0.0;        // relative disturbance bound in [0, 1)
  double p = 0.5;                // firing probability assumed at training time

  double eta() const { return eta_tilde * theta; }
  void validate() const;
};

// Threshold used by single-pass training: L*p*(1-p)/4.
inline double single_pass_threshold(std::size_t neuron_count, double p) {
  return 0.25 * static_cast<double>(neuron_count) * p * (1.0 - p);
}

enum class FailureKind { kShouldFire, kShouldNotFire };

struct VerificationFailure {
  std::size_t neuron;  // 0-based
  std::size_t time;    // 0-based target column index
  FailureKind kind;
};

// Outcome of worst-case-disturbance verification. Margins already have the
// disturbance bound eta subtracted: the fire margin is <a,w> - theta - eta
// and the silence margin is theta - eta - <a,w>. Memorization is perfect iff
// every fire margin is >= 0 and every silence margin is > 0, which is the
// condition for the neuron to respond correctly under every disturbance in
// [-eta, eta]. A margin over an empty event set reports +infinity.
struct VerificationReport {
  bool perfect = false;
  std::vector<VerificationFailure> failures;
  double min_fire_margin = std::numeric_limits<double>::infinity();
  double min_silence_margin = std::numeric_limits<double>::infinity();
  // Column pairs (i, j) with equal columns but different successors.
  std::vector<std::pair<std::size_t, std::size_t>> inconsistencies;
};

enum class DisturbancePolicy { kNone, kAdversarial, kSampled };

struct DisturbanceSpec {
  DisturbancePolicy policy = DisturbancePolicy::kNone;
  std::uint64_t seed = 0;  // used by kSampled only
};

// Single threshold neuron: fires iff <input, weights> + disturbance >= theta.
// Ties fire.
int neuron_activation(std::span<const double> weights, double theta,
                      BitSpan input, double disturbance);

// A trained network: immutable, with per-neuron inner products against a
// binary state vector. kMarginEpsilon is the margin magnitude below which a
// verification event counts as failed: 0 for exact-arithmetic networks,
// 1e-12 for networks whose inner products accumulate binary64 rounding.
template <class Net>
concept NetworkModel = requires(const Net& net, std::size_t neuron, BitSpan state) {
  { net.params() } -> std::convertible_to<const NetworkParams&>;
  { net.neuron_count() } -> std::convertible_to<std::size_t>;
  { net.inner_product(neuron, state) } -> std::convertible_to<double>;
  { Net::kMarginEpsilon } -> std::convertible_to<double>;
};

namespace detail {

inline void check_state_size(std::size_t neuron_count, std::size_t state_size) {
  if (neuron_count != state_size) {
    throw std::invalid_argument("state length does not match neuron count");
  }
}

// Shared margin bookkeeping so the per-neuron and the Gram-matrix
// verification paths apply identical pass/fail rules.
class MarginAccumulator {
 public:
  MarginAccumulator(const NetworkParams& params, double margin_epsilon)
      : theta_(params.theta), eta_(params.eta()), epsilon_(margin_epsilon) {}

  void add(std::size_t neuron, std::size_t time, bool must_fire, double ip,
           VerificationReport& report) const {
    if (must_fire) {
      const double margin = ip - theta_ - eta_;
      if (margin < report.min_fire_margin) report.min_fire_margin = margin;
      const bool ok = epsilon_ == 0.0 ? margin >= 0.0 : margin >= epsilon_;
      if (!ok) {
        report.failures.push_back({neuron, time, FailureKind::kShouldFire});
      }
    } else {
      const double margin = theta_ - eta_ - ip;
      if (margin < report.min_silence_margin) report.min_silence_margin = margin;
      const bool ok = epsilon_ == 0.0 ? margin > 0.0 : margin >= epsilon_;
      if (!ok) {
        report.failures.push_back({neuron, time, FailureKind::kShouldNotFire});
      }
    }
  }

 private:
  double theta_;
  double eta_;
  double epsilon_;
};

inline void finish_report(const FiringMatrix& matrix, VerificationReport& report) {
  // canonical order regardless of the traversal the producer used
  std::sort(report.failures.begin(), report.failures.end(),
            [](const VerificationFailure& a, const VerificationFailure& b) {
              return a.neuron != b.neuron ? a.neuron < b.neuron
                                          : a.time < b.time;
            });
  report.inconsistencies = inconsistent_transitions(matrix);
  report.perfect = report.failures.empty() && report.inconsistencies.empty();
}

}  // namespace detail

// One synchronous step of the recurrence: component l of the result is
// neuron_activation with weight vector l and disturbances[l].
template <NetworkModel Net>
FiringVector network_step(const Net& net, BitSpan state,
                          std::span<const double> disturbances) {
  detail::check_state_size(net.neuron_count(), state.size());
  if (disturbances.size() != net.neuron_count()) {
    throw std::invalid_argument("disturbance vector length does not match neuron count");
  }
  const double theta = net.params().theta;
  FiringVector out(net.neuron_count());
  for (std::size_t l = 0; l < net.neuron_count(); ++l) {
    if (net.inner_product(l, state) + disturbances[l] >= theta) {
      out.set(l, true);
    }
  }
  return out;
}

inline std::vector<double> zero_disturbances(std::size_t neuron_count) {
  return std::vector<double>(neuron_count, 0.0);
}

// Worst-case disturbances for a free-running step: each neuron gets the sign
// of +-eta that crosses the threshold if its undisturbed potential is within
// eta of it (firing neurons get -eta, silent ones +eta).
template <NetworkModel Net>
std::vector<double> adversarial_disturbances(const Net& net, BitSpan state) {
  detail::check_state_size(net.neuron_count(), state.size());
  const double theta = net.params().theta;
  const double eta = net.params().eta();
  std::vector<double> d(net.neuron_count());
  for (std::size_t l = 0; l < net.neuron_count(); ++l) {
    d[l] = net.inner_product(l, state) >= theta ? -eta : eta;
  }
  return d;
}

// Free-running trajectory y[1..steps] from the given initial state.
template <NetworkModel Net>
std::vector<FiringVector> run_sequence(const Net& net, const FiringVector& init,
                                       std::size_t steps,
                                       DisturbanceSpec spec = {}) {
  if (steps < 1) {
    throw std::invalid_argument("run_sequence: steps must be >= 1");
  }
  detail::check_state_size(net.neuron_count(), init.size());
  const double eta = net.params().eta();
  Xoshiro256StarStar rng(spec.seed);
  std::vector<FiringVector> trajectory;
  trajectory.reserve(steps);
  FiringVector state = init;
  std::vector<double> d(net.neuron_count(), 0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    switch (spec.policy) {
      case DisturbancePolicy::kNone:
        break;
      case DisturbancePolicy::kAdversarial:
        d = adversarial_disturbances(net, state);
        break;
      case DisturbancePolicy::kSampled:
        for (auto& v : d) v = rng.next_symmetric(eta);
        break;
    }
    state = network_step(net, state, d);
    trajectory.push_back(state);
  }
  return trajectory;
}

// Signed margins without the disturbance bound: entry (l, n) is
// <a_{n-1}, w_l> - theta when the target fires and theta - <a_{n-1}, w_l>
// otherwise. Memorization is eta-robust iff every silence entry exceeds eta
// and every fire entry is at least eta.
template <NetworkModel Net>
std::vector<std::vector<double>> margins(const Net& net, const FiringMatrix& matrix) {
  detail::check_state_size(net.neuron_count(), matrix.neuron_count());
  const double theta = net.params().theta;
  std::vector<std::vector<double>> result(
      net.neuron_count(), std::vector<double>(matrix.column_count(), 0.0));
  for (std::size_t n = 0; n < matrix.column_count(); ++n) {
    const BitSpan input = matrix.predecessor(n);
    for (std::size_t l = 0; l < net.neuron_count(); ++l) {
      const double ip = net.inner_product(l, input);
      result[l][n] = matrix.get(l, n) ? ip - theta : theta - ip;
    }
  }
  return result;
}

// Worst-case-disturbance verification: every required firing must clear
// theta + eta and every required silence must stay strictly below
// theta - eta, so the response is correct for every disturbance sequence
// bounded by eta. Also scans the matrix for inconsistent transitions.
template <NetworkModel Net>
VerificationReport verify_memorization(const Net& net, const FiringMatrix& matrix) {
  detail::check_state_size(net.neuron_count(), matrix.neuron_count());
  VerificationReport report;
  const detail::MarginAccumulator acc(net.params(), Net::kMarginEpsilon);
  for (std::size_t n = 0; n < matrix.column_count(); ++n) {
    const BitSpan input = matrix.predecessor(n);
    for (std::size_t l = 0; l < net.neuron_count(); ++l) {
      acc.add(l, n, matrix.get(l, n), net.inner_product(l, input), report);
    }
  }
  detail::finish_report(matrix, report);
  return report;
}

}  // namespace seqmem
