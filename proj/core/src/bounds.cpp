#include "seqmem/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace seqmem {

namespace {

void check_probability(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in (0, 1)");
  }
}

double hebb_rate(double p, double eta_tilde) {
  const double q = (1.0 - eta_tilde) * p * (1.0 - p);
  return 0.125 * q * q;
}

}  // namespace

void BoundParams::validate() const {
  if (neuron_count < 1) {
    throw std::invalid_argument("L must be >= 1");
  }
  if (sequence_length < 2) {
    throw std::invalid_argument("N must be >= 2");
  }
  check_probability(p, "p");
  if (!(eta_tilde >= 0.0 && eta_tilde < 1.0)) {
    throw std::invalid_argument("eta_tilde must lie in [0, 1)");
  }
}

double kl_bernoulli(double p1, double p2) {
  check_probability(p1, "p1");
  check_probability(p2, "p2");
  return p1 * std::log(p1 / p2) + (1.0 - p1) * std::log((1.0 - p1) / (1.0 - p2));
}

BoundResult theorem_bound(const BoundParams& params) {
  params.validate();
  const double l = static_cast<double>(params.neuron_count);
  const double n = static_cast<double>(params.sequence_length);
  const double log_ln = std::log(l) + std::log(n);

  const double hebb_exponent =
      std::log(2.0) + log_ln - hebb_rate(params.p, params.eta_tilde) * l / n;
  const double kl =
      kl_bernoulli(0.5 * (1.0 + params.eta_tilde) * params.p, params.p);
  const double binom_exponent = log_ln - kl * l;

  BoundResult result;
  result.term_hebb = std::exp(hebb_exponent);
  result.term_binom = std::exp(binom_exponent);
  result.total = result.term_hebb + result.term_binom;
  result.clamped = std::min(1.0, result.total);
  return result;
}

std::uint64_t min_L_for_target(std::uint64_t sequence_length, double p,
                               double eta_tilde, double target) {
  if (!(target > 0.0 && target < 1.0)) {
    throw std::invalid_argument("target must lie in (0, 1)");
  }
  const auto bound_at = [&](std::uint64_t l) {
    return theorem_bound({l, sequence_length, p, eta_tilde}).total;
  };

  // The bound rises with L while the log factor dominates and then decays
  // exponentially; for targets below 1 the only crossing is on the decaying
  // branch, so doubling from 1 brackets it.
  constexpr std::uint64_t kSearchCap = std::uint64_t{1} << 62;
  std::uint64_t hi = 1;
  std::uint64_t lo = 1;
  while (bound_at(hi) > target) {
    lo = hi;
    if (hi >= kSearchCap) {
      throw std::runtime_error("no crossing found within the search range");
    }
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (bound_at(mid) <= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if (!(bound_at(hi) <= target) ||
      (hi > 1 && !(bound_at(hi - 1) > target))) {
    throw std::logic_error("bracketing postcondition failed in min_L_for_target");
  }
  return hi;
}

std::uint64_t sufficient_N(std::uint64_t neuron_count, double p,
                           double eta_tilde) {
  if (neuron_count < 2) {
    throw std::invalid_argument("L must be >= 2");
  }
  check_probability(p, "p");
  if (!(eta_tilde >= 0.0 && eta_tilde < 1.0)) {
    throw std::invalid_argument("eta_tilde must lie in [0, 1)");
  }
  const double l = static_cast<double>(neuron_count);
  const double value = hebb_rate(p, eta_tilde) * l / (2.0 * std::log(l));
  return static_cast<std::uint64_t>(std::floor(value));
}

double binomial_tail_bound(std::uint64_t trials, double p, double delta) {
  check_probability(p, "p");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  return std::exp(-kl_bernoulli((1.0 - delta) * p, p) *
                  static_cast<double>(trials));
}

double exact_binomial_cdf(std::uint64_t trials, double p, std::uint64_t k) {
  check_probability(p, "p");
  if (k > trials) {
    throw std::invalid_argument("k must satisfy 0 <= k <= trials");
  }
  if (k == trials) return 1.0;
  // Terms in log space via lgamma, accumulated with Kahan compensation.
  // Extended precision keeps the result good to 12+ significant digits up
  // to trials ~ 1e4 despite exponents of order 1e4.
  const long double n = static_cast<long double>(trials);
  const long double log_p = std::log(static_cast<long double>(p));
  const long double log_q = std::log1p(static_cast<long double>(-p));
  const long double lg_n1 = std::lgamma(n + 1.0L);
  long double sum = 0.0L;
  long double carry = 0.0L;
  for (std::uint64_t i = 0; i <= k; ++i) {
    const long double x = static_cast<long double>(i);
    const long double log_term = lg_n1 - std::lgamma(x + 1.0L) -
                                 std::lgamma(n - x + 1.0L) + x * log_p +
                                 (n - x) * log_q;
    const long double term = std::exp(log_term);
    const long double y = term - carry;
    const long double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return static_cast<double>(std::min(sum, 1.0L));
}

double mgf_bound(double t, std::uint64_t neuron_count,
                 std::uint64_t sequence_length) {
  return std::exp(t * t * static_cast<double>(neuron_count) *
                  static_cast<double>(sequence_length) / 8.0);
}

double binary_entropy(double p) {
  check_probability(p, "p");
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double capacity_constant(double p, double eta_tilde) {
  const double q = (1.0 - eta_tilde) * p * (1.0 - p);
  return q * q * binary_entropy(p) / 16.0;
}

CapacitySummary capacity_summary(std::uint64_t neuron_count,
                                 std::uint64_t sequence_length, double p,
                                 double eta_tilde) {
  const double l = static_cast<double>(neuron_count);
  const double n = static_cast<double>(sequence_length);
  const double h = binary_entropy(p);
  const double c = capacity_constant(p, eta_tilde);
  const double log_l = std::log(l);
  CapacitySummary s;
  s.typical_set_bits = h * n * l;
  s.capacity_constant = c;
  s.single_pass_per_neuron_lb = c * l / log_l;
  s.multi_pass_per_neuron_lb = h * l;
  s.single_pass_per_connection_lb = c / log_l;
  s.multi_pass_per_connection_lb = h;
  s.hopfield_hebbian_reference = l / (2.0 * log_l);
  s.hopfield_storkey_reference = l / std::sqrt(2.0 * log_l);
  return s;
}

std::vector<SweepRow> bound_sweep(std::span<const std::uint64_t> n_values,
                                  std::span<const double> targets, double p,
                                  double eta_tilde) {
  std::vector<std::uint64_t> ns(n_values.begin(), n_values.end());
  std::vector<double> ts(targets.begin(), targets.end());
  std::sort(ns.begin(), ns.end());
  std::sort(ts.begin(), ts.end(), std::greater<>());
  std::vector<SweepRow> rows;
  rows.reserve(ns.size() * ts.size());
  for (const std::uint64_t n : ns) {
    for (const double target : ts) {
      const std::uint64_t l = min_L_for_target(n, p, eta_tilde, target);
      const BoundResult b = theorem_bound({l, n, p, eta_tilde});
      rows.push_back({n, target, l, b.total, b.term_hebb, b.term_binom});
    }
  }
  return rows;
}

std::vector<std::uint64_t> default_sweep_n_values() {
  return {10,   30,   60,   100,  300,  600,  1000, 1300, 2000,
          2300, 3000, 4000, 5000, 6000, 7000, 8000, 10000};
}

std::vector<double> default_sweep_targets() {
  return {1e-3, 1e-6, 1e-9, 1e-12};
}

}  // namespace seqmem
