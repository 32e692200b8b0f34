#include "seqmem/multi_pass.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <utility>

#include "seqmem/rng.hpp"

namespace seqmem {

namespace {

double bit_dot(BitSpan bits, std::span<const double> values) {
  const auto words = bits.words();
  double dot = 0.0;
  for (std::size_t w = 0; w < words.size(); ++w) {
    std::uint64_t b = words[w];
    while (b) {
      const unsigned i = static_cast<unsigned>(std::countr_zero(b));
      dot += values[w * 64 + i];
      b &= b - 1;
    }
  }
  return dot;
}

void bit_axpy(BitSpan bits, double coef, std::span<double> values) {
  const auto words = bits.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    std::uint64_t b = words[w];
    while (b) {
      const unsigned i = static_cast<unsigned>(std::countr_zero(b));
      values[w * 64 + i] += coef;
      b &= b - 1;
    }
  }
}

std::vector<std::vector<double>> system_gram(const ShiftedSystem& system) {
  const std::size_t n = system.step_count();
  std::vector<std::vector<double>> gram(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double g = static_cast<double>(
          and_popcount(system.rows[i], system.rows[j]));
      gram[i][j] = g;
      gram[j][i] = g;
    }
  }
  return gram;
}

}  // namespace

ShiftedSystem build_shifted_system(const FiringMatrix& matrix) {
  ShiftedSystem system;
  const std::size_t n = matrix.column_count();
  system.rows.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    system.rows.push_back(matrix.column_copy(matrix.predecessor_index(k)));
  }
  system.targets.reserve(matrix.neuron_count());
  for (std::size_t l = 0; l < matrix.neuron_count(); ++l) {
    system.targets.push_back(matrix.row_copy(l));
  }
  return system;
}

std::size_t integer_matrix_rank(const std::vector<std::vector<long long>>& m) {
  if (m.empty() || m[0].empty()) return 0;
  const std::size_t rows = m.size();
  const std::size_t cols = m[0].size();
  std::vector<std::vector<mpz_class>> a(rows, std::vector<mpz_class>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (m[i].size() != cols) {
      throw std::invalid_argument("integer_matrix_rank: ragged matrix");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      a[i][j] = static_cast<long>(m[i][j]);
    }
  }
  // Bareiss elimination with row pivoting and column skipping. Every
  // intermediate entry is a minor of the original matrix, so the division
  // by the previous pivot is exact.
  std::size_t rank = 0;
  mpz_class prev = 1;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[rank]);
    for (std::size_t i = rank + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        mpz_class t = a[rank][c] * a[i][j] - a[i][c] * a[rank][j];
        assert(t % prev == 0);
        a[i][j] = t / prev;
      }
      a[i][c] = 0;
    }
    prev = a[rank][c];
    ++rank;
  }
  return rank;
}

RankResult rank_is_full(const ShiftedSystem& system, std::size_t exact_cap) {
  const std::size_t n = system.step_count();
  if (n > exact_cap) {
    throw std::invalid_argument(
        "exact rank test capped at N <= " + std::to_string(exact_cap) +
        "; use the floating-point rank estimate (--float-rank) for larger systems");
  }
  std::vector<std::vector<long long>> m(n);
  for (std::size_t k = 0; k < n; ++k) {
    const BitSpan row = system.rows[k];
    m[k].resize(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) m[k][i] = row.get(i) ? 1 : 0;
  }
  const std::size_t rank = integer_matrix_rank(m);
  return {rank == n, rank};
}

std::size_t estimate_rank_float(const ShiftedSystem& system, double rel_tol) {
  const std::size_t rows = system.step_count();
  const std::size_t cols = system.neuron_count();
  std::vector<std::vector<double>> a(rows, std::vector<double>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      a[i][j] = system.rows[i].get(j) ? 1.0 : 0.0;
    }
  }
  const double threshold =
      rel_tol * static_cast<double>(std::max(rows, cols));
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    for (std::size_t i = rank + 1; i < rows; ++i) {
      if (std::abs(a[i][c]) > std::abs(a[piv][c])) piv = i;
    }
    if (std::abs(a[piv][c]) <= threshold) continue;
    std::swap(a[piv], a[rank]);
    for (std::size_t i = rank + 1; i < rows; ++i) {
      const double f = a[i][c] / a[rank][c];
      a[i][c] = 0.0;
      for (std::size_t j = c + 1; j < cols; ++j) a[i][j] -= f * a[rank][j];
    }
    ++rank;
  }
  return rank;
}

MaxEigenvalue max_eigenvalue(const ShiftedSystem& system, double rel_tol) {
  const std::size_t n = system.step_count();
  bool all_zero = true;
  for (const auto& row : system.rows) {
    if (row.popcount() != 0) {
      all_zero = false;
      break;
    }
  }
  if (all_zero) return {0.0, true};

  const auto gram = system_gram(system);
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> u(n, 0.0);
  double lambda = 0.0;
  constexpr std::size_t kMaxIterations = 200000;
  for (std::size_t it = 0; it < kMaxIterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += gram[i][j] * v[j];
      u[i] = s;
    }
    double rayleigh = 0.0;
    double norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      rayleigh += v[i] * u[i];
      norm2 += u[i] * u[i];
    }
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) return {0.0, true};
    for (std::size_t i = 0; i < n; ++i) v[i] = u[i] / norm;
    if (it > 0 && std::abs(rayleigh - lambda) <= rel_tol * std::abs(rayleigh)) {
      return {rayleigh, false};
    }
    lambda = rayleigh;
  }
  return {lambda, false};
}

void TrainConfig::validate() const {
  if (max_updates < 1) {
    throw std::invalid_argument("max_updates must be >= 1");
  }
  if (!(tolerance > 0.0)) {
    throw std::invalid_argument("tolerance must be positive");
  }
  if (schedule == StepSchedule::kConstant && !(beta > 0.0)) {
    throw std::invalid_argument("constant schedule requires beta > 0");
  }
  if (!(eta_tilde >= 0.0 && eta_tilde < 1.0)) {
    throw std::invalid_argument("relative disturbance eta_tilde must lie in [0, 1)");
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("firing probability p must lie in (0, 1)");
  }
}

DenseNetwork::DenseNetwork(std::vector<std::vector<double>> weights,
                           NetworkParams params)
    : weights_(std::move(weights)), params_(params) {
  params_.validate();
  if (weights_.size() != params_.neuron_count) {
    throw std::invalid_argument("weight table does not match neuron count");
  }
  for (const auto& w : weights_) {
    if (w.size() != params_.neuron_count) {
      throw std::invalid_argument("weight vector length does not match neuron count");
    }
    for (const double x : w) {
      if (!std::isfinite(x)) {
        throw std::invalid_argument("weights must be finite");
      }
    }
  }
}

double DenseNetwork::inner_product(std::size_t neuron, BitSpan input) const {
  if (neuron >= weights_.size()) {
    throw std::out_of_range("neuron index out of range");
  }
  if (input.size() != params_.neuron_count) {
    throw std::invalid_argument("input length does not match neuron count");
  }
  return bit_dot(input, weights_[neuron]);
}

DenseNetwork DenseNetwork::with_eta_tilde(double eta_tilde) const {
  NetworkParams params = params_;
  params.eta_tilde = eta_tilde;
  return DenseNetwork(weights_, params);
}

GradientDescentResult gradient_descent(const ShiftedSystem& system,
                                       std::size_t neuron,
                                       const TrainConfig& config,
                                       std::span<const double> warm_start) {
  config.validate();
  if (config.schedule != StepSchedule::kConstant) {
    throw std::invalid_argument("gradient descent requires the constant step schedule");
  }
  if (neuron >= system.neuron_count()) {
    throw std::out_of_range("neuron index out of range");
  }
  const MaxEigenvalue lambda = max_eigenvalue(system);
  if (!lambda.zero_matrix &&
      !(config.beta > 0.0 && config.beta < 2.0 / lambda.value)) {
    throw std::invalid_argument(
        "constant step size must lie in (0, 2/lambda_max); lambda_max = " +
        std::to_string(lambda.value));
  }

  const std::size_t l = system.rows.empty() ? 0 : system.rows[0].size();
  const std::size_t n = system.step_count();
  const BitSpan target = system.targets[neuron];
  GradientDescentResult result;
  if (warm_start.empty()) {
    result.weights.assign(l, 0.0);
  } else {
    if (warm_start.size() != l) {
      throw std::invalid_argument("warm start length does not match neuron count");
    }
    result.weights.assign(warm_start.begin(), warm_start.end());
  }
  std::vector<double> residual(n, 0.0);
  for (std::size_t t = 0;; ++t) {
    double max_abs = 0.0;
    double sumsq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double r =
          (target.get(k) ? 1.0 : 0.0) - bit_dot(system.rows[k], result.weights);
      residual[k] = r;
      max_abs = std::max(max_abs, std::abs(r));
      sumsq += r * r;
    }
    result.history.push_back({t, max_abs, std::sqrt(sumsq)});
    if (max_abs <= config.tolerance) {
      result.converged = true;
      break;
    }
    if (t == config.max_updates) break;
    for (std::size_t k = 0; k < n; ++k) {
      if (residual[k] != 0.0) {
        bit_axpy(system.rows[k], config.beta * residual[k], result.weights);
      }
    }
  }
  return result;
}

SgdResult sgd_train(const FiringMatrix& matrix, const TrainConfig& config,
                    unsigned workers) {
  config.validate();
  const std::size_t l_count = matrix.neuron_count();
  const std::size_t n_count = matrix.column_count();
  const ShiftedSystem system = build_shifted_system(matrix);

  std::vector<std::uint64_t> row_pop(n_count);
  for (std::size_t k = 0; k < n_count; ++k) {
    row_pop[k] = system.rows[k].popcount();
  }

  struct NeuronOutcome {
    bool converged = false;
    bool structurally_bad = false;
    std::size_t updates = 0;
    double final_residual = 0.0;
    std::vector<std::pair<double, double>> epochs;  // (max_abs, sumsq)
  };

  std::vector<std::vector<double>> weights(l_count,
                                           std::vector<double>(l_count, 0.0));
  std::vector<NeuronOutcome> outcomes(l_count);

  const auto train_neuron = [&](std::size_t l) {
    auto& w = weights[l];
    auto& out = outcomes[l];
    const BitSpan target = system.targets[l];
    for (std::size_t k = 0; k < n_count; ++k) {
      if (row_pop[k] == 0 && target.get(k)) out.structurally_bad = true;
    }
    Xoshiro256StarStar rng = Xoshiro256StarStar::substream(config.seed, l);
    while (out.updates < config.max_updates && !out.converged) {
      const std::size_t steps =
          std::min<std::size_t>(n_count, config.max_updates - out.updates);
      for (std::size_t s = 0; s < steps; ++s) {
        const std::size_t k = config.order == VisitOrder::kCyclic
                                  ? out.updates % n_count
                                  : rng.next_below(n_count);
        ++out.updates;
        if (row_pop[k] == 0) continue;
        const BitSpan row = system.rows[k];
        const double r = (target.get(k) ? 1.0 : 0.0) - bit_dot(row, w);
        const double beta = config.schedule == StepSchedule::kKaczmarz
                                ? 1.0 / static_cast<double>(row_pop[k])
                                : config.beta;
        bit_axpy(row, beta * r, w);
      }
      double max_abs = 0.0;
      double sumsq = 0.0;
      for (std::size_t k = 0; k < n_count; ++k) {
        const double r = (target.get(k) ? 1.0 : 0.0) - bit_dot(system.rows[k], w);
        max_abs = std::max(max_abs, std::abs(r));
        sumsq += r * r;
      }
      out.epochs.emplace_back(max_abs, sumsq);
      out.final_residual = max_abs;
      if (max_abs <= config.tolerance) out.converged = true;
    }
  };

  if (workers <= 1 || l_count < 2) {
    for (std::size_t l = 0; l < l_count; ++l) train_neuron(l);
  } else {
    const unsigned thread_count =
        std::min<unsigned>(workers, static_cast<unsigned>(l_count));
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (unsigned t = 0; t < thread_count; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t l = t; l < l_count; l += thread_count) train_neuron(l);
      });
    }
    for (auto& th : pool) th.join();
  }

  NetworkParams params{l_count, DenseNetwork::kTheta, config.eta_tilde, config.p};
  SgdResult result{DenseNetwork(std::move(weights), params), false, false, 0, 0.0, {}};
  result.converged = true;
  std::size_t epoch_count = 0;
  for (const auto& out : outcomes) {
    result.converged = result.converged && out.converged;
    result.structurally_unmemorizable =
        result.structurally_unmemorizable || out.structurally_bad;
    result.updates_per_neuron = std::max(result.updates_per_neuron, out.updates);
    result.final_max_residual =
        std::max(result.final_max_residual, out.final_residual);
    epoch_count = std::max(epoch_count, out.epochs.size());
  }
  // Combined per-epoch history; neurons that stopped early carry their last
  // residual forward.
  for (std::size_t e = 0; e < epoch_count; ++e) {
    double max_abs = 0.0;
    double sumsq = 0.0;
    for (const auto& out : outcomes) {
      if (out.epochs.empty()) continue;
      const auto& entry = out.epochs[std::min(e, out.epochs.size() - 1)];
      max_abs = std::max(max_abs, entry.first);
      sumsq += entry.second;
    }
    result.history.push_back(
        {std::min((e + 1) * n_count, config.max_updates), max_abs,
         std::sqrt(sumsq)});
  }
  return result;
}

}  // namespace seqmem
