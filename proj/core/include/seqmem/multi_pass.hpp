#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "seqmem/firing.hpp"
#include "seqmem/network.hpp"

namespace seqmem {

// Least-squares view of memorization: row k of the N x L system matrix is
// the firing vector one step before target step k (row 0 is the last
// column), and target l is the length-N firing history of neuron l.
// Solving rows * w_l = target_l for every l is exactly the condition for
// perfect replay.
struct ShiftedSystem {
  std::vector<FiringVector> rows;     // N rows, each of length L
  std::vector<FiringVector> targets;  // L targets, each of length N

  std::size_t neuron_count() const { return targets.size(); }   // L
  std::size_t step_count() const { return rows.size(); }        // N
};

ShiftedSystem build_shifted_system(const FiringMatrix& matrix);

// Rank over the rationals of an integer matrix, by fraction-free (Bareiss)
// Gaussian elimination in arbitrary-precision integers. Exact: no
// floating-point tolerance anywhere.
std::size_t integer_matrix_rank(const std::vector<std::vector<long long>>& m);

struct RankResult {
  bool full;         // rank == N
  std::size_t rank;
};

// Exact rank test of the shifted system. Throws when N exceeds `exact_cap`
// (intermediate minors grow fast); estimate_rank_float is the escape hatch
// for larger systems.
RankResult rank_is_full(const ShiftedSystem& system, std::size_t exact_cap = 512);

// Floating-point rank estimate (row echelon with partial pivoting and a
// relative tolerance). Not exact; provided for systems beyond the exact cap.
std::size_t estimate_rank_float(const ShiftedSystem& system,
                                double rel_tol = 1e-9);

struct MaxEigenvalue {
  double value = 0.0;
  bool zero_matrix = false;
};

// Largest eigenvalue of rows^T rows by power iteration on the N x N Gram
// matrix (same nonzero spectrum). Converges to relative tolerance rel_tol;
// an all-zero system yields {0, true}.
MaxEigenvalue max_eigenvalue(const ShiftedSystem& system, double rel_tol = 1e-10);

enum class StepSchedule { kKaczmarz, kConstant };
enum class VisitOrder { kCyclic, kRandom };

struct TrainConfig {
  StepSchedule schedule = StepSchedule::kKaczmarz;
  double beta = 0.0;             // constant schedule only
  std::size_t max_updates = 1;   // K, per neuron
  double tolerance = 1e-9;       // max-abs residual for convergence
  std::uint64_t seed = 0;        // row sampling, random order only
  VisitOrder order = VisitOrder::kRandom;
  double eta_tilde = 0.0;        // carried into the trained network params
  double p = 0.5;                // carried into the trained network params

  void validate() const;
};

struct ResidualSample {
  std::size_t update_index;
  double residual_max;
  double residual_l2;
};

// Dense real-weight network produced by multi-pass training. Operating
// threshold is 0.5: targets are 0/1, so an exact least-squares solution has
// symmetric margin 0.5 on both sides.
class DenseNetwork {
 public:
  // Margins this close to zero are treated as failures during
  // verification: binary64 dot products carry rounding of that order.
  static constexpr double kMarginEpsilon = 1e-12;
  static constexpr double kTheta = 0.5;

  DenseNetwork(std::vector<std::vector<double>> weights, NetworkParams params);

  const NetworkParams& params() const { return params_; }
  std::size_t neuron_count() const { return params_.neuron_count; }
  double inner_product(std::size_t neuron, BitSpan input) const;
  std::span<const double> weight_vector(std::size_t neuron) const {
    return weights_.at(neuron);
  }
  DenseNetwork with_eta_tilde(double eta_tilde) const;

 private:
  std::vector<std::vector<double>> weights_;
  NetworkParams params_;
};

struct GradientDescentResult {
  std::vector<double> weights;
  std::vector<ResidualSample> history;  // index 0 = initial residual
  bool converged = false;
};

// Full-gradient iteration w <- w + beta * rows^T (target - rows * w) for one
// neuron, from w = 0 or from the supplied warm start. Requires the constant
// schedule with 0 < beta < 2 / lambda_max(rows^T rows); validated against
// max_eigenvalue.
GradientDescentResult gradient_descent(const ShiftedSystem& system,
                                       std::size_t neuron,
                                       const TrainConfig& config,
                                       std::span<const double> warm_start = {});

struct SgdResult {
  DenseNetwork network;
  bool converged = false;
  // Some all-zero input column has a successor that must fire: no weight
  // vector can satisfy that pair, the residual floor is 1.
  bool structurally_unmemorizable = false;
  std::size_t updates_per_neuron = 0;  // max consumed by any neuron
  double final_max_residual = 0.0;
  std::vector<ResidualSample> history;  // per epoch, across all neurons
};

// Row-projection SGD over the cyclic sequence: on visiting column n every
// neuron l applies w_l += beta (a_{l,n} - <a_{n-1}, w_l>) a_{n-1}. The
// kaczmarz schedule uses beta = 1/popcount(a_{n-1}) (exact projection) and
// skips zero rows. The L per-neuron problems are decoupled; each draws its
// row order from a substream of config.seed, so results are independent of
// worker scheduling. Residuals are checked once per epoch (N updates).
SgdResult sgd_train(const FiringMatrix& matrix, const TrainConfig& config,
                    unsigned workers = 1);

}  // namespace seqmem
