#include "seqmem/single_pass.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace seqmem {

namespace {

void validate_training_params(double p, double eta_tilde) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("training probability p must lie in (0, 1)");
  }
  if (!(eta_tilde >= 0.0 && eta_tilde < 1.0)) {
    throw std::invalid_argument("relative disturbance eta_tilde must lie in [0, 1)");
  }
}

}  // namespace

SinglePassNetwork::SinglePassNetwork(
    std::vector<std::vector<std::uint32_t>> counts,
    std::vector<std::uint32_t> j_card, NetworkParams params)
    : counts_(std::move(counts)), j_card_(std::move(j_card)),
      params_(params) {
  params_.validate();
  if (counts_.size() != params_.neuron_count ||
      j_card_.size() != params_.neuron_count) {
    throw std::invalid_argument("count table does not match neuron count");
  }
  for (const auto& row : counts_) {
    if (row.size() != params_.neuron_count) {
      throw std::invalid_argument("count vector length does not match neuron count");
    }
  }
}

std::uint64_t SinglePassNetwork::count_dot(std::size_t neuron, BitSpan input) const {
  if (neuron >= counts_.size()) {
    throw std::out_of_range("neuron index out of range");
  }
  if (input.size() != params_.neuron_count) {
    throw std::invalid_argument("input length does not match neuron count");
  }
  const auto& c = counts_[neuron];
  const auto words = input.words();
  std::uint64_t dot = 0;
  for (std::size_t w = 0; w < words.size(); ++w) {
    std::uint64_t bits = words[w];
    while (bits) {
      const unsigned b = static_cast<unsigned>(std::countr_zero(bits));
      dot += c[w * 64 + b];
      bits &= bits - 1;
    }
  }
  return dot;
}

double SinglePassNetwork::inner_product(std::size_t neuron, BitSpan input) const {
  const std::uint64_t dot = count_dot(neuron, input);
  const std::uint64_t scale =
      static_cast<std::uint64_t>(j_card_[neuron]) * input.popcount();
  return std::fma(-params_.p, static_cast<double>(scale),
                  static_cast<double>(dot));
}

double SinglePassNetwork::weight(std::size_t neuron, std::size_t i) const {
  return static_cast<double>(counts_.at(neuron).at(i)) -
         static_cast<double>(j_card_[neuron]) * params_.p;
}

std::vector<double> SinglePassNetwork::weight_vector(std::size_t neuron) const {
  const auto& c = counts_.at(neuron);
  const double shift = static_cast<double>(j_card_[neuron]) * params_.p;
  std::vector<double> w(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    w[i] = static_cast<double>(c[i]) - shift;
  }
  return w;
}

SinglePassNetwork SinglePassNetwork::with_eta_tilde(double eta_tilde) const {
  NetworkParams params = params_;
  params.eta_tilde = eta_tilde;
  return SinglePassNetwork(counts_, j_card_, params);
}

SinglePassNetwork train_single_pass(const FiringMatrix& matrix, double p,
                                    double eta_tilde) {
  validate_training_params(p, eta_tilde);
  const std::size_t l_count = matrix.neuron_count();
  const std::size_t n_count = matrix.column_count();
  std::vector<std::vector<std::uint32_t>> counts(
      l_count, std::vector<std::uint32_t>(l_count, 0));
  std::vector<std::uint32_t> j_card(l_count, 0);
  // Row-driven direct evaluation: neuron l accumulates the predecessor of
  // every column where it is supposed to fire.
  for (std::size_t l = 0; l < l_count; ++l) {
    auto& c = counts[l];
    for (std::size_t n = 0; n < n_count; ++n) {
      if (!matrix.get(l, n)) continue;
      ++j_card[l];
      const BitSpan prev = matrix.predecessor(n);
      const auto words = prev.words();
      for (std::size_t w = 0; w < words.size(); ++w) {
        std::uint64_t bits = words[w];
        while (bits) {
          const unsigned b = static_cast<unsigned>(std::countr_zero(bits));
          ++c[w * 64 + b];
          bits &= bits - 1;
        }
      }
    }
  }
  NetworkParams params{l_count, single_pass_threshold(l_count, p), eta_tilde, p};
  return SinglePassNetwork(std::move(counts), std::move(j_card), params);
}

StreamState::StreamState(FiringVector initial, double p, double eta_tilde)
    : counts_(initial.size(), std::vector<std::uint32_t>(initial.size(), 0)),
      j_card_(initial.size(), 0),
      previous_(std::move(initial)),
      p_(p),
      eta_tilde_(eta_tilde) {
  validate_training_params(p, eta_tilde);
}

void StreamState::consume(const FiringVector& column) {
  if (column.size() != previous_.size()) {
    throw std::invalid_argument("column length does not match neuron count");
  }
  const auto prev_words = previous_.view().words();
  const auto col_words = column.view().words();
  for (std::size_t w = 0; w < col_words.size(); ++w) {
    std::uint64_t bits = col_words[w];
    while (bits) {
      const unsigned b = static_cast<unsigned>(std::countr_zero(bits));
      const std::size_t l = w * 64 + b;
      auto& c = counts_[l];
      ++j_card_[l];
      for (std::size_t pw = 0; pw < prev_words.size(); ++pw) {
        std::uint64_t pbits = prev_words[pw];
        while (pbits) {
          const unsigned pb = static_cast<unsigned>(std::countr_zero(pbits));
          ++c[pw * 64 + pb];
          pbits &= pbits - 1;
        }
      }
      bits &= bits - 1;
    }
  }
  previous_ = column;
  ++step_;
}

SinglePassNetwork StreamState::finish() const {
  const std::size_t l_count = previous_.size();
  NetworkParams params{l_count, single_pass_threshold(l_count, p_), eta_tilde_, p_};
  return SinglePassNetwork(counts_, j_card_, params);
}

StreamState stream_update(StreamState state, const FiringVector& column) {
  state.consume(column);
  return state;
}

VerificationReport verify_single_pass_gram(const FiringMatrix& matrix, double p,
                                           double eta_tilde) {
  validate_training_params(p, eta_tilde);
  const std::size_t l_count = matrix.neuron_count();
  const std::size_t n_count = matrix.column_count();

  // Gram matrix over columns and per-column popcounts.
  std::vector<std::uint32_t> gram(n_count * n_count);
  std::vector<std::uint64_t> colpop(n_count);
  for (std::size_t i = 0; i < n_count; ++i) {
    colpop[i] = matrix.column(i).popcount();
    for (std::size_t j = i; j < n_count; ++j) {
      const auto g = static_cast<std::uint32_t>(
          and_popcount(matrix.column(i), matrix.column(j)));
      gram[i * n_count + j] = g;
      gram[j * n_count + i] = g;
    }
  }

  const NetworkParams params{l_count, single_pass_threshold(l_count, p),
                             eta_tilde, p};
  VerificationReport report;
  const detail::MarginAccumulator acc(params, SinglePassNetwork::kMarginEpsilon);
  std::vector<std::size_t> fire_preds;  // predecessor indices of J_l
  for (std::size_t l = 0; l < l_count; ++l) {
    fire_preds.clear();
    for (std::size_t n = 0; n < n_count; ++n) {
      if (matrix.get(l, n)) fire_preds.push_back(matrix.predecessor_index(n));
    }
    const std::uint64_t j_card = fire_preds.size();
    for (std::size_t n = 0; n < n_count; ++n) {
      const std::size_t pred = matrix.predecessor_index(n);
      std::uint64_t dot = 0;
      const std::uint32_t* row = gram.data() + pred * n_count;
      for (const std::size_t j : fire_preds) dot += row[j];
      const double ip = std::fma(-p, static_cast<double>(j_card * colpop[pred]),
                                 static_cast<double>(dot));
      acc.add(l, n, matrix.get(l, n), ip, report);
    }
  }
  detail::finish_report(matrix, report);
  return report;
}

}  // namespace seqmem
