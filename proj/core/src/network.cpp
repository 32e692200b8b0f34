#include "seqmem/network.hpp"

namespace seqmem {

void NetworkParams::validate() const {
  if (neuron_count < 1) {
    throw std::invalid_argument("network needs at least one neuron");
  }
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::invalid_argument("threshold theta must be positive and finite");
  }
  if (!(eta_tilde >= 0.0 && eta_tilde < 1.0)) {
    throw std::invalid_argument("relative disturbance eta_tilde must lie in [0, 1)");
  }
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("firing probability p must lie in (0, 1)");
  }
}

int neuron_activation(std::span<const double> weights, double theta,
                      BitSpan input, double disturbance) {
  if (weights.size() != input.size()) {
    throw std::invalid_argument("weight vector length does not match input length");
  }
  double ip = 0.0;
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (input.get(i)) ip += weights[i];
  }
  return ip + disturbance >= theta ? 1 : 0;
}

}  // namespace seqmem
