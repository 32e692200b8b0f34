#pragma once

#include <cstdint>
#include <string_view>

namespace seqmem {

// SplitMix64 output (finalizer) function. Used for seeding and for deriving
// counter-based substreams.
std::uint64_t splitmix64_next(std::uint64_t& state);

// xoshiro256** 1.0 (Blackman/Vigna), seeded through SplitMix64. All outputs
// are pure 64-bit integer arithmetic, so a given seed produces the same
// stream on every platform this library builds on.
class Xoshiro256StarStar {
 public:
  explicit Xoshiro256StarStar(std::uint64_t seed);

  // Substream for work item `index` under `master_seed`: the seed is
  // master_seed XOR (index+1)*golden-ratio, passed through the SplitMix64
  // scrambler. Distinct indices give decorrelated streams and the mapping
  // is independent of scheduling order.
  static Xoshiro256StarStar substream(std::uint64_t master_seed,
                                      std::uint64_t index);

  std::uint64_t next();

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform double in [-bound, bound].
  double next_symmetric(double bound) {
    return (2.0 * next_double() - 1.0) * bound;
  }

  // Unbiased uniform integer in [0, n), n >= 1.
  std::uint64_t next_below(std::uint64_t n);

  static constexpr std::string_view kName =
      "xoshiro256** 1.0 (splitmix64 substreams)";

 private:
  std::uint64_t s_[4];
};

}  // namespace seqmem
