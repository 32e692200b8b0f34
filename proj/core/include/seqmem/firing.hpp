#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace seqmem {

// Non-owning view of a packed bit sequence. Producers in this library keep
// the unused high bits of the last word zero, so popcounts over whole words
// are valid without masking.
class BitSpan {
 public:
  BitSpan() = default;
  BitSpan(const std::uint64_t* words, std::size_t bit_count)
      : words_(words), bit_count_(bit_count) {}

  std::size_t size() const { return bit_count_; }
  bool get(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }
  std::span<const std::uint64_t> words() const {
    return {words_, word_count()};
  }
  std::size_t word_count() const { return word_count_for(bit_count_); }
  std::size_t popcount() const;

  static std::size_t word_count_for(std::size_t bits) {
    return (bits + 63) / 64;
  }

 private:
  const std::uint64_t* words_ = nullptr;
  std::size_t bit_count_ = 0;
};

// Integer inner product of two binary vectors of equal length.
std::uint64_t and_popcount(BitSpan a, BitSpan b);

bool operator==(BitSpan a, BitSpan b);

// Binary firing vector of fixed length, bit-packed into 64-bit words.
class FiringVector {
 public:
  FiringVector() = default;
  explicit FiringVector(std::size_t length)
      : words_(BitSpan::word_count_for(length), 0), length_(length) {}

  static FiringVector from_bits(std::span<const int> bits);
  static FiringVector from_string(std::string_view bits);  // chars over {0,1}
  static FiringVector from_span(BitSpan view);

  std::size_t size() const { return length_; }
  bool get(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }
  void set(std::size_t i, bool value) {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (value) {
      words_[i >> 6] |= mask;
    } else {
      words_[i >> 6] &= ~mask;
    }
  }
  std::size_t popcount() const { return view().popcount(); }

  operator BitSpan() const { return view(); }
  BitSpan view() const { return {words_.data(), length_}; }
  std::string to_string() const;

  bool operator==(const FiringVector& other) const = default;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t length_ = 0;
};

// L x N binary pattern matrix. Column n holds the firing vector at time
// step n (0-based in code; the time step before column 0 is column N-1,
// matching the cyclic wrap-around of the stored sequence).
class FiringMatrix {
 public:
  FiringMatrix(std::size_t neuron_count, std::size_t column_count);
  static FiringMatrix from_columns(std::span<const FiringVector> columns);

  std::size_t neuron_count() const { return neuron_count_; }    // L
  std::size_t column_count() const { return column_count_; }    // N

  bool get(std::size_t row, std::size_t col) const {
    const std::uint64_t* w = data_.data() + col * words_per_column_;
    return (w[row >> 6] >> (row & 63)) & 1u;
  }
  void set(std::size_t row, std::size_t col, bool value) {
    std::uint64_t* w = data_.data() + col * words_per_column_;
    const std::uint64_t mask = std::uint64_t{1} << (row & 63);
    if (value) {
      w[row >> 6] |= mask;
    } else {
      w[row >> 6] &= ~mask;
    }
  }

  BitSpan column(std::size_t col) const {
    return {data_.data() + col * words_per_column_, neuron_count_};
  }
  // Index of the column feeding target column `col` in the cyclic sequence.
  std::size_t predecessor_index(std::size_t col) const {
    return (col + column_count_ - 1) % column_count_;
  }
  BitSpan predecessor(std::size_t col) const {
    return column(predecessor_index(col));
  }

  FiringVector column_copy(std::size_t col) const;
  FiringVector row_copy(std::size_t row) const;  // length-N firing history

  bool operator==(const FiringMatrix& other) const = default;

 private:
  std::size_t neuron_count_ = 0;
  std::size_t column_count_ = 0;
  std::size_t words_per_column_ = 0;
  std::vector<std::uint64_t> data_;  // column-major, padded per column
};

// Column pairs (i, j), i < j, with equal columns but different successors
// (successor of column k is column (k+1) mod N). Such a matrix cannot be
// replayed by any deterministic map.
std::vector<std::pair<std::size_t, std::size_t>> inconsistent_transitions(
    const FiringMatrix& matrix);

// Text format, bit-exact: first line "L N", then L lines of exactly N
// characters over {0,1}; line l is the firing history of neuron l.
FiringMatrix read_matrix(std::istream& in);
FiringMatrix read_matrix_file(const std::string& path);
void write_matrix(std::ostream& out, const FiringMatrix& matrix);
void write_matrix_file(const std::string& path, const FiringMatrix& matrix);

// A trajectory uses the same layout: "L steps" then one row per neuron.
void write_sequence(std::ostream& out, std::span<const FiringVector> steps);

}  // namespace seqmem
