#include "seqmem/firing.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace seqmem {

std::size_t BitSpan::popcount() const {
  std::size_t total = 0;
  for (std::size_t w = 0; w < word_count(); ++w) {
    total += static_cast<std::size_t>(std::popcount(words_[w]));
  }
  return total;
}

std::uint64_t and_popcount(BitSpan a, BitSpan b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("and_popcount: length mismatch");
  }
  const auto wa = a.words();
  const auto wb = b.words();
  std::uint64_t total = 0;
  for (std::size_t w = 0; w < wa.size(); ++w) {
    total += static_cast<std::uint64_t>(std::popcount(wa[w] & wb[w]));
  }
  return total;
}

bool operator==(BitSpan a, BitSpan b) {
  if (a.size() != b.size()) return false;
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t w = 0; w < wa.size(); ++w) {
    if (wa[w] != wb[w]) return false;
  }
  return true;
}

FiringVector FiringVector::from_bits(std::span<const int> bits) {
  FiringVector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0 && bits[i] != 1) {
      throw std::invalid_argument("firing vector entries must be 0 or 1");
    }
    if (bits[i]) v.set(i, true);
  }
  return v;
}

FiringVector FiringVector::from_string(std::string_view bits) {
  FiringVector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      v.set(i, true);
    } else if (bits[i] != '0') {
      throw std::invalid_argument("firing vector characters must be 0 or 1");
    }
  }
  return v;
}

FiringVector FiringVector::from_span(BitSpan view) {
  FiringVector v(view.size());
  const auto words = view.words();
  for (std::size_t w = 0; w < words.size(); ++w) v.words_[w] = words[w];
  return v;
}

std::string FiringVector::to_string() const {
  std::string s(length_, '0');
  for (std::size_t i = 0; i < length_; ++i) {
    if (get(i)) s[i] = '1';
  }
  return s;
}

FiringMatrix::FiringMatrix(std::size_t neuron_count, std::size_t column_count)
    : neuron_count_(neuron_count),
      column_count_(column_count),
      words_per_column_(BitSpan::word_count_for(neuron_count)),
      data_(words_per_column_ * column_count, 0) {
  if (neuron_count_ < 1) {
    throw std::invalid_argument("pattern matrix needs at least one neuron");
  }
  if (column_count_ < 2) {
    throw std::invalid_argument("pattern matrix needs at least two columns");
  }
}

FiringMatrix FiringMatrix::from_columns(std::span<const FiringVector> columns) {
  if (columns.empty()) {
    throw std::invalid_argument("pattern matrix needs at least two columns");
  }
  FiringMatrix m(columns[0].size(), columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != m.neuron_count_) {
      throw std::invalid_argument("all columns must share the same length");
    }
    const auto words = columns[c].view().words();
    std::uint64_t* dst = m.data_.data() + c * m.words_per_column_;
    for (std::size_t w = 0; w < words.size(); ++w) dst[w] = words[w];
  }
  return m;
}

FiringVector FiringMatrix::column_copy(std::size_t col) const {
  return FiringVector::from_span(column(col));
}

FiringVector FiringMatrix::row_copy(std::size_t row) const {
  FiringVector v(column_count_);
  for (std::size_t c = 0; c < column_count_; ++c) {
    if (get(row, c)) v.set(c, true);
  }
  return v;
}

std::vector<std::pair<std::size_t, std::size_t>> inconsistent_transitions(
    const FiringMatrix& matrix) {
  const std::size_t n = matrix.column_count();
  // Group equal columns by a word hash so the pairwise scan only runs
  // inside buckets.
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
  for (std::size_t c = 0; c < n; ++c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint64_t w : matrix.column(c).words()) {
      h = (h ^ w) * 0x100000001b3ULL;
    }
    buckets[h].push_back(c);
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& [hash, cols] : buckets) {
    for (std::size_t a = 0; a < cols.size(); ++a) {
      for (std::size_t b = a + 1; b < cols.size(); ++b) {
        const std::size_t i = cols[a];
        const std::size_t j = cols[b];
        if (matrix.column(i) == matrix.column(j) &&
            !(matrix.column((i + 1) % n) == matrix.column((j + 1) % n))) {
          pairs.emplace_back(i, j);
        }
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

FiringMatrix read_matrix(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error("matrix file: missing header line");
  }
  std::istringstream hs(header);
  long long l = 0;
  long long n = 0;
  if (!(hs >> l >> n) || l < 1 || n < 2) {
    throw std::runtime_error("matrix file: header must be \"L N\" with L >= 1, N >= 2");
  }
  std::string extra;
  if (hs >> extra) {
    throw std::runtime_error("matrix file: trailing tokens in header");
  }
  FiringMatrix m(static_cast<std::size_t>(l), static_cast<std::size_t>(n));
  std::string line;
  for (long long row = 0; row < l; ++row) {
    if (!std::getline(in, line)) {
      throw std::runtime_error("matrix file: expected " + std::to_string(l) +
                               " rows, got " + std::to_string(row));
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (static_cast<long long>(line.size()) != n) {
      throw std::runtime_error("matrix file: row " + std::to_string(row) +
                               " has length " + std::to_string(line.size()) +
                               ", expected " + std::to_string(n));
    }
    for (long long col = 0; col < n; ++col) {
      const char c = line[static_cast<std::size_t>(col)];
      if (c == '1') {
        m.set(static_cast<std::size_t>(row), static_cast<std::size_t>(col), true);
      } else if (c != '0') {
        throw std::runtime_error("matrix file: row " + std::to_string(row) +
                                 " contains a character other than 0/1");
      }
    }
  }
  return m;
}

FiringMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open matrix file: " + path);
  }
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const FiringMatrix& matrix) {
  out << matrix.neuron_count() << ' ' << matrix.column_count() << '\n';
  for (std::size_t row = 0; row < matrix.neuron_count(); ++row) {
    std::string line(matrix.column_count(), '0');
    for (std::size_t col = 0; col < matrix.column_count(); ++col) {
      if (matrix.get(row, col)) line[col] = '1';
    }
    out << line << '\n';
  }
}

void write_matrix_file(const std::string& path, const FiringMatrix& matrix) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path);
  }
  write_matrix(out, matrix);
}

void write_sequence(std::ostream& out, std::span<const FiringVector> steps) {
  if (steps.empty()) {
    throw std::invalid_argument("cannot write an empty sequence");
  }
  const std::size_t l = steps[0].size();
  out << l << ' ' << steps.size() << '\n';
  for (std::size_t row = 0; row < l; ++row) {
    std::string line(steps.size(), '0');
    for (std::size_t s = 0; s < steps.size(); ++s) {
      if (steps[s].get(row)) line[s] = '1';
    }
    out << line << '\n';
  }
}

}  // namespace seqmem
