#include <doctest.h>

#include <sstream>

#include "seqmem/firing.hpp"
#include "seqmem/rng.hpp"

using namespace seqmem;

TEST_SUITE("firing") {

TEST_CASE("bit vector set/get across word boundaries") {
  FiringVector v(70);
  CHECK(v.size() == 70);
  CHECK(v.popcount() == 0);
  v.set(0, true);
  v.set(63, true);
  v.set(64, true);
  v.set(69, true);
  CHECK(v.get(0));
  CHECK(v.get(63));
  CHECK(v.get(64));
  CHECK(v.get(69));
  CHECK_FALSE(v.get(1));
  CHECK(v.popcount() == 4);
  v.set(63, false);
  CHECK(v.popcount() == 3);
}

TEST_CASE("from_string / to_string round trip") {
  const FiringVector v = FiringVector::from_string("0110");
  CHECK(v.size() == 4);
  CHECK(v.to_string() == "0110");
  CHECK_THROWS_AS(FiringVector::from_string("01x"), std::invalid_argument);
}

TEST_CASE("and_popcount is the binary inner product") {
  const auto a = FiringVector::from_string("0111");
  const auto b = FiringVector::from_string("1101");
  CHECK(and_popcount(a, b) == 2);
  CHECK(and_popcount(a, a) == 3);
  const FiringVector c(5);
  CHECK_THROWS_AS(and_popcount(a, c), std::invalid_argument);

  // random cross-check against the bit-by-bit sum
  Xoshiro256StarStar rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    FiringVector x(130);
    FiringVector y(130);
    for (std::size_t i = 0; i < 130; ++i) {
      x.set(i, rng.next() & 1);
      y.set(i, rng.next() & 1);
    }
    std::uint64_t expect = 0;
    for (std::size_t i = 0; i < 130; ++i) {
      expect += (x.get(i) && y.get(i)) ? 1 : 0;
    }
    CHECK(and_popcount(x, y) == expect);
  }
}

TEST_CASE("matrix columns and cyclic predecessor") {
  // columns a_1 = (1,0,1), a_2 = (0,1,1)
  FiringMatrix m(3, 2);
  m.set(0, 0, true);
  m.set(2, 0, true);
  m.set(1, 1, true);
  m.set(2, 1, true);
  CHECK(m.column_copy(0).to_string() == "101");
  CHECK(m.column_copy(1).to_string() == "011");
  CHECK(m.predecessor_index(0) == 1);  // wrap-around: before a_1 comes a_N
  CHECK(m.predecessor_index(1) == 0);
  CHECK(FiringVector::from_span(m.predecessor(0)).to_string() == "011");
  CHECK(m.row_copy(2).to_string() == "11");
  CHECK(m.row_copy(1).to_string() == "01");
}

TEST_CASE("matrix constructor enforces shape invariants") {
  CHECK_THROWS_AS(FiringMatrix(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(FiringMatrix(3, 1), std::invalid_argument);
  const std::vector<FiringVector> ragged = {FiringVector(3), FiringVector(4)};
  CHECK_THROWS_AS(FiringMatrix::from_columns(ragged), std::invalid_argument);
}

TEST_CASE("inconsistent transitions: equal columns with different successors") {
  // a_1 = a_2 = (1,0), a_3 = (0,1)
  const std::vector<FiringVector> cols = {FiringVector::from_string("10"),
                                          FiringVector::from_string("10"),
                                          FiringVector::from_string("01")};
  const FiringMatrix m = FiringMatrix::from_columns(cols);
  const auto pairs = inconsistent_transitions(m);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0] == std::pair<std::size_t, std::size_t>{0, 1});
}

TEST_CASE("equal columns with equal successors are consistent") {
  const std::vector<FiringVector> cols = {FiringVector::from_string("10"),
                                          FiringVector::from_string("10")};
  const FiringMatrix m = FiringMatrix::from_columns(cols);
  CHECK(inconsistent_transitions(m).empty());
}

TEST_CASE("matrix text format round trip") {
  Xoshiro256StarStar rng(11);
  FiringMatrix m(67, 5);
  for (std::size_t c = 0; c < 5; ++c) {
    for (std::size_t r = 0; r < 67; ++r) {
      m.set(r, c, rng.next() & 1);
    }
  }
  std::stringstream s;
  write_matrix(s, m);
  const FiringMatrix back = read_matrix(s);
  CHECK(back == m);
}

TEST_CASE("matrix parser rejects malformed input") {
  const auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_matrix(in);
  };
  CHECK_THROWS_AS(parse(""), std::runtime_error);
  CHECK_THROWS_AS(parse("2\n10\n01\n"), std::runtime_error);
  CHECK_THROWS_AS(parse("2 2 9\n10\n01\n"), std::runtime_error);
  CHECK_THROWS_AS(parse("2 2\n101\n01\n"), std::runtime_error);  // row too long
  CHECK_THROWS_AS(parse("2 2\n10\n"), std::runtime_error);       // missing row
  CHECK_THROWS_AS(parse("2 2\n10\n0x\n"), std::runtime_error);   // bad char
  CHECK_THROWS_AS(parse("2 1\n1\n0\n"), std::runtime_error);     // N < 2
  // carriage returns are tolerated
  const FiringMatrix m = parse("2 2\r\n10\r\n01\r\n");
  CHECK(m.get(0, 0));
  CHECK(m.get(1, 1));
}

TEST_CASE("sequence writer uses the matrix layout") {
  const std::vector<FiringVector> steps = {FiringVector::from_string("011"),
                                           FiringVector::from_string("101")};
  std::ostringstream out;
  write_sequence(out, steps);
  CHECK(out.str() == "3 2\n01\n10\n11\n");
}

}  // TEST_SUITE
