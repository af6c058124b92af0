#include "nrstream/stream_model.hpp"

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "doctest.h"
#include "nrstream/errors.hpp"
#include "nrstream/rng.hpp"

using namespace nrstream;

namespace {

BitVec from_string(const std::string& s) {
  BitVec v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) v.set(i, s[i] == '1');
  return v;
}

BitVec from_value(std::uint32_t value, unsigned n) {
  BitVec v(n);
  for (unsigned i = 0; i < n; ++i) v.set(i, (value >> i) & 1);
  return v;
}

/* Records every consumed range, for the one-pass checks. */
class RecordingStream : public BufferBitStream {
 public:
  using BufferBitStream::BufferBitStream;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> consumed;

 protected:
  void on_consume(std::uint64_t pos, std::uint64_t nbits) override {
    consumed.push_back({pos, nbits});
  }
};

}  // namespace

TEST_CASE("parity of the zero input is zero") {
  auto alg = parity_algorithm();
  for (unsigned n : {0u, 1u, 5u, 16u}) CHECK(run_noiseless(alg, BitVec(n)) == 0);
}

TEST_CASE("inner product example") {
  auto alg = dot_product_algorithm(from_string("1100"));
  CHECK(run_noiseless(alg, from_string("1010")) == 1);
  CHECK(run_noiseless(alg, from_string("0010")) == 0);
  CHECK(run_noiseless(alg, from_string("1111")) == 0);  // 1+1 mod 2
}

TEST_CASE("index algorithm finds the target record") {
  // records: (index, value) with 2 index bits then the value bit
  auto alg = index_algorithm(2, 2);
  // (0,1) (2,1) (3,0) -> index 2 carries 1
  CHECK(run_noiseless(alg, from_string("001" "101" "110")) == 1);
  // (2,0) alone
  CHECK(run_noiseless(alg, from_string("100")) == 0);
  // never mentioned -> default 0
  CHECK(run_noiseless(alg, from_string("001" "011")) == 0);
  CHECK_THROWS_AS(index_algorithm(2, 4), usage_error);
  CHECK_THROWS_AS(index_algorithm(0, 0), usage_error);
}

TEST_CASE("example algorithms match direct oracles exhaustively") {
  auto y = from_string("110100101101");
  auto dot = dot_product_algorithm(y);
  auto parity = parity_algorithm();
  auto sum5 = sum_algorithm(5);
  auto counter = counter_algorithm(12);
  auto dfa = dfa_algorithm();
  auto index = index_algorithm(2, 1);
  for (unsigned n = 1; n <= 12; ++n) {
    for (std::uint32_t v = 0; v < (1u << n); ++v) {
      auto x = from_value(v, n);
      std::uint64_t ones = x.count_ones();
      CHECK(run_noiseless(parity, x) == (ones & 1));
      CHECK(run_noiseless(sum5, x) == ones % 5);
      CHECK(run_noiseless(counter, x) == ones);
      if (n == 12) {
        std::uint64_t dots = 0;
        for (unsigned i = 0; i < n; ++i) dots ^= x.get(i) & y.get(i);
        CHECK(run_noiseless(dot, x) == dots);
        // oracle: last record with index 1 wins
        std::uint64_t want = 0;
        for (unsigned rec = 0; rec + 3 <= n; rec += 3) {
          unsigned idx = unsigned(x.get(rec)) << 1 | unsigned(x.get(rec + 1));
          if (idx == 1) want = x.get(rec + 2);
        }
        CHECK(run_noiseless(index, x) == want);
      }
      bool has101 = false;
      for (unsigned i = 0; i + 3 <= n; ++i)
        has101 |= x.get(i) && !x.get(i + 1) && x.get(i + 2);
      CHECK(run_noiseless(dfa, x) == (has101 ? 1 : 0));
    }
  }
}

TEST_CASE("lifting a linear algorithm preserves the answer") {
  auto y = from_string("10110010");
  std::vector<LinearStreamingAlgorithm> lins = {parity_linear(8), dot_product_linear(y),
                                                sum_linear(8, 7)};
  for (const auto& lin : lins) {
    auto lifted = lift_linear(lin);
    CHECK(lifted.state_bits ==
          3 + unsigned(std::bit_width(std::uint64_t(lin.modulus - 1))));
    for (std::uint32_t v = 0; v < 256; ++v) {
      auto x = from_value(v, 8);
      CHECK(run_noiseless(lifted, x) == partial_sum(lin, 0, 8, x));
    }
  }

  LinearStreamingAlgorithm zero;
  zero.name = "zero";
  zero.n = 8;
  zero.modulus = 3;
  zero.g = [](std::uint64_t, std::uint8_t) { return 0ull; };
  auto lifted = lift_linear(zero);
  for (std::uint32_t v = 0; v < 256; ++v)
    CHECK(run_noiseless(lifted, from_value(v, 8)) == 0);
}

TEST_CASE("partial sums are additive") {
  auto lin = sum_linear(12, 5);
  Rng rng(71);
  for (int it = 0; it < 50; ++it) {
    auto x = from_value(std::uint32_t(rng.next_below(1u << 12)), 12);
    std::uint64_t i = rng.next_below(13);
    std::uint64_t j = i + rng.next_below(13 - i);
    std::uint64_t k = j + rng.next_below(13 - j);
    CHECK(partial_sum(lin, i, i, x) == 0);
    CHECK((partial_sum(lin, i, j, x) + partial_sum(lin, j, k, x)) % 5 ==
          partial_sum(lin, i, k, x));
  }
  auto x = from_value(0xabc, 12);
  CHECK(partial_sum(lin, 0, 12, x) == run_noiseless(lift_linear(lin), x));
  CHECK_THROWS_AS(partial_sum(lin, 5, 3, x), usage_error);
  CHECK_THROWS_AS(partial_sum(lin, 0, 13, x), usage_error);
  CHECK_THROWS_AS(partial_sum(lin, 0, 4, from_value(0, 4)), usage_error);
}

TEST_CASE("stream reads are consecutive and one-pass") {
  auto data = from_string("1011001110001011");
  BufferBitStream bs(data);
  CHECK(bs.length() == 16);
  auto a = bs.read(5);
  auto b = bs.read(7);
  CHECK(bs.cursor() == 12);
  for (unsigned i = 0; i < 5; ++i) CHECK(a.get(i) == data.get(i));
  for (unsigned i = 0; i < 7; ++i) CHECK(b.get(i) == data.get(5 + i));
  CHECK(bs.read_bits(3) == ((data.get(12) ? 1u : 0u) | (data.get(13) ? 2u : 0u) |
                            (data.get(14) ? 4u : 0u)));
  CHECK(bs.remaining() == 1);
  CHECK_THROWS_AS(bs.read(2), infra_error);
  CHECK(bs.read_bit() == data.get(15));
  CHECK_THROWS_AS(bs.read_bit(), infra_error);
}

TEST_CASE("instrumented stream sees every position exactly once") {
  BitVec data(200);
  for (unsigned i = 0; i < 200; i += 3) data.set(i, true);
  RecordingStream bs(data);
  (void)bs.read_bits(31);
  bs.discard(64);
  auto tail = bs.read(105);
  CHECK(tail.get(104 ) == data.get(199));
  CHECK(bs.cursor() == bs.length());
  std::uint64_t expect = 0, total = 0;
  for (auto [pos, n] : bs.consumed) {
    CHECK(pos == expect);  // strictly increasing, gap-free
    expect = pos + n;
    total += n;
  }
  CHECK(total == 200);
}

TEST_CASE("word reads match bit reads") {
  Rng rng(9);
  BitVec data(300);
  for (unsigned i = 0; i < 300; ++i) data.set(i, rng.next_below(2));
  BufferBitStream a(data);
  BufferBitStream b(data);
  while (a.remaining() >= 64) {
    std::uint64_t word = a.read_bits(64);
    for (unsigned i = 0; i < 64; ++i) CHECK(((word >> i) & 1) == b.read_bit());
  }
  CHECK(a.read_bits(unsigned(a.remaining())) == b.read_bits(unsigned(b.remaining())));
}
