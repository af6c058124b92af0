#include "nrstream/stream_model.hpp"

#include <bit>
#include <memory>

#include "nrstream/errors.hpp"

namespace nrstream {

std::uint64_t fold_state(const StreamingAlgorithm& alg, std::uint64_t q, const BitVec& x) {
  for (std::uint64_t i = 0; i < x.size(); ++i) q = alg.step(q, x.get(i));
  return q;
}

std::uint64_t run_noiseless(const StreamingAlgorithm& alg, const BitVec& x) {
  return alg.output(fold_state(alg, alg.init_state, x));
}

std::uint64_t partial_sum(const LinearStreamingAlgorithm& alg, std::uint64_t i,
                          std::uint64_t j, const BitVec& x) {
  if (x.size() != alg.n) {
    throw usage_error("input length does not match the algorithm");
  }
  if (i > j || j > alg.n) {
    throw usage_error("partial sum range out of order or out of bounds");
  }
  std::uint64_t acc = 0;
  for (std::uint64_t t = i; t < j; ++t) acc = (acc + alg.g(t, x.get(t))) % alg.modulus;
  return acc;
}

StreamingAlgorithm lift_linear(const LinearStreamingAlgorithm& alg) {
  const unsigned value_bits = std::bit_width(alg.modulus - 1);
  const unsigned pos_bits = alg.n <= 1 ? 0 : unsigned(std::bit_width(alg.n - 1));
  const std::uint64_t value_mask = value_bits == 64 ? ~0ull : (1ull << value_bits) - 1;
  const std::uint64_t pos_mask = pos_bits == 0 ? 0 : (1ull << pos_bits) - 1;
  StreamingAlgorithm out;
  out.name = alg.name + "-lifted";
  out.state_bits = pos_bits + value_bits;
  out.init_state = 0;
  auto g = alg.g;
  auto modulus = alg.modulus;
  out.step = [=](std::uint64_t state, std::uint8_t bit) {
    std::uint64_t pos = state >> value_bits;
    std::uint64_t sum = (state & value_mask) + g(pos, bit);
    if (sum >= modulus) sum -= modulus;
    return (((pos + 1) & pos_mask) << value_bits) | sum;
  };
  out.output = [=](std::uint64_t state) { return state & value_mask; };
  return out;
}

// --- BitStream ---------------------------------------------------------------

void BitStream::advance(std::uint64_t count) {
  if (count > remaining()) {
    throw infra_error("stream underrun: past the declared length");
  }
  on_consume(cur_, count);
  cur_ += count;
}

std::uint8_t BitStream::read_bit() {
  std::uint64_t word = 0;
  if (remaining() < 1) throw infra_error("stream underrun: past the declared length");
  produce(cur_, 1, &word);
  advance(1);
  return std::uint8_t(word & 1);
}

std::uint64_t BitStream::read_bits(unsigned count) {
  if (count > 64) throw usage_error("read_bits caps at one word");
  if (count > remaining()) throw infra_error("stream underrun: past the declared length");
  std::uint64_t word = 0;
  if (count) produce(cur_, count, &word);
  advance(count);
  if (count < 64) word &= (1ull << count) - 1;
  return word;
}

BitVec BitStream::read(std::uint64_t count) {
  if (count > remaining()) throw infra_error("stream underrun: past the declared length");
  BitVec out(count);
  if (count) produce(cur_, count, out.words());
  advance(count);
  return out;
}

void BitStream::discard(std::uint64_t count) { advance(count); }

void BufferBitStream::produce(std::uint64_t pos, std::uint64_t nbits, std::uint64_t* out) {
  for (std::uint64_t done = 0; done < nbits; done += 32) {
    unsigned chunk = unsigned(nbits - done < 32 ? nbits - done : 32);
    out[done >> 6] |= data_.get_bits(pos + done, chunk) << (done & 63);
  }
}

// --- example algorithms ------------------------------------------------------

LinearStreamingAlgorithm parity_linear(std::uint64_t n) {
  LinearStreamingAlgorithm alg;
  alg.name = "parity";
  alg.n = n;
  alg.modulus = 2;
  alg.g = [](std::uint64_t, std::uint8_t bit) { return std::uint64_t(bit); };
  return alg;
}

LinearStreamingAlgorithm dot_product_linear(BitVec y) {
  LinearStreamingAlgorithm alg;
  alg.name = "dot";
  alg.n = y.size();
  alg.modulus = 2;
  auto fixed = std::make_shared<BitVec>(std::move(y));
  alg.g = [fixed](std::uint64_t i, std::uint8_t bit) {
    return std::uint64_t(bit & fixed->get(i));
  };
  return alg;
}

LinearStreamingAlgorithm sum_linear(std::uint64_t n, std::uint64_t modulus) {
  if (modulus < 2) throw usage_error("sum needs a modulus of at least 2");
  LinearStreamingAlgorithm alg;
  alg.name = "sum";
  alg.n = n;
  alg.modulus = modulus;
  alg.g = [](std::uint64_t, std::uint8_t bit) { return std::uint64_t(bit); };
  return alg;
}

StreamingAlgorithm parity_algorithm() {
  StreamingAlgorithm alg;
  alg.name = "parity";
  alg.state_bits = 1;
  alg.init_state = 0;
  alg.step = [](std::uint64_t state, std::uint8_t bit) { return state ^ bit; };
  alg.output = [](std::uint64_t state) { return state; };
  return alg;
}

StreamingAlgorithm dot_product_algorithm(BitVec y) {
  const std::uint64_t n = y.size();
  const unsigned pos_bits = n <= 1 ? 0 : unsigned(std::bit_width(n - 1));
  const std::uint64_t pos_mask = pos_bits == 0 ? 0 : (1ull << pos_bits) - 1;
  auto fixed = std::make_shared<BitVec>(std::move(y));
  StreamingAlgorithm alg;
  alg.name = "dot";
  alg.state_bits = pos_bits + 1;
  alg.init_state = 0;
  alg.step = [=](std::uint64_t state, std::uint8_t bit) {
    std::uint64_t pos = state >> 1;
    std::uint64_t acc = (state & 1) ^ (bit & fixed->get(pos));
    return (((pos + 1) & pos_mask) << 1) | acc;
  };
  alg.output = [](std::uint64_t state) { return state & 1; };
  return alg;
}

StreamingAlgorithm sum_algorithm(std::uint64_t modulus) {
  if (modulus < 2) throw usage_error("sum needs a modulus of at least 2");
  StreamingAlgorithm alg;
  alg.name = "sum";
  alg.state_bits = unsigned(std::bit_width(modulus - 1));
  alg.init_state = 0;
  alg.step = [=](std::uint64_t state, std::uint8_t bit) {
    std::uint64_t next = state + bit;
    return next >= modulus ? next - modulus : next;
  };
  alg.output = [](std::uint64_t state) { return state; };
  return alg;
}

StreamingAlgorithm counter_algorithm(std::uint64_t n) {
  StreamingAlgorithm alg;
  alg.name = "counter";
  alg.state_bits = unsigned(std::bit_width(n));
  alg.init_state = 0;
  alg.step = [](std::uint64_t state, std::uint8_t bit) { return state + bit; };
  alg.output = [](std::uint64_t state) { return state; };
  return alg;
}

StreamingAlgorithm index_algorithm(unsigned idx_bits, std::uint64_t target) {
  if (idx_bits < 1 || idx_bits > 32) throw usage_error("index width out of range");
  if (target >> idx_bits) throw usage_error("target does not fit the index width");
  // state = (phase | accumulator | answer); phase counts bits within a record
  const unsigned phase_bits = unsigned(std::bit_width(std::uint64_t(idx_bits)));
  StreamingAlgorithm alg;
  alg.name = "index";
  alg.state_bits = phase_bits + idx_bits + 1;
  alg.init_state = 0;
  alg.step = [=](std::uint64_t state, std::uint8_t bit) {
    std::uint64_t phase = state >> (idx_bits + 1);
    std::uint64_t acc = (state >> 1) & ((1ull << idx_bits) - 1);
    std::uint64_t answer = state & 1;
    if (phase < idx_bits) {
      acc = (acc << 1 | bit) & ((1ull << idx_bits) - 1);
      ++phase;
    } else {  // value bit closes the record
      if (acc == target) answer = bit;
      phase = 0;
      acc = 0;
    }
    return (phase << (idx_bits + 1)) | (acc << 1) | answer;
  };
  alg.output = [](std::uint64_t state) { return state & 1; };
  return alg;
}

StreamingAlgorithm dfa_algorithm() {
  // accepts inputs containing 101; state 3 is absorbing
  static constexpr std::uint8_t table[4][2] = {{0, 1}, {2, 1}, {0, 3}, {3, 3}};
  StreamingAlgorithm alg;
  alg.name = "dfa";
  alg.state_bits = 2;
  alg.init_state = 0;
  alg.step = [](std::uint64_t state, std::uint8_t bit) {
    return std::uint64_t(table[state & 3][bit & 1]);
  };
  alg.output = [](std::uint64_t state) { return std::uint64_t(state == 3); };
  return alg;
}

}  // namespace nrstream
