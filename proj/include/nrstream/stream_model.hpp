#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nrstream/bitvec.hpp"

namespace nrstream {

// A noiseless streaming algorithm: an s-bit state folded over the input one
// bit at a time, answer read off the final state. step must be pure.
struct StreamingAlgorithm {
  std::string name;
  unsigned state_bits = 0;
  std::uint64_t init_state = 0;
  std::function<std::uint64_t(std::uint64_t state, std::uint8_t bit)> step;
  std::function<std::uint64_t(std::uint64_t state)> output;
};

// Answer = g(0, x_0) + ... + g(n-1, x_{n-1}) mod `modulus`. Sub-sums commute
// and never depend on each other, which is what the cheaper decoding scheme
// for this class exploits.
struct LinearStreamingAlgorithm {
  std::string name;
  std::uint64_t n = 0;
  std::uint64_t modulus = 2;
  std::function<std::uint64_t(std::uint64_t i, std::uint8_t bit)> g;
};

// Fold step over x starting from state q.
std::uint64_t fold_state(const StreamingAlgorithm& alg, std::uint64_t q, const BitVec& x);

std::uint64_t run_noiseless(const StreamingAlgorithm& alg, const BitVec& x);

// Sum of g over positions [i, j) — the sub-interval answer oracle.
std::uint64_t partial_sum(const LinearStreamingAlgorithm& alg, std::uint64_t i,
                          std::uint64_t j, const BitVec& x);

// Turn a linear algorithm into a streaming one by tracking the partial sum:
// state = (position << value_bits) | sum, so state_bits = ceil(log2 n) plus
// the value width.
StreamingAlgorithm lift_linear(const LinearStreamingAlgorithm& alg);

// One-pass stream of `length` bits: a cursor that only moves forward, each
// position consumed exactly once. Subclasses materialize bits on demand;
// consumption without materialization (discard) is O(1) so a decoder can
// honor the read-everything model without touching bits it will not use.
class BitStream {
 public:
  explicit BitStream(std::uint64_t length) : len_(length) {}
  virtual ~BitStream() = default;

  std::uint64_t length() const { return len_; }
  std::uint64_t cursor() const { return cur_; }
  std::uint64_t remaining() const { return len_ - cur_; }

  std::uint8_t read_bit();
  std::uint64_t read_bits(unsigned count);  // count <= 64, packed LSB-first
  BitVec read(std::uint64_t count);
  void discard(std::uint64_t count);  // consume without materializing

 protected:
  // Materialize bits [pos, pos+nbits) into out, packed LSB-first like BitVec.
  // out arrives zeroed; implementations may OR their payload in.
  virtual void produce(std::uint64_t pos, std::uint64_t nbits, std::uint64_t* out) = 0;
  // Every consumed range passes through here once, in order (for probes).
  virtual void on_consume(std::uint64_t /*pos*/, std::uint64_t /*nbits*/) {}
  // For wrapper streams: drive another stream's materializer directly.
  static void produce_into(BitStream& s, std::uint64_t pos, std::uint64_t nbits,
                           std::uint64_t* out) {
    s.produce(pos, nbits, out);
  }

 private:
  void advance(std::uint64_t count);

  std::uint64_t len_ = 0;
  std::uint64_t cur_ = 0;
};

// In-memory stream over a bit vector (tests, container payloads).
class BufferBitStream : public BitStream {
 public:
  explicit BufferBitStream(BitVec data) : BitStream(data.size()), data_(std::move(data)) {}

 protected:
  void produce(std::uint64_t pos, std::uint64_t nbits, std::uint64_t* out) override;

 private:
  BitVec data_;
};

// --- example algorithms -----------------------------------------------------
// Each has an obvious direct answer the tests recompute independently.

LinearStreamingAlgorithm parity_linear(std::uint64_t n);
LinearStreamingAlgorithm dot_product_linear(BitVec y);  // <x, y> over GF(2)
LinearStreamingAlgorithm sum_linear(std::uint64_t n, std::uint64_t modulus);

StreamingAlgorithm parity_algorithm();
StreamingAlgorithm dot_product_algorithm(BitVec y);
StreamingAlgorithm sum_algorithm(std::uint64_t modulus);
StreamingAlgorithm counter_algorithm(std::uint64_t n);

// Stream of fixed-width records (idx_bits index bits, MSB first, then one
// value bit); the answer is the value bit of the last record whose index
// matches `target`, default 0.
StreamingAlgorithm index_algorithm(unsigned idx_bits, std::uint64_t target);

// Acceptance by a fixed 4-state automaton (input contains the substring 101)
// — genuinely sequential and non-linear.
StreamingAlgorithm dfa_algorithm();

}  // namespace nrstream
