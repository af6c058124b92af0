#pragma once

#include <cstdint>
#include <vector>

#include "nrstream/enc.hpp"
#include "nrstream/rational.hpp"
#include "nrstream/rm_ldc.hpp"
#include "nrstream/rng.hpp"
#include "nrstream/stream_model.hpp"

namespace nrstream {

// Working-memory meter for a decode run. `registers` counts the decoder's
// own state (guess slots, confidences, counters, per-copy scratch) and is
// deterministic for a given parameter set; `collected` counts buffered
// stream payload, which varies with the sampled queries and is bounded
// separately against the codeword length. Keeping the two apart makes
// register growth per recursion level an exact frame-sized constant.
struct SpaceProbe {
  std::uint64_t cur_registers = 0;
  std::uint64_t peak_registers = 0;
  std::uint64_t cur_collected = 0;
  std::uint64_t peak_collected = 0;

  void acquire(std::uint64_t bits) {
    cur_registers += bits;
    if (cur_registers > peak_registers) peak_registers = cur_registers;
  }
  void release(std::uint64_t bits) { cur_registers -= bits; }
  void collect(std::uint64_t bits) {
    cur_collected += bits;
    if (cur_collected > peak_collected) peak_collected = cur_collected;
  }
  void uncollect(std::uint64_t bits) { cur_collected -= bits; }
};

// Register-size conventions used by the probe: one confidence is a fraction
// of two 64-bit words; a recursion frame carries its loop counters besides
// the guess slots and the permutation.
constexpr unsigned kConfBits = 128;
constexpr unsigned kFrameOverheadBits = 32;

// Observer for the exact-confidence audit: called with every (sub)estimate a
// decode run emits, where `span` = j - i is the input-interval length.
struct ConfAudit {
  virtual ~ConfAudit() = default;
  virtual void on_conf(std::uint64_t span, const Rational& conf) = 0;
};

// Decodes one message bit from the next codeword copy of a stream, reading
// exactly codeword_bits() positions in one pass and buffering only the
// planned query blocks. Scratch is reused across calls, so one instance
// serves a whole run.
class LeafDecoder {
 public:
  explicit LeafDecoder(const Ldc& ldc);

  DecodeVerdict decode_copy(BitStream& bs, std::uint32_t index, Rng& rng,
                            SpaceProbe* probe);

  std::uint64_t copies_decoded() const { return copies_; }

 private:
  const Ldc& ldc_;
  std::uint32_t q_;
  unsigned nvars_;
  unsigned bl_;
  std::vector<std::uint16_t> lam2_;    // lambda^2, indexed by lambda
  std::vector<Curve> curves_;
  std::vector<std::uint32_t> bids_;    // block index per (curve, lambda-1)
  std::vector<std::uint64_t> bitmap_;  // queried blocks, by block index
  std::vector<std::uint32_t> rank_;    // set bits strictly before each word
  std::vector<std::uint64_t> values_;  // packed blocks in stream order
  std::vector<std::uint64_t> blocks_;  // values routed to (curve, lambda-1)
  std::uint64_t scratch_bits_;         // probe charge for the above
  std::uint64_t copies_ = 0;
};

// Everything one decode run threads through its recursion.
struct DecodeRun {
  const Ldc& ldc;
  BitStream& bs;
  Rng& rng;
  LeafDecoder leaf;
  SpaceProbe probe;
  ConfAudit* audit = nullptr;

  DecodeRun(const Ldc& l, BitStream& b, Rng& r) : ldc(l), bs(b), rng(r), leaf(l) {}
};

// Fisher-Yates draw into out (resized to count) using the run's rng.
void sample_permutation(unsigned count, Rng& rng, std::vector<std::uint8_t>& out);

// Outcome of a full decode run, common to both decoder modes.
struct RunReport {
  std::uint64_t value = 0;    // mode-specific meaning (sum or final state)
  Rational conf{0};
  std::uint64_t bits_read = 0;
  std::uint64_t copies_decoded = 0;
  std::uint64_t peak_registers = 0;
  std::uint64_t peak_collected = 0;
};

}  // namespace nrstream
