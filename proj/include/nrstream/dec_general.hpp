#pragma once

#include <cstdint>
#include <optional>

#include "nrstream/dec_common.hpp"
#include "nrstream/dec_linear.hpp"
#include "nrstream/stream_model.hpp"

namespace nrstream {

// Best guess for an algorithm state reached after some prefix, with its
// accumulated confidence. Unlike the order-free linear slots, these are
// chained: each subinterval starts from its predecessor's guessed state.
struct StateGuess {
  std::optional<std::uint64_t> state;
  Rational conf{0};
};

// The add/subtract/flip rule for one slot, comparing and accumulating
// against its frozen chunk-start snapshot, never the live value. An unset
// snapshot never matches, so the first nonzero evidence adopts its state.
void general_slot_update(StateGuess& live, const StateGuess& snap,
                         const Estimate& res);

// End-of-chunk discard: every slot strictly after the first one whose state
// differs from its snapshot reverts to (unset, 0). Both vectors must have
// the same size. Exposed (with the update above) for rule-level tests.
void general_chunk_reset(std::vector<StateGuess>& slots,
                         const std::vector<StateGuess>& snapshot);

// Estimate the state A reaches from q_start across input positions (i:j],
// reading the next copies_consumed(i, j, sp) codeword copies. Interior
// levels feed each section the snapshot state of its predecessor (the
// algorithm's initial state standing in when that is still unset) and chain
// the slots; the last slot's state is the answer.
Estimate est_a_general(std::uint64_t i, std::uint64_t j, std::uint64_t q_start,
                       DecodeRun& run, const StreamingAlgorithm& A,
                       const StreamParams& sp);

// Full receiver for a sequential algorithm: T top-level estimates folded by
// weighted_update; the report's value is A.output of the winning state.
RunReport run_general(const StreamingAlgorithm& A, BitStream& bs,
                      const StreamParams& sp, const Ldc& ldc, Rng& rng,
                      ConfAudit* audit = nullptr);

RunReport run_general(const StreamingAlgorithm& A, BitStream& bs,
                      const StreamParams& sp, Rng& rng);

}  // namespace nrstream
