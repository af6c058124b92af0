#pragma once

#include <cstdint>
#include <optional>

#include "nrstream/dec_common.hpp"
#include "nrstream/stream_model.hpp"

namespace nrstream {

// Cumulative best guess with its accumulated confidence. Starts unset; the
// update rule below is the only thing that ever changes it.
struct GuessConf {
  std::optional<std::uint64_t> value;
  Rational conf{0};
};

// Add-on-agree, subtract-on-disagree, adopt-on-negative. An unset slot
// adopts the first value it sees; a tie (conf exactly 0) keeps the
// incumbent. c_hat outside [0, 1] is a usage error.
GuessConf weighted_update(const GuessConf& gc, std::uint64_t q_hat,
                          const Rational& c_hat);

struct Estimate {
  std::uint64_t value = 0;
  Rational conf{0};
};

// Estimate the partial sum of L over input positions (i:j] from the next
// copies_consumed(i, j, sp) codeword copies of the stream. j - i must be a
// power of r. Leaves decode one bit and apply the summand; interior levels
// run ell chunks of r randomly-permuted sections, maintaining one GuessConf
// per subinterval, and return the slot sum with the minimum slot confidence
// scaled down by ell.
Estimate est_a_linear(std::uint64_t i, std::uint64_t j, DecodeRun& run,
                      const LinearStreamingAlgorithm& L, const StreamParams& sp);

// Full receiver for a linear algorithm: T top-level estimates folded by
// weighted_update. Consumes the entire stream.
RunReport run_linear(const LinearStreamingAlgorithm& L, BitStream& bs,
                     const StreamParams& sp, const Ldc& ldc, Rng& rng,
                     ConfAudit* audit = nullptr);

// Convenience form that builds the code from sp.ldc.
RunReport run_linear(const LinearStreamingAlgorithm& L, BitStream& bs,
                     const StreamParams& sp, Rng& rng);

}  // namespace nrstream
