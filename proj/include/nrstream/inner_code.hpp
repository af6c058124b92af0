#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nrstream/galois.hpp"
#include "nrstream/rational.hpp"

namespace nrstream {

// First-order Reed-Muller RM(1, w-1): one field symbol (w bits) per block of
// N_inner = 2^{w-1} bits, exact minimum distance N_inner/2. Chosen over
// fancier inner codes because the decoder only needs the nearest codeword and
// its exact distance, and 2^w codewords are nothing at these sizes.
struct InnerCodeSpec {
  unsigned msg_bits = 0;   // w
  unsigned block_len = 0;  // N_inner = 2^{w-1}
  Rational epsilon_in{0};  // relative distance is exactly 1/2, so slack 0
};

class InnerCode {
 public:
  explicit InnerCode(const Field& field);

  const InnerCodeSpec& spec() const { return spec_; }
  unsigned block_len() const { return spec_.block_len; }

  // Codeword of sym: bits of sym are the coefficients (a0; a1..a_{w-1}) of
  // z -> a0 xor (+)_i a_i z_i, evaluated at all z in {0,1}^{w-1} in index
  // order. Bit p of the block = a0 ^ parity((sym >> 1) & p).
  std::vector<std::uint8_t> encode(std::uint16_t sym) const;
  std::uint64_t encode_packed(std::uint16_t sym) const { return codewords_[sym]; }

  // Nearest codeword by Hamming distance; ties toward the smaller symbol.
  std::pair<std::uint16_t, unsigned> decode(const std::vector<std::uint8_t>& word) const;
  std::pair<std::uint16_t, unsigned> decode_packed(std::uint64_t block) const;

  std::vector<std::pair<std::uint16_t, unsigned>> decode_all(
      const std::vector<std::vector<std::uint8_t>>& words) const;

  const std::uint64_t* codeword_table() const { return codewords_.data(); }

 private:
  InnerCodeSpec spec_;
  unsigned w_ = 0;
  std::uint32_t q_ = 0;
  std::vector<std::uint64_t> codewords_;  // packed, indexed by symbol
  // Full decode table when the block fits a byte (w <= 4): entry = sym | dist<<8.
  std::vector<std::uint16_t> decode_table_;
};

}  // namespace nrstream
