#include "nrstream/inner_code.hpp"

#include <bit>

#include "nrstream/errors.hpp"

namespace nrstream {

namespace {

inline unsigned parity_u32(std::uint32_t v) { return std::popcount(v) & 1u; }

}  // namespace

InnerCode::InnerCode(const Field& field) : w_(field.w()), q_(field.q()) {
  if (w_ < 2 || w_ > 16) {
    throw config_error("inner code needs 2 <= w <= 16");
  }
  unsigned block = 1u << (w_ - 1);
  if (block > 64) {
    // Packed blocks live in a u64; w <= 7 covers every parameter set the
    // setup search can produce (q <= 2^16 outer symbols still mean w <= 16,
    // but blocks beyond 64 bits would need a different representation).
    throw config_error("inner block longer than 64 bits unsupported");
  }
  spec_.msg_bits = w_;
  spec_.block_len = block;
  spec_.epsilon_in = Rational(0);

  codewords_.resize(q_);
  for (std::uint32_t sym = 0; sym < q_; ++sym) {
    std::uint64_t cw = 0;
    std::uint32_t a0 = sym & 1u;
    std::uint32_t rest = sym >> 1;
    for (unsigned p = 0; p < block; ++p) {
      cw |= static_cast<std::uint64_t>(a0 ^ parity_u32(rest & p)) << p;
    }
    codewords_[sym] = cw;
  }

  if (block <= 8) {
    decode_table_.resize(std::size_t(1) << block);
    for (std::uint32_t word = 0; word < (1u << block); ++word) {
      std::uint16_t best_sym = 0;
      unsigned best_dist = block + 1;
      for (std::uint32_t sym = 0; sym < q_; ++sym) {
        unsigned d = std::popcount(std::uint64_t(word) ^ codewords_[sym]);
        if (d < best_dist) {
          best_dist = d;
          best_sym = static_cast<std::uint16_t>(sym);
        }
      }
      decode_table_[word] = static_cast<std::uint16_t>(best_sym | (best_dist << 8));
    }
  }
}

std::vector<std::uint8_t> InnerCode::encode(std::uint16_t sym) const {
  if (sym >= q_) {
    throw usage_error("symbol out of field range");
  }
  std::uint64_t cw = codewords_[sym];
  std::vector<std::uint8_t> out(spec_.block_len);
  for (unsigned p = 0; p < spec_.block_len; ++p) {
    out[p] = static_cast<std::uint8_t>((cw >> p) & 1u);
  }
  return out;
}

std::pair<std::uint16_t, unsigned> InnerCode::decode_packed(std::uint64_t block) const {
  if (!decode_table_.empty()) {
    std::uint16_t e = decode_table_[block];
    return {static_cast<std::uint16_t>(e & 0xff), unsigned(e >> 8)};
  }
  std::uint16_t best_sym = 0;
  unsigned best_dist = spec_.block_len + 1;
  for (std::uint32_t sym = 0; sym < q_; ++sym) {
    unsigned d = std::popcount(block ^ codewords_[sym]);
    if (d < best_dist) {  // strict: ties keep the earlier (smaller) symbol
      best_dist = d;
      best_sym = static_cast<std::uint16_t>(sym);
    }
  }
  return {best_sym, best_dist};
}

std::pair<std::uint16_t, unsigned> InnerCode::decode(
    const std::vector<std::uint8_t>& word) const {
  if (word.size() != spec_.block_len) {
    throw usage_error("inner block has wrong length");
  }
  std::uint64_t packed = 0;
  for (unsigned p = 0; p < spec_.block_len; ++p) {
    if (word[p] > 1) {
      throw usage_error("inner block entries must be bits");
    }
    packed |= static_cast<std::uint64_t>(word[p]) << p;
  }
  return decode_packed(packed);
}

std::vector<std::pair<std::uint16_t, unsigned>> InnerCode::decode_all(
    const std::vector<std::vector<std::uint8_t>>& words) const {
  std::vector<std::pair<std::uint16_t, unsigned>> out;
  out.reserve(words.size());
  for (const auto& w : words) {
    out.push_back(decode(w));
  }
  return out;
}

}  // namespace nrstream
