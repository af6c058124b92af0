#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace nrstream {

// Packed bit vector, LSB-first inside little-endian 64-bit words: bit i lives
// in word i/64 at bit i%64, which serializes to byte i/8, bit i%8 — the
// container format's "packed little-endian" payload layout.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::uint64_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

  std::uint64_t size() const { return nbits_; }

  bool get(std::uint64_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }
  void set(std::uint64_t i, bool b) {
    std::uint64_t mask = 1ull << (i & 63);
    if (b)
      words_[i >> 6] |= mask;
    else
      words_[i >> 6] &= ~mask;
  }
  void flip(std::uint64_t i) { words_[i >> 6] ^= 1ull << (i & 63); }

  // Reads len <= 57 bits starting at bit offset `start` as one little-endian
  // value (the cap keeps the two-word splice below branch-free-simple).
  std::uint64_t get_bits(std::uint64_t start, unsigned len) const {
    std::uint64_t w = start >> 6;
    unsigned off = (unsigned)(start & 63);
    std::uint64_t v = words_[w] >> off;
    if (off + len > 64) v |= words_[w + 1] << (64 - off);
    return len == 64 ? v : (v & ((1ull << len) - 1));
  }

  void set_bits(std::uint64_t start, unsigned len, std::uint64_t v) {
    for (unsigned b = 0; b < len; ++b) set(start + b, (v >> b) & 1u);
  }

  std::uint64_t count_ones() const {
    std::uint64_t c = 0;
    for (std::uint64_t w : words_) c += (std::uint64_t)std::popcount(w);
    return c;
  }

  friend std::uint64_t hamming_distance(const BitVec& a, const BitVec& b) {
    if (a.nbits_ != b.nbits_)
      throw std::invalid_argument("hamming_distance: length mismatch");
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i)
      c += (std::uint64_t)std::popcount(a.words_[i] ^ b.words_[i]);
    return c;
  }

  friend bool operator==(const BitVec& a, const BitVec& b) {
    return a.nbits_ == b.nbits_ && a.words_ == b.words_;
  }

  const std::uint64_t* words() const { return words_.data(); }
  std::uint64_t* words() { return words_.data(); }
  std::size_t num_words() const { return words_.size(); }
  std::uint64_t num_bytes() const { return (nbits_ + 7) / 8; }

  // Byte-serialized form (payload bytes; trailing bits of the last byte zero).
  std::vector<std::uint8_t> to_bytes() const {
    std::vector<std::uint8_t> out(num_bytes(), 0);
    if (!out.empty()) std::memcpy(out.data(), words_.data(), out.size());
    return out;
  }
  static BitVec from_bytes(const std::uint8_t* bytes, std::uint64_t nbits) {
    BitVec v(nbits);
    if (nbits) std::memcpy(v.words_.data(), bytes, (nbits + 7) / 8);
    // mask stray bits so equality and popcounts stay well-defined
    unsigned tail = (unsigned)(nbits & 63);
    if (tail) v.words_.back() &= (1ull << tail) - 1;
    return v;
  }

 private:
  std::uint64_t nbits_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace nrstream
