#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nrstream/bitvec.hpp"
#include "nrstream/rational.hpp"
#include "nrstream/stream_model.hpp"

namespace nrstream {

// Corruption models. All are oblivious: a pattern is a pure function of its
// descriptor, fixed before the decoder draws any randomness.
enum class ChannelKind : std::uint8_t {
  random,           // each bit flipped independently w.p. rho, truncated to budget
  prefix_burst,     // the first floor(rho * m) bits
  copy_targeted,    // every bit of the listed codeword copies
  symbol_targeted,  // one outer symbol's inner block, in every copy
  periodic,         // every floor(1/rho)-th bit
  explicit_list,    // verbatim positions (small patterns, pattern files)
};

const char* channel_kind_name(ChannelKind k);
std::optional<ChannelKind> channel_kind_from_name(std::string_view s);

struct PatternExtras {
  std::uint64_t copy_len = 0;                // codeword bits; targeted kinds
  std::vector<std::uint64_t> target_copies;  // copy_targeted
  std::uint64_t target_symbol = 0;           // symbol_targeted
  unsigned inner_len = 0;                    // symbol_targeted
  std::vector<std::uint64_t> flips;          // explicit_list
  Rational eps_budget{1, 64};                // budget = (1/4 - eps_budget) * m
  bool budget_check = true;
};

class CorruptionPattern {
 public:
  std::uint64_t length() const { return m_len_; }
  ChannelKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  Rational rho() const { return rho_; }
  const PatternExtras& extras() const { return extras_; }

  // Exact flip count. For a large untruncated random pattern this is a full
  // scan, done once and cached; everything else is arithmetic.
  std::uint64_t weight() const;
  Rational weight_fraction() const;

  bool flipped(std::uint64_t pos) const;
  // XOR the pattern into an LSB-first packed window of the stream.
  void xor_range(std::uint64_t pos, std::uint64_t nbits, std::uint64_t* words) const;
  // Ascending position visit; fine for any pattern that fits in memory or
  // patience (full scan for random).
  void for_each_flip(const std::function<void(std::uint64_t)>& fn) const;
  std::vector<std::uint64_t> flip_positions() const;  // guarded materialization

  friend CorruptionPattern make_pattern(ChannelKind kind, Rational rho,
                                        std::uint64_t m_len, std::uint64_t seed,
                                        const PatternExtras& extras);

 private:
  CorruptionPattern() = default;

  ChannelKind kind_ = ChannelKind::explicit_list;
  std::uint64_t m_len_ = 0;
  std::uint64_t seed_ = 0;
  Rational rho_{0};
  PatternExtras extras_;

  std::uint64_t hash_threshold_ = 0;        // random: flip iff hash < threshold
  std::uint64_t period_ = 0;                // periodic
  std::uint64_t prefix_ = 0;                // prefix_burst
  std::vector<std::uint64_t> list_;         // explicit / truncated random (sorted)
  std::vector<std::uint64_t> copy_list_;    // copy_targeted (sorted, distinct)
  bool use_list_ = false;
  mutable std::optional<std::uint64_t> weight_;  // cache for the random scan
};

// Budget violations throw config_error; malformed extras throw usage_error.
CorruptionPattern make_pattern(ChannelKind kind, Rational rho, std::uint64_t m_len,
                               std::uint64_t seed, const PatternExtras& extras = {});

BitVec apply_pattern(const BitVec& z, const CorruptionPattern& p);

// JSON descriptor file; large patterns are regenerated from it, never stored.
void write_pattern_file(const std::string& path, const CorruptionPattern& p);
CorruptionPattern read_pattern_file(const std::string& path);

// The receiver's view: inner stream bits with the pattern XORed in.
class CorruptedStream : public BitStream {
 public:
  CorruptedStream(std::unique_ptr<BitStream> inner, CorruptionPattern pattern);

 protected:
  void produce(std::uint64_t pos, std::uint64_t nbits, std::uint64_t* out) override;

 private:
  std::unique_ptr<BitStream> inner_;
  CorruptionPattern pattern_;
};

}  // namespace nrstream
