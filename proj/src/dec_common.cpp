#include "nrstream/dec_common.hpp"

#include <bit>

#include "nrstream/errors.hpp"

namespace nrstream {

LeafDecoder::LeafDecoder(const Ldc& ldc)
    : ldc_(ldc), q_(ldc.params().q()), nvars_(ldc.params().nvars),
      bl_(ldc.inner().block_len()) {
  if (bl_ > 64) {
    throw usage_error("streaming decoder needs inner blocks within one word");
  }
  if (ldc.params().outer_points() > (std::uint64_t(1) << 26)) {
    throw usage_error("outer grid too large for the block routing table");
  }
  lam2_.resize(q_);
  for (std::uint32_t lam = 0; lam < q_; ++lam) {
    lam2_[lam] = ldc.field().mul(std::uint16_t(lam), std::uint16_t(lam));
  }
  const std::size_t queried = std::size_t(ldc.params().k) * (q_ - 1);
  const std::size_t words = std::size_t((ldc.params().outer_points() + 63) / 64);
  bids_.resize(queried);
  bitmap_.resize(words);
  rank_.resize(words);
  values_.resize(queried);
  blocks_.resize(queried);
  // Live scratch, in bits: the query-block routing table, its bitmap and
  // rank index, and the curve coordinates. Collected payload is charged
  // separately per copy.
  scratch_bits_ = 64 * bitmap_.size() + 32 * (bids_.size() + rank_.size()) +
                  std::uint64_t(ldc.params().k) * 3 * nvars_ * 16;
}

DecodeVerdict LeafDecoder::decode_copy(BitStream& bs, std::uint32_t index,
                                       Rng& rng, SpaceProbe* probe) {
  const Field& f = ldc_.field();
  ldc_.sample_curves(index, rng, curves_);
  const unsigned k = unsigned(curves_.size());
  const unsigned pts = q_ - 1;

  // Route every (curve, lambda) pair to its block index and mark the block.
  std::fill(bitmap_.begin(), bitmap_.end(), 0);
  for (unsigned c = 0; c < k; ++c) {
    const Curve& cv = curves_[c];
    for (std::uint32_t lam = 1; lam < q_; ++lam) {
      std::uint64_t idx = 0;
      for (unsigned t = 0; t < nvars_; ++t) {
        std::uint16_t coord =
            std::uint16_t(cv.v0[t] ^ f.mul(cv.v1[t], std::uint16_t(lam)) ^
                          f.mul(cv.v2[t], lam2_[lam]));
        idx = idx * q_ + coord;
      }
      bids_[c * pts + (lam - 1)] = std::uint32_t(idx);
      bitmap_[idx >> 6] |= 1ull << (idx & 63);
    }
  }
  std::uint32_t running = 0;
  for (std::size_t w = 0; w < bitmap_.size(); ++w) {
    rank_[w] = running;
    running += std::uint32_t(std::popcount(bitmap_[w]));
  }

  if (probe) {
    probe->acquire(scratch_bits_);
    probe->collect(std::uint64_t(running) * bl_);
  }

  // One pass over the copy: skip to each marked block, read it, skip the
  // tail. Everything else in the copy is consumed without materializing.
  std::uint64_t cursor = 0;
  std::uint32_t stored = 0;
  for (std::size_t w = 0; w < bitmap_.size(); ++w) {
    std::uint64_t bits = bitmap_[w];
    while (bits) {
      std::uint64_t b = std::uint64_t(w) * 64 + std::uint64_t(std::countr_zero(bits));
      bits &= bits - 1;
      std::uint64_t start = b * bl_;
      if (start > cursor) bs.discard(start - cursor);
      values_[stored++] = bs.read_bits(bl_);
      cursor = start + bl_;
    }
  }
  if (cursor < ldc_.codeword_bits()) bs.discard(ldc_.codeword_bits() - cursor);

  for (std::size_t p = 0; p < bids_.size(); ++p) {
    std::uint32_t id = bids_[p];
    std::uint64_t below = bitmap_[id >> 6] & ((1ull << (id & 63)) - 1);
    blocks_[p] = values_[rank_[id >> 6] + std::uint32_t(std::popcount(below))];
  }

  DecodeVerdict v = ldc_.decode_blocks(curves_, blocks_.data(), false);
  if (probe) {
    probe->uncollect(std::uint64_t(running) * bl_);
    probe->release(scratch_bits_);
  }
  ++copies_;
  return v;
}

void sample_permutation(unsigned count, Rng& rng, std::vector<std::uint8_t>& out) {
  out.resize(count);
  for (unsigned i = 0; i < count; ++i) {
    out[i] = std::uint8_t(i);
  }
  for (unsigned i = count; i-- > 1;) {
    std::swap(out[i], out[rng.next_below(i + 1)]);
  }
}

}  // namespace nrstream
