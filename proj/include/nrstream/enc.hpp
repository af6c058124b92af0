#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "nrstream/bitvec.hpp"
#include "nrstream/rm_ldc.hpp"
#include "nrstream/stream_model.hpp"

namespace nrstream {

enum class Mode : std::uint8_t { linear = 0, general = 1 };

const char* mode_name(Mode m);
std::optional<Mode> mode_from_name(std::string_view s);

// Everything the sender and receiver agree on. The input is split
// recursively into r pieces, D levels deep (n = r^D); each level spreads its
// stream budget over ell chunks; the whole estimate is amplified T times.
struct StreamParams {
  std::uint32_t n = 0;
  unsigned r = 0;
  unsigned ell = 0;
  unsigned T = 0;
  unsigned D = 0;
  Mode mode = Mode::linear;
  LdcParams ldc;

  std::uint64_t copies() const;  // T * (r*ell)^D
  std::uint64_t m_len() const;   // copies * codeword bits

  void validate() const;  // structural invariants; code validity is Ldc's job
};

// The sender side: T*(r*ell)^D back-to-back copies of the codeword. No
// randomness — all of the scheme's randomness is the receiver's.
BitVec encode_stream(const BitVec& x, const StreamParams& sp);

// Stream-segment accounting: an interval of j-i = r^t input positions owns
// (r*ell)^t codeword copies of the stream.
std::uint64_t copies_consumed(std::uint64_t i, std::uint64_t j, const StreamParams& sp);

// encode_stream without materializing: position p carries codeword bit p mod N.
class RepeatedStream : public BitStream {
 public:
  RepeatedStream(BitVec codeword, std::uint64_t total_copies);

 protected:
  void produce(std::uint64_t pos, std::uint64_t nbits, std::uint64_t* out) override;

 private:
  BitVec codeword_;
};

// Container: "NRST" magic, version, the full parameter set, payload bit
// count, CRC-32 of the header, then the packed little-endian payload.
struct StoredStream {
  StreamParams params;
  BitVec bits;
};

void write_stream_file(const std::string& path, const StoredStream& s);
StoredStream read_stream_file(const std::string& path);

std::uint32_t crc32(const std::uint8_t* data, std::size_t len);

}  // namespace nrstream
