#include "nrstream/enc.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "nrstream/errors.hpp"

namespace nrstream {

namespace {

constexpr std::uint64_t kSizeCap = std::uint64_t(1) << 62;

std::uint64_t checked_pow(std::uint64_t base, unsigned exp) {
  unsigned __int128 acc = 1;
  for (unsigned i = 0; i < exp; ++i) {
    acc *= base;
    if (acc > kSizeCap) {
      throw config_error("stream length overflows the supported range");
    }
  }
  return std::uint64_t(acc);
}

}  // namespace

const char* mode_name(Mode m) { return m == Mode::linear ? "linear" : "general"; }

std::optional<Mode> mode_from_name(std::string_view s) {
  if (s == "linear") return Mode::linear;
  if (s == "general") return Mode::general;
  return std::nullopt;
}

std::uint64_t StreamParams::copies() const {
  unsigned __int128 total = (unsigned __int128)checked_pow(std::uint64_t(r) * ell, D) * T;
  if (total > kSizeCap) {
    throw config_error("stream length overflows the supported range");
  }
  return std::uint64_t(total);
}

std::uint64_t StreamParams::m_len() const {
  unsigned __int128 total = (unsigned __int128)copies() * ldc.codeword_bits();
  if (total > kSizeCap) {
    throw config_error("stream length overflows the supported range");
  }
  return std::uint64_t(total);
}

void StreamParams::validate() const {
  if (r < 2) {
    throw config_error("branching factor must be at least 2");
  }
  if (ell < 1 || T < 1) {
    throw config_error("chunk count and amplification must be positive");
  }
  if (n < 1) {
    throw config_error("need at least one input bit");
  }
  std::uint64_t p = 1;
  for (unsigned t = 0; t < D; ++t) p *= r;
  if (p != n) {
    throw config_error("input length must be exactly r^D");
  }
  if (ldc.n != n) {
    throw config_error("code message length must match the input length");
  }
  (void)m_len();  // overflow check
}

BitVec encode_stream(const BitVec& x, const StreamParams& sp) {
  sp.validate();
  if (x.size() != sp.n) {
    throw usage_error("input length does not match the parameters");
  }
  Ldc ldc(sp.ldc);
  BitVec cw = ldc.encode(x);
  const std::uint64_t copies = sp.copies();
  const std::uint64_t n_bits = cw.size();
  BitVec out(sp.m_len());
  if (n_bits % 64 == 0) {
    for (std::uint64_t c = 0; c < copies; ++c)
      std::memcpy(out.words() + c * (n_bits / 64), cw.words(), n_bits / 8);
  } else {
    for (std::uint64_t c = 0; c < copies; ++c)
      for (std::uint64_t done = 0; done < n_bits; done += 32) {
        unsigned chunk = unsigned(n_bits - done < 32 ? n_bits - done : 32);
        out.set_bits(c * n_bits + done, chunk, cw.get_bits(done, chunk));
      }
  }
  return out;
}

std::uint64_t copies_consumed(std::uint64_t i, std::uint64_t j, const StreamParams& sp) {
  if (i >= j || j > sp.n) {
    throw usage_error("interval out of order or out of bounds");
  }
  std::uint64_t len = j - i;
  unsigned t = 0;
  std::uint64_t p = 1;
  while (p < len) {
    p *= sp.r;
    ++t;
  }
  if (p != len) {
    throw usage_error("interval length must be a power of the branching factor");
  }
  return checked_pow(std::uint64_t(sp.r) * sp.ell, t);
}

RepeatedStream::RepeatedStream(BitVec codeword, std::uint64_t total_copies)
    : BitStream(codeword.size() * total_copies), codeword_(std::move(codeword)) {
  if (codeword_.size() == 0) {
    throw usage_error("cannot repeat an empty codeword");
  }
}

void RepeatedStream::produce(std::uint64_t pos, std::uint64_t nbits, std::uint64_t* out) {
  const std::uint64_t n_bits = codeword_.size();
  std::uint64_t off = pos % n_bits;
  for (std::uint64_t done = 0; done < nbits;) {
    std::uint64_t span = n_bits - off;
    if (span > nbits - done) span = nbits - done;
    if (span > 32) span = 32;
    std::uint64_t v = codeword_.get_bits(off, unsigned(span));
    out[done >> 6] |= v << (done & 63);
    if ((done & 63) + span > 64) out[(done >> 6) + 1] |= v >> (64 - (done & 63));
    done += span;
    off += span;
    if (off == n_bits) off = 0;
  }
}

// --- container ---------------------------------------------------------------

std::uint32_t crc32(const std::uint8_t* data, std::size_t len) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c >> 1) ^ (0xedb88320u & (0u - (c & 1)));
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t c = 0xffffffffu;
  for (std::size_t i = 0; i < len; ++i) c = table[(c ^ data[i]) & 0xff] ^ (c >> 8);
  return c ^ 0xffffffffu;
}

namespace {

constexpr char kMagic[4] = {'N', 'R', 'S', 'T'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 64;  // CRC comes right after, then payload

void put_u32(std::uint8_t* p, std::uint32_t v) { std::memcpy(p, &v, 4); }
void put_u64(std::uint8_t* p, std::uint64_t v) { std::memcpy(p, &v, 8); }
std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}
std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v;
  std::memcpy(&v, p, 8);
  return v;
}

}  // namespace

void write_stream_file(const std::string& path, const StoredStream& s) {
  s.params.validate();
  if (s.bits.size() != s.params.m_len()) {
    throw usage_error("payload length disagrees with the parameters");
  }
  std::uint8_t h[kHeaderBytes] = {};
  std::memcpy(h, kMagic, 4);
  put_u32(h + 4, kVersion);
  put_u32(h + 8, s.params.n);
  put_u32(h + 12, s.params.r);
  put_u32(h + 16, s.params.ell);
  put_u32(h + 20, s.params.T);
  h[24] = std::uint8_t(s.params.mode);
  h[25] = std::uint8_t(s.params.ldc.w());
  h[26] = std::uint8_t(s.params.ldc.d);
  h[27] = std::uint8_t(s.params.ldc.nvars);
  put_u32(h + 28, s.params.ldc.k);
  put_u32(h + 32, s.params.ldc.q());
  put_u32(h + 36, s.params.ldc.field_spec.reduction_poly);
  put_u64(h + 40, std::uint64_t(s.params.ldc.eps_ldc.num));
  put_u64(h + 48, std::uint64_t(s.params.ldc.eps_ldc.den));
  put_u64(h + 56, s.bits.size());
  std::uint32_t crc = crc32(h, kHeaderBytes);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw infra_error("cannot open for writing: " + path);
  }
  f.write(reinterpret_cast<const char*>(h), kHeaderBytes);
  f.write(reinterpret_cast<const char*>(&crc), 4);
  auto payload = s.bits.to_bytes();
  f.write(reinterpret_cast<const char*>(payload.data()),
          std::streamsize(payload.size()));
  if (!f) {
    throw infra_error("write failed: " + path);
  }
}

StoredStream read_stream_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw infra_error("cannot open for reading: " + path);
  }
  std::uint8_t h[kHeaderBytes];
  std::uint32_t crc = 0;
  f.read(reinterpret_cast<char*>(h), kHeaderBytes);
  f.read(reinterpret_cast<char*>(&crc), 4);
  if (!f) {
    throw format_error("file too short for a stream header");
  }
  if (std::memcmp(h, kMagic, 4) != 0) {
    throw format_error("bad magic: not a stream container");
  }
  if (get_u32(h + 4) != kVersion) {
    throw format_error("unsupported container version");
  }
  if (crc32(h, kHeaderBytes) != crc) {
    throw format_error("header checksum mismatch");
  }

  StoredStream s;
  s.params.n = get_u32(h + 8);
  s.params.r = get_u32(h + 12);
  s.params.ell = get_u32(h + 16);
  s.params.T = get_u32(h + 20);
  if (h[24] > 1) {
    throw format_error("unknown mode byte");
  }
  s.params.mode = Mode(h[24]);
  s.params.ldc.n = s.params.n;
  s.params.ldc.field_spec.w = h[25];
  s.params.ldc.field_spec.reduction_poly = get_u32(h + 36);
  s.params.ldc.d = h[26];
  s.params.ldc.nvars = h[27];
  s.params.ldc.k = get_u32(h + 28);
  s.params.ldc.eps_ldc.num = std::int64_t(get_u64(h + 40));
  s.params.ldc.eps_ldc.den = std::int64_t(get_u64(h + 48));
  if (get_u32(h + 32) != s.params.ldc.q()) {
    throw format_error("field size disagrees with its width");
  }
  if (s.params.r < 2) {
    throw format_error("branching factor below 2");
  }
  unsigned depth = 0;
  for (std::uint64_t p = 1; p < s.params.n; p *= s.params.r) ++depth;
  s.params.D = depth;
  s.params.validate();

  std::uint64_t nbits = get_u64(h + 56);
  if (nbits != s.params.m_len()) {
    throw format_error("payload bit count disagrees with the parameters");
  }
  std::vector<std::uint8_t> payload((nbits + 7) / 8);
  f.read(reinterpret_cast<char*>(payload.data()), std::streamsize(payload.size()));
  std::uint64_t got = std::uint64_t(f.gcount());
  if (got != payload.size()) {
    throw format_error("truncated payload: expected " + std::to_string(nbits) +
                       " bits, found " + std::to_string(got * 8));
  }
  s.bits = BitVec::from_bytes(payload.data(), nbits);
  return s;
}

}  // namespace nrstream
