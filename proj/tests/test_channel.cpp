#include "nrstream/channel.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <vector>

#include "doctest.h"
#include "nrstream/errors.hpp"
#include "nrstream/rng.hpp"

using namespace nrstream;

namespace {

BitVec random_word(std::uint64_t len, std::uint64_t seed) {
  BitVec v(len);
  Rng rng(seed);
  for (std::uint64_t i = 0; i < len; ++i)
    if (rng.next_u64() & 1) v.set(i, true);
  return v;
}

std::vector<std::uint64_t> positions_of(const CorruptionPattern& p) {
  return p.flip_positions();
}

struct TempFile {
  std::string path;
  explicit TempFile(const char* name)
      : path(std::string("channel_test_") + name + ".json") {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("zero-rate patterns are empty") {
  for (ChannelKind kind : {ChannelKind::random, ChannelKind::prefix_burst,
                           ChannelKind::periodic}) {
    auto p = make_pattern(kind, Rational(0), 500, 7);
    CHECK(p.weight() == 0);
    CHECK(p.weight_fraction() == Rational(0));
    for (std::uint64_t pos : {0ull, 1ull, 250ull, 499ull}) CHECK(!p.flipped(pos));
    BitVec z = random_word(500, 1);
    CHECK(apply_pattern(z, p) == z);
  }
}

TEST_CASE("prefix burst covers exactly the leading bits") {
  auto p = make_pattern(ChannelKind::prefix_burst, Rational(1, 10), 1000, 0);
  CHECK(p.weight() == 100);
  CHECK(p.weight_fraction() == Rational(1, 10));
  auto flips = positions_of(p);
  REQUIRE(flips.size() == 100);
  for (std::uint64_t i = 0; i < 100; ++i) CHECK(flips[i] == i);
  CHECK(p.flipped(99));
  CHECK(!p.flipped(100));

  // the fraction stays exact when rho * m_len is not an integer
  auto q = make_pattern(ChannelKind::prefix_burst, Rational(1, 7), 1000, 0);
  CHECK(q.weight() == 142);
  CHECK(q.weight_fraction() == Rational(142, 1000));
}

TEST_CASE("copy targeting flips whole codeword copies") {
  const std::uint64_t copy_len = 2048;
  const std::uint64_t m = 16 * copy_len;
  PatternExtras ex;
  ex.copy_len = copy_len;
  ex.target_copies = {0};
  auto p = make_pattern(ChannelKind::copy_targeted, Rational(0), m, 0, ex);
  CHECK(p.weight() == copy_len);
  CHECK(p.weight_fraction() == Rational(1, 16));
  CHECK(p.flipped(0));
  CHECK(p.flipped(copy_len - 1));
  CHECK(!p.flipped(copy_len));

  // duplicates collapse; copies need not be listed in order
  ex.target_copies = {5, 2, 5};
  auto q = make_pattern(ChannelKind::copy_targeted, Rational(0), m, 0, ex);
  CHECK(q.weight() == 2 * copy_len);
  CHECK(q.flipped(2 * copy_len));
  CHECK(q.flipped(5 * copy_len + 17));
  CHECK(!q.flipped(3 * copy_len));
}

TEST_CASE("symbol targeting hits one inner block in every copy") {
  const std::uint64_t copy_len = 512;
  const std::uint64_t m = 8 * copy_len;
  PatternExtras ex;
  ex.copy_len = copy_len;
  ex.inner_len = 8;
  ex.target_symbol = 5;
  auto p = make_pattern(ChannelKind::symbol_targeted, Rational(0), m, 0, ex);
  CHECK(p.weight() == 8 * 8);
  CHECK(p.weight_fraction() == Rational(1, 64));
  for (std::uint64_t c = 0; c < 8; ++c) {
    CHECK(!p.flipped(c * copy_len + 39));
    CHECK(p.flipped(c * copy_len + 40));
    CHECK(p.flipped(c * copy_len + 47));
    CHECK(!p.flipped(c * copy_len + 48));
  }
}

TEST_CASE("periodic patterns stride at floor(1/rho)") {
  auto p = make_pattern(ChannelKind::periodic, Rational(3, 20), 1000, 0);
  CHECK(p.weight() == 167);  // ceil(1000 / 6)
  CHECK(p.weight_fraction() == Rational(167, 1000));
  for (std::uint64_t pos = 0; pos < 40; ++pos)
    CHECK(p.flipped(pos) == (pos % 6 == 0));
}

TEST_CASE("applying a pattern is an involution at the pattern's weight") {
  BitVec z = random_word(4096, 42);
  auto p = make_pattern(ChannelKind::random, Rational(1, 8), 4096, 9);
  BitVec y = apply_pattern(z, p);
  CHECK(hamming_distance(y, z) == p.weight());
  CHECK(apply_pattern(y, p) == z);

  BitVec w(10);
  CHECK_THROWS_AS(apply_pattern(w, p), usage_error);
}

TEST_CASE("membership, enumeration, and window xor agree") {
  const std::uint64_t m = 8192;
  PatternExtras targeted;
  targeted.copy_len = 512;
  targeted.inner_len = 8;
  targeted.target_symbol = 3;
  targeted.target_copies = {1, 7, 8};
  PatternExtras listed;
  listed.flips = {0, 5, 63, 64, 65, 1000, 8191};

  std::vector<CorruptionPattern> pats;
  pats.push_back(make_pattern(ChannelKind::random, Rational(1, 9), m, 11));
  pats.push_back(make_pattern(ChannelKind::prefix_burst, Rational(1, 5), m, 0));
  pats.push_back(make_pattern(ChannelKind::periodic, Rational(1, 7), m, 0));
  pats.push_back(make_pattern(ChannelKind::copy_targeted, Rational(0), m, 0, targeted));
  pats.push_back(make_pattern(ChannelKind::symbol_targeted, Rational(0), m, 0, targeted));
  pats.push_back(make_pattern(ChannelKind::explicit_list, Rational(0), m, 0, listed));

  for (const auto& p : pats) {
    CAPTURE(channel_kind_name(p.kind()));

    auto flips = positions_of(p);
    CHECK(flips.size() == p.weight());
    CHECK(std::is_sorted(flips.begin(), flips.end()));
    std::set<std::uint64_t> in(flips.begin(), flips.end());
    CHECK(in.size() == flips.size());
    for (std::uint64_t pos = 0; pos < m; ++pos)
      if (p.flipped(pos) != (in.count(pos) != 0)) {
        CAPTURE(pos);
        REQUIRE(false);
      }

    // windows of awkward sizes and alignments against per-bit membership
    Rng rng(55);
    for (int it = 0; it < 40; ++it) {
      std::uint64_t nbits = 1 + rng.next_below(400);
      std::uint64_t pos = rng.next_below(m - nbits);
      std::vector<std::uint64_t> words((nbits + 63) / 64, 0);
      p.xor_range(pos, nbits, words.data());
      for (std::uint64_t i = 0; i < nbits; ++i) {
        bool bit = (words[i >> 6] >> (i & 63)) & 1;
        if (bit != p.flipped(pos + i)) {
          CAPTURE(pos);
          CAPTURE(i);
          REQUIRE(false);
        }
      }
    }

    CHECK_THROWS_AS(p.flipped(m), usage_error);
    std::uint64_t one = 0;
    CHECK_THROWS_AS(p.xor_range(m - 1, 2, &one), usage_error);
  }
}

TEST_CASE("random patterns are truncated to the budget") {
  // budget = floor(15/64 * 64) = 15; at rho just under the cap roughly half
  // of all seeds overshoot, so a qualifying seed is nearby
  const std::uint64_t m = 64;
  const Rational rho(15, 64);
  PatternExtras unchecked;
  unchecked.budget_check = false;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    auto raw = make_pattern(ChannelKind::random, rho, m, seed, unchecked);
    if (raw.weight() <= 15) continue;

    auto cut = make_pattern(ChannelKind::random, rho, m, seed);
    CHECK(cut.weight() == 15);
    auto rawset = positions_of(raw);
    for (auto f : positions_of(cut))
      CHECK(std::binary_search(rawset.begin(), rawset.end(), f));
    return;
  }
  REQUIRE(false);  // no overshooting seed in 64 tries would itself be a red flag
}

TEST_CASE("identical descriptors regenerate identical patterns") {
  auto a = make_pattern(ChannelKind::random, Rational(15, 64), 64, 3);
  auto b = make_pattern(ChannelKind::random, Rational(15, 64), 64, 3);
  CHECK(positions_of(a) == positions_of(b));
  auto c = make_pattern(ChannelKind::random, Rational(15, 64), 64, 4);
  CHECK(positions_of(a) != positions_of(c));
}

TEST_CASE("budget violations are config errors") {
  CHECK_THROWS_AS(make_pattern(ChannelKind::random, Rational(3, 10), 1000, 0),
                  config_error);
  CHECK_THROWS_AS(make_pattern(ChannelKind::prefix_burst, Rational(1, 4), 1000, 0),
                  config_error);
  // periodic realizes 1/floor(1/rho), which can overshoot a compliant rho
  CHECK_THROWS_AS(make_pattern(ChannelKind::periodic, Rational(23, 100), 1000, 0),
                  config_error);

  PatternExtras ex;
  ex.copy_len = 100;
  ex.target_copies = {0, 1, 2};
  CHECK_THROWS_AS(
      make_pattern(ChannelKind::copy_targeted, Rational(0), 1000, 0, ex),
      config_error);

  ex.budget_check = false;
  auto p = make_pattern(ChannelKind::copy_targeted, Rational(0), 1000, 0, ex);
  CHECK(p.weight() == 300);
  PatternExtras loose;
  loose.budget_check = false;
  CHECK(make_pattern(ChannelKind::prefix_burst, Rational(1, 2), 1000, 0, loose)
            .weight() == 500);
}

TEST_CASE("malformed descriptors are usage errors") {
  CHECK_THROWS_AS(make_pattern(ChannelKind::random, Rational(1, 10), 0, 0),
                  usage_error);
  CHECK_THROWS_AS(make_pattern(ChannelKind::random, Rational(-1, 10), 100, 0),
                  usage_error);
  CHECK_THROWS_AS(make_pattern(ChannelKind::random, Rational(3, 2), 100, 0),
                  usage_error);

  PatternExtras ex;
  ex.target_copies = {0};
  CHECK_THROWS_AS(  // no copy length
      make_pattern(ChannelKind::copy_targeted, Rational(0), 1000, 0, ex),
      usage_error);
  ex.copy_len = 300;
  CHECK_THROWS_AS(  // does not divide the stream
      make_pattern(ChannelKind::copy_targeted, Rational(0), 1000, 0, ex),
      usage_error);
  ex.copy_len = 100;
  ex.target_copies = {10};
  CHECK_THROWS_AS(  // copy index out of range
      make_pattern(ChannelKind::copy_targeted, Rational(0), 1000, 0, ex),
      usage_error);

  PatternExtras sym;
  sym.copy_len = 100;
  sym.inner_len = 7;
  CHECK_THROWS_AS(  // inner length does not divide a copy
      make_pattern(ChannelKind::symbol_targeted, Rational(0), 1000, 0, sym),
      usage_error);
  sym.inner_len = 10;
  sym.target_symbol = 10;
  CHECK_THROWS_AS(  // symbol index out of range
      make_pattern(ChannelKind::symbol_targeted, Rational(0), 1000, 0, sym),
      usage_error);

  PatternExtras listed;
  listed.flips = {1000};
  CHECK_THROWS_AS(  // flip past the end
      make_pattern(ChannelKind::explicit_list, Rational(0), 1000, 0, listed),
      usage_error);
}

TEST_CASE("pattern files round trip") {
  TempFile tf("roundtrip");

  PatternExtras listed;
  listed.flips = {3, 1, 4, 1, 5, 9, 2, 6};
  auto p = make_pattern(ChannelKind::explicit_list, Rational(0), 100, 0, listed);
  write_pattern_file(tf.path, p);
  auto back = read_pattern_file(tf.path);
  CHECK(back.kind() == ChannelKind::explicit_list);
  CHECK(back.length() == 100);
  CHECK(positions_of(back) == positions_of(p));

  // a generated kind stores only its descriptor and regenerates on read
  auto r = make_pattern(ChannelKind::random, Rational(1, 9), 4096, 77);
  write_pattern_file(tf.path, r);
  std::ifstream stored(tf.path);
  std::string text((std::istreambuf_iterator<char>(stored)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("\"seed\": 77") != std::string::npos);
  CHECK(text.find("flips") == std::string::npos);
  auto rr = read_pattern_file(tf.path);
  CHECK(rr.seed() == 77);
  CHECK(rr.rho() == Rational(1, 9));
  CHECK(positions_of(rr) == positions_of(r));

  PatternExtras targeted;
  targeted.copy_len = 512;
  targeted.inner_len = 8;
  targeted.target_symbol = 3;
  auto s = make_pattern(ChannelKind::symbol_targeted, Rational(0), 4096, 0, targeted);
  write_pattern_file(tf.path, s);
  auto ss = read_pattern_file(tf.path);
  CHECK(ss.weight() == s.weight());
  CHECK(positions_of(ss) == positions_of(s));
}

TEST_CASE("damaged pattern files are format errors") {
  CHECK_THROWS_AS(read_pattern_file("no_such_pattern_file.json"), infra_error);

  TempFile tf("damaged");
  {
    std::ofstream f(tf.path);
    f << "{ not json";
  }
  CHECK_THROWS_AS(read_pattern_file(tf.path), format_error);
  {
    std::ofstream f(tf.path, std::ios::trunc);
    f << "{\"kind\": \"prefix_burst\", \"seed\": 0}";  // no rho, no m_len
  }
  CHECK_THROWS_AS(read_pattern_file(tf.path), format_error);
  {
    std::ofstream f(tf.path, std::ios::trunc);
    f << "{\"kind\": \"gaussian\", \"seed\": 0, \"rho\": [1, 10], \"m_len\": 100}";
  }
  CHECK_THROWS_AS(read_pattern_file(tf.path), format_error);
}

TEST_CASE("corrupted streams read as the patterned word") {
  const std::uint64_t m = 5000;
  BitVec clean = random_word(m, 15);
  auto p = make_pattern(ChannelKind::periodic, Rational(1, 6), m, 0);
  BitVec want = apply_pattern(clean, p);

  CorruptedStream cs(std::make_unique<BufferBitStream>(clean), p);
  CHECK(cs.length() == m);
  BitVec got(m);
  Rng rng(2);
  std::uint64_t at = 0;
  while (at < m) {
    std::uint64_t take = std::min<std::uint64_t>(1 + rng.next_below(64), m - at);
    std::uint64_t word = cs.read_bits(take);
    for (std::uint64_t i = 0; i < take; ++i)
      if ((word >> i) & 1) got.set(at + i, true);
    at += take;
  }
  CHECK(got == want);

  auto mismatched = make_pattern(ChannelKind::prefix_burst, Rational(1, 10), 64, 0);
  CHECK_THROWS_AS(
      CorruptedStream(std::make_unique<BufferBitStream>(clean), mismatched),
      usage_error);
}
