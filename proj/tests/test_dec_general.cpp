#include "nrstream/dec_general.hpp"

#include <cstdint>
#include <memory>
#include <vector>

#include "doctest.h"
#include "nrstream/channel.hpp"
#include "nrstream/enc.hpp"
#include "nrstream/errors.hpp"
#include "nrstream/rng.hpp"

using namespace nrstream;

namespace {

StreamParams nine_params(unsigned ell = 8, unsigned T = 2) {
  StreamParams sp;
  sp.n = 9;
  sp.r = 3;
  sp.ell = ell;
  sp.T = T;
  sp.D = 2;
  sp.mode = Mode::general;
  sp.ldc = ldc_setup(9, {1, 2});
  return sp;
}

BitVec random_bits(std::uint64_t n, Rng& rng) {
  BitVec v(n);
  for (std::uint64_t i = 0; i < n; ++i) v.set(i, rng.next_below(2));
  return v;
}

StateGuess sg(std::uint64_t s, Rational c) {
  StateGuess g;
  g.state = s;
  g.conf = c;
  return g;
}

Estimate ev(std::uint64_t v, Rational c) {
  Estimate e;
  e.value = v;
  e.conf = c;
  return e;
}

// Forwards another stream's bits while recording every consumed range.
class TracingStream : public BitStream {
 public:
  explicit TracingStream(BitStream& in) : BitStream(in.length()), in_(in) {}
  std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;

 protected:
  void produce(std::uint64_t pos, std::uint64_t nbits, std::uint64_t* out) override {
    produce_into(in_, pos, nbits, out);
  }
  void on_consume(std::uint64_t pos, std::uint64_t nbits) override {
    ranges.push_back({pos, nbits});
  }

 private:
  BitStream& in_;
};

// Fold a state through x[i..j) by hand — the truth for sub-interval tests.
std::uint64_t fold_span(const StreamingAlgorithm& A, std::uint64_t q,
                        const BitVec& x, std::uint64_t i, std::uint64_t j) {
  for (std::uint64_t p = i; p < j; ++p) q = A.step(q, x.get(p) ? 1 : 0);
  return q;
}

}  // namespace

TEST_CASE("slot updates compare against the snapshot, never the live value") {
  StateGuess snap = sg(4, Rational(1, 4));
  StateGuess live = snap;
  general_slot_update(live, snap, ev(4, Rational(1, 8)));
  CHECK(*live.state == 4);
  CHECK(live.conf == Rational(3, 8));

  // a second update in the same chunk still reasons from the snapshot:
  // 1/4 - 1/2 < 0 flips, it does not subtract from the accumulated 3/8
  general_slot_update(live, snap, ev(9, Rational(1, 2)));
  CHECK(*live.state == 9);
  CHECK(live.conf == Rational(1, 4));

  // disagreement that does not overcome the snapshot keeps its state
  live = snap;
  general_slot_update(live, snap, ev(9, Rational(1, 8)));
  CHECK(*live.state == 4);
  CHECK(live.conf == Rational(1, 8));

  // exact tie keeps the incumbent state at zero confidence
  live = snap;
  general_slot_update(live, snap, ev(9, Rational(1, 4)));
  CHECK(*live.state == 4);
  CHECK(live.conf == Rational(0));

  StateGuess unset;
  CHECK_THROWS_AS(general_slot_update(live, unset, ev(1, Rational(-1, 2))),
                  usage_error);
  CHECK_THROWS_AS(general_slot_update(live, unset, ev(1, Rational(3, 2))),
                  usage_error);
}

TEST_CASE("an unset snapshot never matches") {
  StateGuess unset;
  StateGuess live = unset;
  // nonzero evidence adopts through the flip rule
  general_slot_update(live, unset, ev(0, Rational(1, 4)));
  REQUIRE(live.state.has_value());
  CHECK(*live.state == 0);
  CHECK(live.conf == Rational(1, 4));

  // zero-confidence evidence leaves the slot unset
  live = unset;
  general_slot_update(live, unset, ev(7, Rational(0)));
  CHECK(!live.state.has_value());
  CHECK(live.conf == Rational(0));
}

TEST_CASE("chunk reset wipes strictly downstream slots") {
  auto fresh = [] {
    return std::vector<StateGuess>{sg(1, Rational(1, 2)), sg(2, Rational(1, 4)),
                                   sg(3, Rational(1, 8)), sg(4, Rational(1, 16))};
  };
  auto snapshot = fresh();

  // slot 1 changed: slots 2 and 3 unset, slots 0 and 1 untouched
  auto slots = fresh();
  slots[1] = sg(9, Rational(1, 3));
  general_chunk_reset(slots, snapshot);
  CHECK(*slots[0].state == 1);
  CHECK(*slots[1].state == 9);
  CHECK(slots[1].conf == Rational(1, 3));
  CHECK(!slots[2].state.has_value());
  CHECK(slots[2].conf == Rational(0));
  CHECK(!slots[3].state.has_value());

  // several changes: the smallest index governs
  slots = fresh();
  slots[1] = sg(9, Rational(1, 3));
  slots[3] = sg(8, Rational(1, 3));
  general_chunk_reset(slots, snapshot);
  CHECK(!slots[2].state.has_value());
  CHECK(!slots[3].state.has_value());

  // no state changed: nothing happens, even when confidences moved
  slots = fresh();
  slots[2].conf = Rational(7, 8);
  general_chunk_reset(slots, snapshot);
  CHECK(*slots[3].state == 4);
  CHECK(slots[2].conf == Rational(7, 8));

  // a slot that went unset counts as changed
  slots = fresh();
  slots[0] = StateGuess{};
  general_chunk_reset(slots, snapshot);
  CHECK(!slots[1].state.has_value());
  CHECK(!slots[2].state.has_value());

  auto short_snap = snapshot;
  short_snap.pop_back();
  CHECK_THROWS_AS(general_chunk_reset(slots, short_snap), usage_error);
}

TEST_CASE("clean streams thread states through every interval") {
  auto sp = nine_params();
  Ldc ldc(sp.ldc);
  Rng xr(17);
  auto x = random_bits(sp.n, xr);
  auto word = ldc.encode(x);
  auto A = dfa_algorithm();

  // Chained slots warm up one per chunk: slot a cannot pin its state until
  // slot a-1 has one, and every fill resets the slots behind it. So on a
  // clean stream the last slot only collects ell-r+1 of the ell chunk
  // confidences, scaling each recursion level by (ell-r+1)/ell. Leaves have
  // no slots and keep the full quarter.
  auto clean_conf = [&](std::uint64_t span) {
    Rational c(1, 4);
    const Rational warm(std::int64_t(sp.ell) - sp.r + 1, std::int64_t(sp.ell));
    for (std::uint64_t s = span; s > 1; s /= sp.r) c = c * warm;
    return c;
  };
  CHECK(clean_conf(3) == Rational(3, 16));
  CHECK(clean_conf(9) == Rational(9, 64));

  struct Span {
    std::uint64_t i, j;
  };
  for (auto [i, j] : {Span{0, 1}, Span{5, 6}, Span{0, 3}, Span{3, 6},
                      Span{0, 9}}) {
    for (std::uint64_t q0 : {0ull, 2ull}) {
      RepeatedStream bs(word, copies_consumed(i, j, sp));
      Rng rng(1000 + 17 * i + j + q0);
      DecodeRun run(ldc, bs, rng);
      auto est = est_a_general(i, j, q0, run, A, sp);
      CHECK(est.value == fold_span(A, q0, x, i, j));
      CHECK(est.conf == clean_conf(j - i));
      CHECK(bs.cursor() == bs.length());
    }
  }
}

TEST_CASE("the full general decoder matches the noiseless run") {
  auto sp = nine_params();
  Ldc ldc(sp.ldc);
  Rng xr(27);
  auto x = random_bits(sp.n, xr);
  auto word = ldc.encode(x);

  auto check_alg = [&](const StreamingAlgorithm& A) {
    RepeatedStream bs(word, sp.copies());
    Rng rng(37);
    auto rep = run_general(A, bs, sp, ldc, rng);
    CHECK(rep.value == run_noiseless(A, x));
    // T = 2 agreeing runs, each worth (1/4) * ((ell-r+1)/ell)^D = 9/64
    // after the slot warm-up at both recursion levels.
    CHECK(rep.conf == Rational(9, 32));
    CHECK(rep.bits_read == sp.m_len());
    CHECK(rep.copies_decoded == sp.copies());
    CHECK(rep.peak_collected < ldc.codeword_bits());
  };

  check_alg(dfa_algorithm());
  check_alg(index_algorithm(2, 1));  // 9 bits = three 3-bit records
  check_alg(counter_algorithm(sp.n));
  check_alg(parity_algorithm());

  // determinism and the convenience overload
  RepeatedStream b1(word, sp.copies());
  RepeatedStream b2(word, sp.copies());
  Rng r1(55), r2(55);
  auto A = dfa_algorithm();
  auto a = run_general(A, b1, sp, ldc, r1);
  auto b = run_general(A, b2, sp, r2);
  CHECK(a.value == b.value);
  CHECK(a.conf == b.conf);
  CHECK(a.peak_registers == b.peak_registers);
}

TEST_CASE("general decoder input validation") {
  auto sp = nine_params();
  Ldc ldc(sp.ldc);
  Rng xr(47);
  auto word = ldc.encode(random_bits(sp.n, xr));
  Rng rng(48);

  auto no_step = dfa_algorithm();
  no_step.step = nullptr;
  RepeatedStream b1(word, sp.copies());
  CHECK_THROWS_AS(run_general(no_step, b1, sp, ldc, rng), usage_error);

  auto wide = dfa_algorithm();
  wide.state_bits = 65;
  RepeatedStream b2(word, sp.copies());
  CHECK_THROWS_AS(run_general(wide, b2, sp, ldc, rng), usage_error);

  RepeatedStream b3(word, 1);
  DecodeRun run(ldc, b3, rng);
  auto A = dfa_algorithm();
  CHECK_THROWS_AS(est_a_general(0, 2, 0, run, A, sp), usage_error);
  CHECK_THROWS_AS(est_a_general(2, 1, 0, run, A, sp), usage_error);
  CHECK(b3.cursor() == 0);
}

TEST_CASE("corrupted streams still reach the right final state" * doctest::timeout(120)) {
  auto sp = nine_params();
  Ldc ldc(sp.ldc);
  Rng xr(57);
  auto x = random_bits(sp.n, xr);
  auto word = ldc.encode(x);
  auto A = dfa_algorithm();
  std::uint64_t truth = run_noiseless(A, x);

  int good = 0;
  const int trials = 25;
  for (int t = 0; t < trials; ++t) {
    auto pat = make_pattern(ChannelKind::random, Rational(1, 10), sp.m_len(),
                            3100 + std::uint64_t(t));
    auto base = std::make_unique<RepeatedStream>(word, sp.copies());
    CorruptedStream bs(std::move(base), pat);
    Rng rng(7100 + std::uint64_t(t));
    auto rep = run_general(A, bs, sp, ldc, rng);
    good += rep.value == truth;
  }
  CHECK(good >= 22);
}

TEST_CASE("the two pipelines agree on identical corrupted streams" * doctest::timeout(120)) {
  auto sp = nine_params();
  Ldc ldc(sp.ldc);
  Rng xr(67);
  auto x = random_bits(sp.n, xr);
  auto word = ldc.encode(x);
  auto y = random_bits(sp.n, xr);
  auto L = dot_product_linear(y);
  auto A = lift_linear(L);

  int agree = 0;
  const int trials = 15;
  for (int t = 0; t < trials; ++t) {
    auto pat = make_pattern(ChannelKind::random, Rational(1, 10), sp.m_len(),
                            5200 + std::uint64_t(t));
    auto b1 = std::make_unique<RepeatedStream>(word, sp.copies());
    CorruptedStream s1(std::move(b1), pat);
    Rng r1(8300 + std::uint64_t(t));
    auto lin = run_linear(L, s1, sp, ldc, r1);

    auto b2 = std::make_unique<RepeatedStream>(word, sp.copies());
    CorruptedStream s2(std::move(b2), pat);
    Rng r2(8300 + std::uint64_t(t));
    auto gen = run_general(A, s2, sp, ldc, r2);
    agree += lin.value == gen.value;
  }
  CHECK(agree >= 13);
}

TEST_CASE("general confidences clear the denominator audit") {
  auto sp = nine_params();
  Ldc ldc(sp.ldc);
  Rng xr(77);
  auto word = ldc.encode(random_bits(sp.n, xr));
  auto A = dfa_algorithm();

  struct Audit : ConfAudit {
    const StreamParams& sp;
    const LdcParams& prm;
    std::uint64_t seen = 0;
    explicit Audit(const StreamParams& s, const LdcParams& p) : sp(s), prm(p) {}
    void on_conf(std::uint64_t span, const Rational& conf) override {
      ++seen;
      CHECK(Rational(0) <= conf);
      CHECK(conf <= Rational(1));
      std::int64_t bound = 4ll * prm.k * (prm.q() - 1) * prm.inner_len();
      for (std::uint64_t w = span; w > 1; w /= sp.r) bound *= sp.ell;
      CHECK(bound % conf.den == 0);
    }
  } audit(sp, sp.ldc);

  auto pat = make_pattern(ChannelKind::random, Rational(1, 10), sp.m_len(), 661);
  auto base = std::make_unique<RepeatedStream>(word, sp.copies());
  CorruptedStream bs(std::move(base), pat);
  Rng rng(662);
  run_general(A, bs, sp, ldc, rng, &audit);

  const std::uint64_t rl = std::uint64_t(sp.r) * sp.ell;
  CHECK(audit.seen == sp.T * (1 + rl + rl * rl));
}

TEST_CASE("general decoding is one pass and consumes the whole stream") {
  auto sp = nine_params();
  Ldc ldc(sp.ldc);
  Rng xr(87);
  auto word = ldc.encode(random_bits(sp.n, xr));
  auto A = index_algorithm(2, 2);

  auto pat = make_pattern(ChannelKind::prefix_burst, Rational(1, 10),
                          sp.m_len(), 0);
  auto base = std::make_unique<RepeatedStream>(word, sp.copies());
  CorruptedStream corrupted(std::move(base), pat);
  TracingStream bs(corrupted);
  Rng rng(88);
  auto rep = run_general(A, bs, sp, ldc, rng);

  CHECK(rep.bits_read == sp.m_len());
  std::uint64_t at = 0;
  for (auto [pos, nbits] : bs.ranges) {
    CHECK(pos == at);
    at = pos + nbits;
  }
  CHECK(at == sp.m_len());
}

TEST_CASE("one general recursion level costs exactly one frame of registers") {
  // Same code shape at both depths; the difference is the extra level's live
  // and snapshot slots plus permutation and loop counters.
  LdcOverrides ov;
  ov.d = 3;
  ov.w = 4;
  ov.nvars = 3;
  StreamParams deep;
  deep.n = 9;
  deep.r = 3;
  deep.ell = 2;
  deep.T = 1;
  deep.D = 2;
  deep.mode = Mode::general;
  deep.ldc = ldc_setup(9, {1, 2}, ov);
  StreamParams shallow = deep;
  shallow.n = 3;
  shallow.D = 1;
  shallow.ldc = ldc_setup(3, {1, 2}, ov);

  Ldc deep_ldc(deep.ldc);
  Ldc shallow_ldc(shallow.ldc);
  Rng xr(97);
  auto deep_word = deep_ldc.encode(random_bits(9, xr));
  auto shallow_word = shallow_ldc.encode(random_bits(3, xr));
  auto A = dfa_algorithm();  // two state bits

  RepeatedStream b1(deep_word, deep.copies());
  Rng r1(98);
  auto rep_deep = run_general(A, b1, deep, deep_ldc, r1);
  RepeatedStream b2(shallow_word, shallow.copies());
  Rng r2(98);
  auto rep_shallow = run_general(A, b2, shallow, shallow_ldc, r2);

  const std::uint64_t frame =
      2 * 3 * (A.state_bits + kConfBits) + 3 * 2 + kFrameOverheadBits;
  CHECK(rep_deep.peak_registers - rep_shallow.peak_registers == frame);
  CHECK(rep_deep.peak_collected < deep_ldc.codeword_bits());
}
