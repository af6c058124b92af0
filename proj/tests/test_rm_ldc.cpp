#include "nrstream/rm_ldc.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "nrstream/errors.hpp"
#include "nrstream/rng.hpp"
#include "nrstream/rs_decoding.hpp"

using namespace nrstream;

namespace {

LdcParams tiny_params(std::uint32_t n, Rational eps = {1, 2}) {
  // q=8, d=2, nvars=2: 64 outer points, 256 codeword bits, capacity 3
  LdcParams p;
  p.n = n;
  p.nvars = 2;
  p.d = 2;
  p.field_spec = FieldSpec::canonical(3);
  p.eps_ldc = eps;
  return p;
}

LdcParams desk_params(std::uint32_t n = 16) {
  LdcOverrides ov;
  ov.d = 4;
  ov.nvars = 3;
  ov.w = 4;
  return ldc_setup(n, {1, 2}, ov);
}

BitVec random_message(std::uint32_t n, Rng& rng) {
  BitVec x(n);
  for (std::uint32_t i = 0; i < n; ++i) x.set(i, rng.next_below(2) != 0);
  return x;
}

/* Flip `weight` distinct random bit positions. */
void corrupt_exact(BitVec& word, std::uint64_t weight, Rng& rng) {
  std::set<std::uint64_t> picked;
  while (picked.size() < weight) picked.insert(rng.next_below(word.size()));
  for (auto p : picked) word.flip(p);
}

void curve_at(const Ldc& ldc, const Curve& c, std::uint16_t lam,
              std::vector<std::uint16_t>& pt) {
  const Field& f = ldc.field();
  std::uint16_t lam2 = f.mul(lam, lam);
  for (unsigned t = 0; t < c.v0.size(); ++t)
    pt[t] = std::uint16_t(c.v0[t] ^ f.mul(c.v1[t], lam) ^ f.mul(c.v2[t], lam2));
}

std::map<std::uint64_t, std::uint8_t> collect(const BitVec& word, const QueryPlan& plan) {
  std::map<std::uint64_t, std::uint8_t> got;
  for (auto p : plan.positions) got[p] = word.get(p);
  return got;
}

}  // namespace

TEST_CASE("setup rejects a grid too small for the message") {
  LdcOverrides ov;
  ov.d = 4;
  ov.nvars = 2;
  ov.w = 4;
  CHECK_THROWS_AS(ldc_setup(16, {1, 2}, ov), config_error);  // capacity C(5,2)=10
  ov.nvars = 3;
  auto p = ldc_setup(16, {1, 2}, ov);  // capacity C(6,3)=20
  CHECK(p.capacity() == 20);
  CHECK(p.q() == 16);
  CHECK(p.nvars == 3);
}

TEST_CASE("setup picks the least power-of-two field in the eps window") {
  LdcOverrides ov;
  ov.d = 4;
  auto p = ldc_setup(16, {1, 8}, ov);  // window [64, 128]
  CHECK(p.q() == 64);
  CHECK(p.w() == 6);
}

TEST_CASE("setup minimal parameters for a one-bit message") {
  auto p = ldc_setup(1, {1, 2});
  CHECK(p.d == 2);
  CHECK(p.nvars == 1);
  CHECK(p.capacity() >= 1);

  LdcOverrides ov;
  ov.d = 1;  // degenerate: degree-0 outer polynomials carry one value total
  CHECK_THROWS_AS(ldc_setup(1, {1, 2}, ov), config_error);
  CHECK_THROWS_AS(ldc_setup(0, {1, 2}), usage_error);
  CHECK_THROWS_AS(ldc_setup(4, {0, 1}), usage_error);
}

TEST_CASE("setup result is no larger than any valid hand-rolled combination") {
  for (std::uint32_t n : {1u, 5u, 16u, 100u}) {
    auto chosen = ldc_setup(n, {1, 2});
    for (unsigned d = 2; d <= 40; ++d) {
      for (unsigned w = 2; w <= 10; ++w) {
        LdcParams cand;
        cand.n = n;
        cand.d = d;
        cand.field_spec = FieldSpec::canonical(w);
        cand.eps_ldc = {1, 2};
        std::uint64_t q = 1ull << w;
        if (q < 4ull * d || q > 8ull * d) continue;  // [2d/eps, 4d/eps]
        if (q < 2ull * d + 2) continue;
        cand.nvars = 0;
        for (unsigned nv = 1; nv <= 40; ++nv) {
          cand.nvars = nv;
          if (cand.capacity() >= n) break;
        }
        if (cand.capacity() < n) continue;
        CHECK(chosen.codeword_bits() <= cand.codeword_bits());
      }
    }
  }
}

TEST_CASE("grid points start at the origin and are distinct") {
  Ldc ldc(desk_params());
  auto first = ldc.grid_point(0);
  for (auto c : first) CHECK(c == 0);
  std::set<std::vector<std::uint16_t>> seen;
  for (std::uint32_t i = 0; i < 16; ++i) seen.insert(ldc.grid_point(i));
  CHECK(seen.size() == 16);
  CHECK_THROWS_AS(ldc.grid_point(16), usage_error);
}

TEST_CASE("outer encoding is systematic on the grid") {
  Ldc ldc(desk_params());
  Rng rng(101);
  for (int it = 0; it < 20; ++it) {
    auto x = random_message(16, rng);
    auto syms = ldc.rm_encode(x);
    REQUIRE(syms.size() == ldc.params().outer_points());
    for (std::uint32_t i = 0; i < 16; ++i)
      CHECK(syms[ldc.point_index(ldc.grid_point(i))] == (x.get(i) ? 1 : 0));
  }
  // basis vectors: the interpolant is 1 at its own grid point, 0 at the others
  for (std::uint32_t i = 0; i < 16; ++i) {
    BitVec e(16);
    e.set(i, true);
    for (std::uint32_t j = 0; j < 16; ++j)
      CHECK(ldc.eval_message_poly(e, ldc.grid_point(j)) == (i == j ? 1 : 0));
  }
}

TEST_CASE("zero message encodes to the zero codeword") {
  Ldc ldc(desk_params());
  BitVec x(16);
  for (auto s : ldc.rm_encode(x)) CHECK(s == 0);
  auto bits = ldc.encode(x);
  REQUIRE(bits.size() == ldc.codeword_bits());
  CHECK(bits.count_ones() == 0);
}

TEST_CASE("outer code distance at tiny parameters") {
  Ldc ldc(tiny_params(3));
  Rng rng(7);
  // distinct degree-<2 bivariate polynomials over GF(8) disagree on >= 56 points
  for (int it = 0; it < 50; ++it) {
    auto x = random_message(3, rng);
    auto y = random_message(3, rng);
    if (x == y) continue;
    auto sx = ldc.rm_encode(x);
    auto sy = ldc.rm_encode(y);
    std::size_t diff = 0;
    for (std::size_t v = 0; v < sx.size(); ++v) diff += sx[v] != sy[v];
    CHECK(diff >= 56);
  }
}

TEST_CASE("concatenated codeword length and bit distance") {
  LdcOverrides ov;
  ov.d = 4;
  ov.nvars = 2;
  ov.w = 4;
  Ldc ldc(ldc_setup(10, {1, 2}, ov));
  CHECK(ldc.codeword_bits() == 2048);  // 16^2 outer points, 8-bit blocks

  Ldc tiny(tiny_params(3, {1, 8}));
  Rng rng(8);
  const std::uint64_t floor_dist = 3 * tiny.codeword_bits() / 8;  // (1/2 - eps) N
  for (int it = 0; it < 30; ++it) {
    auto x = random_message(3, rng);
    auto y = random_message(3, rng);
    if (x == y) continue;
    CHECK(hamming_distance(tiny.encode(x), tiny.encode(y)) >= floor_dist);
  }
}

TEST_CASE("query plans cover each curve's blocks exactly") {
  Ldc ldc(desk_params());
  Rng rng(55);
  const auto& prm = ldc.params();
  for (std::uint32_t i : {0u, 7u, 15u}) {
    auto plan = ldc.plan_queries(i, rng);
    REQUIRE(plan.curves.size() == prm.k);
    auto v0 = ldc.grid_point(i);
    std::set<std::uint64_t> expect;
    std::vector<std::uint16_t> pt(prm.nvars);
    for (const auto& c : plan.curves) {
      CHECK(c.v0 == v0);
      std::set<std::uint64_t> starts;
      for (std::uint32_t lam = 1; lam < prm.q(); ++lam) {
        curve_at(ldc, c, std::uint16_t(lam), pt);
        starts.insert(ldc.point_index(pt) * prm.inner_len());
      }
      for (auto s : starts)
        for (unsigned b = 0; b < prm.inner_len(); ++b) expect.insert(s + b);
    }
    CHECK(plan.positions.size() == expect.size());
    CHECK(std::is_sorted(plan.positions.begin(), plan.positions.end()));
    CHECK(std::set<std::uint64_t>(plan.positions.begin(), plan.positions.end()) == expect);
    for (auto p : plan.positions) CHECK(p < ldc.codeword_bits());
  }
}

TEST_CASE("curve restriction is a low-degree univariate polynomial") {
  Ldc ldc(tiny_params(3));
  Rng rng(31);
  const std::uint32_t q = ldc.params().q();
  std::vector<std::uint16_t> pt(2);
  for (int it = 0; it < 40; ++it) {
    auto x = random_message(3, rng);
    Curve c;
    c.v0 = ldc.grid_point(std::uint32_t(rng.next_below(3)));
    c.v1 = {std::uint16_t(rng.next_below(q)), std::uint16_t(rng.next_below(q))};
    c.v2 = {std::uint16_t(rng.next_below(q)), std::uint16_t(rng.next_below(q))};
    if (it < 4) c.v1 = c.v2 = {0, 0};  // degenerate curves stay legal
    std::vector<EvalPoint> samples;
    for (std::uint32_t lam = 0; lam < q; ++lam) {
      curve_at(ldc, c, std::uint16_t(lam), pt);
      samples.push_back({std::uint16_t(lam), ldc.eval_message_poly(x, pt), false});
    }
    auto h = interpolate(samples, 2 * ldc.params().d - 2, ldc.field());
    CHECK(h.degree() <= int(2 * ldc.params().d - 2));
    for (const auto& s : samples) CHECK(poly_eval(h, s.alpha, ldc.field()) == s.value);
  }
}

TEST_CASE("decoding an uncorrupted codeword gives full confidence") {
  Ldc ldc(desk_params());
  Rng rng(202);
  auto x = random_message(16, rng);
  auto word = ldc.encode(x);
  for (std::uint32_t i = 0; i < 16; ++i) {
    auto plan = ldc.plan_queries(i, rng);
    auto v = ldc.decode_with_confidence(i, collect(word, plan), plan.curves);
    CHECK(v.bit == (x.get(i) ? 1 : 0));
    CHECK(v.conf == Rational(1, 4));
    REQUIRE(v.curves.size() == plan.curves.size());
    for (const auto& d : v.curves) {
      CHECK(d.found);
      CHECK(d.delta == 0);
    }
  }
}

TEST_CASE("decode input validation") {
  Ldc ldc(desk_params());
  Rng rng(404);
  auto x = random_message(16, rng);
  auto word = ldc.encode(x);
  auto plan = ldc.plan_queries(3, rng);
  auto got = collect(word, plan);

  auto short_map = got;
  short_map.erase(plan.positions[5]);
  CHECK_THROWS_AS(ldc.decode_with_confidence(3, short_map, plan.curves), usage_error);
  CHECK_THROWS_AS(ldc.decode_with_confidence(4, got, plan.curves), usage_error);
}

TEST_CASE("confidence denominator stays within the query budget") {
  Ldc ldc(desk_params());
  Rng rng(909);
  auto x = random_message(16, rng);
  auto clean = ldc.encode(x);
  const auto& prm = ldc.params();
  const std::int64_t bound = 4ll * prm.k * (prm.q() - 1) * prm.inner_len();
  for (std::uint64_t weight : {0ull, 17ull, 333ull, 3000ull, 9000ull}) {
    auto word = clean;
    corrupt_exact(word, weight, rng);
    std::uint32_t i = std::uint32_t(rng.next_below(16));
    auto plan = ldc.plan_queries(i, rng);
    auto v = ldc.decode_with_confidence(i, collect(word, plan), plan.curves);
    CHECK(Rational(0) <= v.conf);
    // 1/4 is the zero-error maximum, but expensive dissenting curves can
    // push the raw estimate past it at heavy corruption; only [0, 1] is hard.
    CHECK(v.conf <= Rational(1));
    CHECK(bound % v.conf.den == 0);
  }
}

TEST_CASE("wiping one outer block barely dents the confidence") {
  Ldc ldc(desk_params());
  Rng rng(777);
  auto x = random_message(16, rng);
  auto word = ldc.encode(x);
  const auto& prm = ldc.params();
  // invert every bit of the block owned by one non-grid outer symbol
  std::uint64_t victim = ldc.point_index({9, 4, 13});
  for (unsigned b = 0; b < prm.inner_len(); ++b)
    word.flip(victim * prm.inner_len() + b);
  Rational floor = Rational(1, 4) - Rational(1, std::int64_t(prm.q()) - 1);
  for (std::uint32_t i = 0; i < 16; ++i) {
    auto plan = ldc.plan_queries(i, rng);
    auto v = ldc.decode_with_confidence(i, collect(word, plan), plan.curves);
    CHECK(v.bit == (x.get(i) ? 1 : 0));
    CHECK(floor <= v.conf);
    CHECK(v.conf <= Rational(1, 4));
  }
}

TEST_CASE("ten percent random corruption still decodes" * doctest::timeout(120)) {
  Ldc ldc(desk_params());
  Rng rng(2024);
  auto x = random_message(16, rng);
  auto clean = ldc.encode(x);
  const std::uint64_t n_bits = ldc.codeword_bits();
  int good = 0;
  const int trials = 300;
  for (int t = 0; t < trials; ++t) {
    auto word = clean;
    for (std::uint64_t p = 0; p < n_bits; ++p)
      if (rng.next_below(10) == 0) word.flip(p);
    std::uint32_t i = std::uint32_t(rng.next_below(16));
    auto plan = ldc.plan_queries(i, rng);
    auto v = ldc.decode_with_confidence(i, collect(word, plan), plan.curves);
    good += v.bit == (x.get(i) ? 1 : 0);
  }
  CHECK(good >= trials * 99 / 100);
}

TEST_CASE("majority bit tracks the brute-force nearest codeword") {
  Ldc ldc(tiny_params(3));
  Rng rng(1234);
  // all eight codewords, for a global nearest-neighbor oracle
  std::vector<BitVec> words;
  std::vector<BitVec> msgs;
  for (std::uint32_t m = 0; m < 8; ++m) {
    BitVec x(3);
    for (unsigned b = 0; b < 3; ++b) x.set(b, (m >> b) & 1);
    msgs.push_back(x);
    words.push_back(ldc.encode(x));
  }
  // Concatenated minimum distance is 7*8*2 = 112. A global decoder is good to
  // 55 flips, but majority voting over curves is not: each curve sees only a
  // slice of the corruption, and past roughly half the per-curve distance the
  // slices start decoding to whatever codeword is locally nearest. A quarter
  // of the distance keeps every curve comfortably unique.
  const std::uint64_t quarter_min = 28;
  int trials = 0;
  for (int it = 0; it < 120; ++it) {
    auto x = msgs[rng.next_below(8)];
    auto word = ldc.encode(x);
    corrupt_exact(word, rng.next_below(quarter_min), rng);
    std::size_t nearest = 0;
    std::uint64_t best = word.size() + 1;
    for (std::size_t m = 0; m < words.size(); ++m) {
      auto d = hamming_distance(word, words[m]);
      if (d < best) {
        best = d;
        nearest = m;
      }
    }
    for (std::uint32_t i = 0; i < 3; ++i) {
      auto plan = ldc.plan_queries(i, rng);
      auto v = ldc.decode_with_confidence(i, collect(word, plan), plan.curves);
      trials += v.bit == (msgs[nearest].get(i) ? 1 : 0);
    }
  }
  CHECK(trials == 120 * 3);
}

TEST_CASE("fused block decoding matches the map-driven path") {
  Ldc ldc(desk_params());
  Rng rng(3333);
  auto x = random_message(16, rng);
  auto clean = ldc.encode(x);
  const auto& prm = ldc.params();
  const unsigned bl = prm.inner_len();
  for (int it = 0; it < 10; ++it) {
    auto word = clean;
    corrupt_exact(word, 200 + 150 * std::uint64_t(it), rng);
    std::uint32_t i = std::uint32_t(rng.next_below(16));
    auto plan = ldc.plan_queries(i, rng);
    auto a = ldc.decode_with_confidence(i, collect(word, plan), plan.curves);

    std::vector<std::uint64_t> blocks(plan.curves.size() * (prm.q() - 1));
    std::vector<std::uint16_t> pt(prm.nvars);
    for (std::size_t c = 0; c < plan.curves.size(); ++c)
      for (std::uint32_t lam = 1; lam < prm.q(); ++lam) {
        curve_at(ldc, plan.curves[c], std::uint16_t(lam), pt);
        std::uint64_t start = ldc.point_index(pt) * bl;
        std::uint64_t blk = 0;
        for (unsigned b = 0; b < bl; ++b)
          blk |= std::uint64_t(word.get(start + b)) << b;
        blocks[c * (prm.q() - 1) + lam - 1] = blk;
      }
    auto b = ldc.decode_blocks(plan.curves, blocks.data(), true);
    CHECK(a.bit == b.bit);
    CHECK(a.conf == b.conf);
    REQUIRE(a.curves.size() == b.curves.size());
    for (std::size_t c = 0; c < a.curves.size(); ++c) {
      CHECK(a.curves[c].delta == b.curves[c].delta);
      CHECK(a.curves[c].found == b.curves[c].found);
      CHECK(a.curves[c].h0 == b.curves[c].h0);
    }
  }
}
