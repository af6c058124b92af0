#include "nrstream/selftest.hpp"

#include <bit>
#include <cstdio>
#include <functional>
#include <map>

#include "nrstream/enc.hpp"
#include "nrstream/galois.hpp"
#include "nrstream/inner_code.hpp"
#include "nrstream/rm_ldc.hpp"
#include "nrstream/rng.hpp"
#include "nrstream/rs_decoding.hpp"

namespace nrstream {

bool SelftestReport::ok() const {
  for (const SelftestCheck& c : checks) {
    if (!c.ok) return false;
  }
  return true;
}

namespace {

using MulFn = std::function<std::uint16_t(std::uint16_t, std::uint16_t)>;

std::string fmt(const char* pattern, unsigned a, unsigned b, unsigned c) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

// Axioms plus agreement with the carry-less reference, exhaustive for small
// fields. Any single changed product shows up here: directly in the
// reference sweep, and again in associativity for every third operand.
SelftestCheck check_field_axioms(const Field& f, const MulFn& mul, bool exhaustive) {
  SelftestCheck out{"field axioms over GF(2^" + std::to_string(f.w()) + ")",
                    false, ""};
  const std::uint32_t q = f.q();

  auto triple = [&](std::uint16_t a, std::uint16_t b, std::uint16_t c) -> bool {
    if (mul(a, mul(b, c)) != mul(mul(a, b), c)) {
      out.detail = fmt("associativity fails at (%u, %u, %u)", a, b, c);
      return false;
    }
    if (mul(a, f.add(b, c)) != f.add(mul(a, b), mul(a, c))) {
      out.detail = fmt("distributivity fails at (%u, %u, %u)", a, b, c);
      return false;
    }
    return true;
  };

  for (std::uint32_t a = 0; a < q; ++a) {
    if (mul(std::uint16_t(a), 1) != a || mul(1, std::uint16_t(a)) != a) {
      out.detail = fmt("identity fails at %u", a, 0, 0);
      return out;
    }
    if (mul(std::uint16_t(a), 0) != 0) {
      out.detail = fmt("zero annihilation fails at %u", a, 0, 0);
      return out;
    }
    if (a != 0 && mul(std::uint16_t(a), f.inv(std::uint16_t(a))) != 1) {
      out.detail = fmt("inverse fails at %u", a, 0, 0);
      return out;
    }
  }

  if (exhaustive) {
    for (std::uint32_t a = 0; a < q; ++a) {
      for (std::uint32_t b = 0; b < q; ++b) {
        if (mul(std::uint16_t(a), std::uint16_t(b)) !=
            f.mul_slow(std::uint16_t(a), std::uint16_t(b))) {
          out.detail = fmt("table disagrees with reference at (%u, %u)", a, b, 0);
          return out;
        }
        for (std::uint32_t c = 0; c < q; ++c) {
          if (!triple(std::uint16_t(a), std::uint16_t(b), std::uint16_t(c))) return out;
        }
      }
    }
  } else {
    Rng rng(0xf1e1d);
    for (unsigned t = 0; t < 5000; ++t) {
      auto a = std::uint16_t(rng.next_below(q));
      auto b = std::uint16_t(rng.next_below(q));
      auto c = std::uint16_t(rng.next_below(q));
      if (!triple(a, b, c)) return out;
      if (mul(a, b) != f.mul_slow(a, b)) {
        out.detail = fmt("table disagrees with reference at (%u, %u)", a, b, 0);
        return out;
      }
    }
  }
  out.ok = true;
  return out;
}

SelftestCheck check_inner_distances() {
  SelftestCheck out{"inner code minimum distance", false, ""};
  for (unsigned w : {3u, 4u, 5u, 6u}) {
    Field f(w);
    InnerCode inner(f);
    const unsigned bl = inner.block_len();
    unsigned best = bl + 1;
    for (std::uint32_t a = 0; a < f.q(); ++a) {
      for (std::uint32_t b = a + 1; b < f.q(); ++b) {
        auto d = unsigned(std::popcount(inner.encode_packed(std::uint16_t(a)) ^
                                        inner.encode_packed(std::uint16_t(b))));
        if (d < best) best = d;
      }
    }
    if (best != bl / 2) {
      out.detail = fmt("w = %u: min distance %u, want %u", w, best, bl / 2);
      return out;
    }
  }
  out.ok = true;
  return out;
}

SelftestCheck check_curve_decoder_radius() {
  SelftestCheck out{"curve decoder radius", false, ""};
  Field f(4);
  const unsigned npts = 15, deg = 6;
  const unsigned radius = (npts - deg - 1) / 2;  // 4
  Rng rng(0xbead);

  for (unsigned trial = 0; trial < 80; ++trial) {
    Poly g;
    g.coeffs.resize(deg + 1);
    for (auto& c : g.coeffs) c = std::uint16_t(rng.next_below(16));
    g.trim();

    std::vector<EvalPoint> pts(npts);
    for (unsigned i = 0; i < npts; ++i) {
      pts[i].alpha = std::uint16_t(i + 1);
      pts[i].value = poly_eval(g, pts[i].alpha, f);
    }
    // exactly `radius` planted errors
    for (unsigned e = 0; e < radius; ++e) {
      auto& p = pts[(trial * 7 + e * 3) % npts];
      p.value = std::uint16_t(p.value ^ (1 + rng.next_below(15)));
    }
    auto got = berlekamp_welch(pts, deg, f);
    if (!got || !(*got == g)) {
      out.detail = fmt("trial %u: radius-%u recovery failed", trial, radius, 0);
      return out;
    }

    // one error past the radius: whatever comes back (if anything) must
    // itself sit within the radius — never some third far-away polynomial
    auto& extra = pts[(trial * 7 + radius * 3 + 1) % npts];
    extra.value = std::uint16_t(extra.value ^ (1 + rng.next_below(15)));
    auto over = berlekamp_welch(pts, deg, f);
    if (over) {
      unsigned dist = 0;
      for (const auto& p : pts) {
        if (poly_eval(*over, p.alpha, f) != p.value) ++dist;
      }
      if (dist > radius) {
        out.detail = fmt("trial %u: returned a polynomial at distance %u", trial, dist, 0);
        return out;
      }
    }
  }
  out.ok = true;
  return out;
}

SelftestCheck check_gmd_erasure_ladder() {
  SelftestCheck out{"concatenated distance ladder", false, ""};
  Field f(4);
  InnerCode inner(f);
  const unsigned npts = 15, deg = 6;
  Rng rng(0xface);

  std::vector<std::uint16_t> alphas(npts);
  for (unsigned i = 0; i < npts; ++i) alphas[i] = std::uint16_t(i + 1);

  for (unsigned trial = 0; trial < 50; ++trial) {
    Poly g;
    g.coeffs.resize(deg + 1);
    for (auto& c : g.coeffs) c = std::uint16_t(rng.next_below(16));
    g.trim();

    std::vector<std::vector<std::uint8_t>> blocks(npts);
    for (unsigned i = 0; i < npts; ++i) {
      blocks[i] = inner.encode(poly_eval(g, alphas[i], f));
    }
    // trash three whole blocks
    for (unsigned e = 0; e < 3; ++e) {
      auto& blk = blocks[(trial * 5 + e) % npts];
      for (auto& bit : blk) bit = std::uint8_t(rng.next_below(2));
    }
    auto got = gmd_decode(blocks, alphas, deg, inner, f);
    if (!got.poly || !(*got.poly == g)) {
      out.detail = fmt("trial %u: three trashed blocks not recovered", trial, 0, 0);
      return out;
    }
  }
  out.ok = true;
  return out;
}

SelftestCheck check_confidence_denominators() {
  SelftestCheck out{"confidence denominator bound", false, ""};
  LdcParams lp = ldc_setup(3, {1, 2});
  Ldc ldc(lp);
  Rng rng(0xcafe);

  BitVec x(lp.n);
  for (std::uint32_t i = 0; i < lp.n; ++i) x.set(i, rng.next_below(2));
  const BitVec word = ldc.encode(x);
  const std::int64_t bound =
      4ll * lp.k * (lp.q() - 1) * lp.inner_len();

  for (unsigned trial = 0; trial < 20; ++trial) {
    BitVec recv = word;
    for (std::uint64_t p = 0; p < recv.size(); ++p) {
      if (rng.next_below(10) == 0) recv.set(p, !recv.get(p));  // ~10%
    }
    const auto i = std::uint32_t(trial % lp.n);
    QueryPlan plan = ldc.plan_queries(i, rng);
    std::map<std::uint64_t, std::uint8_t> collected;
    for (std::uint64_t pos : plan.positions) collected[pos] = recv.get(pos);
    DecodeVerdict v = ldc.decode_with_confidence(i, collected, plan.curves);
    if (bound % v.conf.den != 0) {
      out.detail = "denominator " + std::to_string(v.conf.den) +
                   " does not divide " + std::to_string(bound);
      return out;
    }
  }

  // and the clean case is exactly a quarter
  Rng crng(0xd00d);
  QueryPlan plan = ldc.plan_queries(0, crng);
  std::map<std::uint64_t, std::uint8_t> collected;
  for (std::uint64_t pos : plan.positions) collected[pos] = word.get(pos);
  DecodeVerdict v = ldc.decode_with_confidence(0, collected, plan.curves);
  if (v.bit != x.get(0) || v.conf != Rational(1, 4)) {
    out.detail = "clean decode is not (x_i, 1/4)";
    return out;
  }
  out.ok = true;
  return out;
}

SelftestCheck check_stream_length_formula() {
  SelftestCheck out{"stream length formula", false, ""};
  Rng rng(0x5eed);
  struct Combo {
    std::uint32_t n;
    unsigned r, ell, T, D;
  };
  for (Combo c : {Combo{3, 3, 2, 1, 1}, Combo{9, 3, 2, 2, 2}, Combo{4, 2, 3, 1, 2}}) {
    StreamParams sp;
    sp.n = c.n;
    sp.r = c.r;
    sp.ell = c.ell;
    sp.T = c.T;
    sp.D = c.D;
    sp.ldc = ldc_setup(c.n, {1, 2});
    BitVec x(sp.n);
    for (std::uint32_t i = 0; i < sp.n; ++i) x.set(i, rng.next_below(2));
    const std::uint64_t want = sp.copies() * sp.ldc.codeword_bits();
    if (encode_stream(x, sp).size() != want) {
      out.detail = fmt("n=%u r=%u: wrong stream length", c.n, c.r, 0);
      return out;
    }
  }
  out.ok = true;
  return out;
}

}  // namespace

SelftestReport run_selftest(std::uint64_t mutation_seed) {
  SelftestReport rep;

  for (unsigned w : {3u, 4u, 5u}) {
    Field f(w);
    MulFn mul = [&f](std::uint16_t a, std::uint16_t b) { return f.mul(a, b); };
    if (mutation_seed != 0) {
      // Corrupt one product, chosen by the seed: the suite must notice.
      Rng mr(mutation_seed + w);
      const auto a0 = std::uint16_t(1 + mr.next_below(f.q() - 1));
      const auto b0 = std::uint16_t(1 + mr.next_below(f.q() - 1));
      const auto delta = std::uint16_t(1 + mr.next_below(f.q() - 1));
      mul = [&f, a0, b0, delta](std::uint16_t a, std::uint16_t b) {
        std::uint16_t v = f.mul(a, b);
        return (a == a0 && b == b0) ? std::uint16_t(v ^ delta) : v;
      };
    }
    rep.checks.push_back(check_field_axioms(f, mul, true));
  }
  {
    Field f16(16);
    MulFn mul = [&f16](std::uint16_t a, std::uint16_t b) { return f16.mul(a, b); };
    rep.checks.push_back(check_field_axioms(f16, mul, false));
  }

  rep.checks.push_back(check_inner_distances());
  rep.checks.push_back(check_curve_decoder_radius());
  rep.checks.push_back(check_gmd_erasure_ladder());
  rep.checks.push_back(check_confidence_denominators());
  rep.checks.push_back(check_stream_length_formula());
  return rep;
}

}  // namespace nrstream
