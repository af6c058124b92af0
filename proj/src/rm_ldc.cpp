#include "nrstream/rm_ldc.hpp"

#include <algorithm>

#include "nrstream/errors.hpp"
#include "nrstream/gf_linalg.hpp"

namespace nrstream {

namespace {

constexpr std::uint64_t kCountCap = std::uint64_t(1) << 62;

// C(a+b, b) with saturation; a = d-1, b = nvars stay small.
std::uint64_t binom_capped(std::uint64_t top, std::uint64_t bottom) {
  if (bottom > top) {
    return 0;
  }
  bottom = std::min(bottom, top - bottom);
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= bottom; ++i) {
    acc = acc * (top - bottom + i) / i;
    if (acc > kCountCap) {
      return kCountCap;
    }
  }
  return std::uint64_t(acc);
}

std::uint64_t pow_capped(std::uint64_t base, unsigned exp) {
  unsigned __int128 acc = 1;
  for (unsigned i = 0; i < exp; ++i) {
    acc *= base;
    if (acc > kCountCap) {
      return kCountCap;
    }
  }
  return std::uint64_t(acc);
}

// Exponent tuples (a_1..a_nvars) with sum <= d-1, lexicographic, leftmost
// coordinate most significant. Doubles as the point list: coordinate j of
// grid point t is the field element with value t_j.
void enumerate_simplex(unsigned nvars, unsigned budget, std::vector<std::uint16_t>& cur,
                       std::vector<std::vector<std::uint16_t>>& out) {
  if (cur.size() == nvars) {
    out.push_back(cur);
    return;
  }
  for (unsigned a = 0; a <= budget; ++a) {
    cur.push_back(std::uint16_t(a));
    enumerate_simplex(nvars, budget - a, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::uint64_t LdcParams::outer_points() const { return pow_capped(q(), nvars); }

std::uint64_t LdcParams::codeword_bits() const {
  std::uint64_t pts = outer_points();
  if (pts >= kCountCap / inner_len()) {
    return kCountCap;
  }
  return pts * inner_len();
}

std::uint64_t LdcParams::capacity() const {
  return binom_capped(std::uint64_t(nvars) + d - 1, nvars);
}

namespace {

struct QRange {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
};

QRange q_range(unsigned d, const Rational& eps) {
  // [2d/eps, 4d/eps] in exact arithmetic
  QRange r;
  __int128 num = eps.num, den = eps.den;
  __int128 lo = (2 * __int128(d) * den + num - 1) / num;
  __int128 hi = 4 * __int128(d) * den / num;
  r.lo = lo > kCountCap ? kCountCap : std::uint64_t(lo);
  r.hi = hi > kCountCap ? kCountCap : std::uint64_t(hi);
  return r;
}

unsigned smallest_nvars(std::uint32_t n, unsigned d, std::optional<unsigned> forced) {
  if (forced) {
    return *forced;
  }
  for (unsigned nv = 1; nv <= 64; ++nv) {
    if (binom_capped(std::uint64_t(nv) + d - 1, nv) >= n) {
      return nv;
    }
  }
  return 0;  // nothing fits
}

}  // namespace

LdcParams ldc_setup(std::uint32_t n, Rational eps_ldc, const LdcOverrides& ov) {
  if (n < 1) {
    throw usage_error("need at least one message bit");
  }
  if (!(Rational(0) < eps_ldc)) {
    throw usage_error("eps must be positive");
  }

  std::optional<LdcParams> best;
  std::uint64_t best_bits = 0;

  unsigned d_lo = ov.d.value_or(2);
  unsigned d_hi = ov.d.value_or(1u << 15);
  if (d_lo < 2) {
    throw config_error("degree parameter below 2 is degenerate");
  }
  for (unsigned d = d_lo; d <= d_hi; ++d) {
    QRange qr = q_range(d, eps_ldc);
    if (!ov.d && qr.lo > (std::uint64_t(1) << 16)) {
      break;  // every admissible field is below the range already
    }
    std::vector<unsigned> ws;
    if (ov.w) {
      ws.push_back(*ov.w);
    } else {
      for (unsigned w = 2; w <= 16; ++w) {
        ws.push_back(w);
      }
    }
    for (unsigned w : ws) {
      if (w < 2 || w > 16) {
        throw config_error("field width out of range");
      }
      std::uint64_t q = std::uint64_t(1) << w;
      if (!ov.waive_q_range && (q < qr.lo || q > qr.hi)) {
        continue;
      }
      if (q < std::uint64_t(2) * d + 2) {
        continue;  // curve decoding has no slack
      }
      unsigned nv = smallest_nvars(n, d, ov.nvars);
      if (nv == 0) {
        continue;
      }
      LdcParams p;
      p.n = n;
      p.nvars = nv;
      p.d = d;
      p.field_spec = FieldSpec::canonical(w);
      p.eps_ldc = eps_ldc;
      p.k = ov.k.value_or(32);
      if (p.capacity() < n) {
        continue;  // only reachable when nvars is forced too low
      }
      std::uint64_t bits = p.codeword_bits();
      if (!best || bits < best_bits ||
          (bits == best_bits && (p.d < best->d || (p.d == best->d && p.nvars < best->nvars)))) {
        best = p;
        best_bits = bits;
      }
      if (!ov.w) {
        break;  // larger fields for the same degree only grow the codeword
      }
    }
  }
  if (!best) {
    throw config_error("no valid code parameters under the caps");
  }
  return *best;
}

Ldc::Ldc(const LdcParams& params)
    : params_(params), field_(params.field_spec), inner_(field_),
      dist_cap_(0) {
  if (params_.d < 2) {
    throw config_error("degree parameter below 2 is degenerate");
  }
  if (params_.nvars < 1) {
    throw config_error("need at least one variable");
  }
  if (params_.q() < 2u * params_.d + 2) {
    throw config_error("field too small for curve decoding");
  }
  if (params_.capacity() < params_.n) {
    throw config_error("grid capacity below message length");
  }
  if (params_.k < 1) {
    throw config_error("need at least one curve per decode");
  }
  dist_cap_ = (params_.q() - 2 * params_.d + 1) * (inner_.block_len() / 2) / 2;

  std::vector<std::uint16_t> cur;
  enumerate_simplex(params_.nvars, params_.d - 1, cur, grid_);

  // Interpolation operator: invert the grid-by-monomial evaluation matrix.
  const std::size_t cap = grid_.size();
  GfMatrix v(cap, cap);
  for (std::size_t p = 0; p < cap; ++p) {
    for (std::size_t m = 0; m < cap; ++m) {
      std::uint16_t acc = 1;
      for (unsigned t = 0; t < params_.nvars; ++t) {
        acc = field_.mul(acc, field_.pow(grid_[p][t], grid_[m][t]));
      }
      v.at(p, m) = acc;
    }
  }
  auto inv = gf_invert(field_, std::move(v));
  if (!inv) {
    throw config_error("grid is not unisolvent");
  }
  interp_op_.assign(cap, std::vector<std::uint16_t>(cap));
  for (std::size_t r = 0; r < cap; ++r) {
    for (std::size_t c = 0; c < cap; ++c) {
      interp_op_[r][c] = inv->at(r, c);
    }
  }

  fast_.emplace(field_, inner_, curve_deg_bound());
}

std::vector<std::uint16_t> Ldc::grid_point(std::uint32_t i) const {
  if (i >= params_.n) {
    throw usage_error("message index out of range");
  }
  return grid_[i];
}

std::uint64_t Ldc::point_index(const std::vector<std::uint16_t>& pt) const {
  std::uint64_t idx = 0;
  for (unsigned t = 0; t < params_.nvars; ++t) {
    idx = idx * params_.q() + pt[t];
  }
  return idx;
}

std::vector<std::uint16_t> Ldc::coeffs_for(const BitVec& x) const {
  if (x.size() != params_.n) {
    throw usage_error("message length mismatch");
  }
  const std::size_t cap = grid_.size();
  std::vector<std::uint16_t> coeffs(cap, 0);
  for (std::size_t p = 0; p < std::min<std::size_t>(params_.n, cap); ++p) {
    if (!x.get(p)) {
      continue;
    }
    for (std::size_t m = 0; m < cap; ++m) {
      coeffs[m] ^= interp_op_[m][p];  // values are 0/1, so scaling is a mask
    }
  }
  return coeffs;
}

std::uint16_t Ldc::eval_message_poly(const BitVec& x,
                                     const std::vector<std::uint16_t>& pt) const {
  auto coeffs = coeffs_for(x);
  std::uint16_t acc = 0;
  for (std::size_t m = 0; m < grid_.size(); ++m) {
    if (!coeffs[m]) {
      continue;
    }
    std::uint16_t term = coeffs[m];
    for (unsigned t = 0; t < params_.nvars; ++t) {
      term = field_.mul(term, field_.pow(pt[t], grid_[m][t]));
    }
    acc ^= term;
  }
  return acc;
}

std::vector<std::uint16_t> Ldc::rm_encode(const BitVec& x) const {
  auto coeffs = coeffs_for(x);
  const std::uint32_t q = params_.q();
  const unsigned nv = params_.nvars;
  const unsigned d = params_.d;
  const std::uint64_t npts = params_.outer_points();

  // value^exp lookup for every value and exponent < d
  std::vector<std::uint16_t> pw(std::size_t(q) * d);
  for (std::uint32_t v = 0; v < q; ++v) {
    std::uint16_t acc = 1;
    for (unsigned e = 0; e < d; ++e) {
      pw[std::size_t(v) * d + e] = acc;
      acc = field_.mul(acc, std::uint16_t(v));
    }
  }

  std::vector<std::uint16_t> out(npts);
  std::vector<std::uint16_t> pt(nv, 0);
  for (std::uint64_t idx = 0; idx < npts; ++idx) {
    std::uint16_t acc = 0;
    for (std::size_t m = 0; m < grid_.size(); ++m) {
      std::uint16_t term = coeffs[m];
      if (!term) {
        continue;
      }
      for (unsigned t = 0; t < nv; ++t) {
        term = field_.mul(term, pw[std::size_t(pt[t]) * d + grid_[m][t]]);
      }
      acc ^= term;
    }
    out[idx] = acc;
    for (unsigned t = nv; t-- > 0;) {  // odometer, rightmost fastest
      if (++pt[t] < q) {
        break;
      }
      pt[t] = 0;
    }
  }
  return out;
}

BitVec Ldc::encode(const BitVec& x) const {
  auto syms = rm_encode(x);
  const unsigned bl = inner_.block_len();
  BitVec out(codeword_bits());
  for (std::uint64_t i = 0; i < syms.size(); ++i) {
    std::uint64_t cw = inner_.encode_packed(syms[i]);
    for (unsigned off = 0; off < bl; off += 32) {  // set_bits caps below 64
      unsigned chunk = std::min(32u, bl - off);
      out.set_bits(i * bl + off, chunk, (cw >> off) & ((std::uint64_t(1) << chunk) - 1));
    }
  }
  return out;
}

std::vector<Curve> Ldc::sample_curves(std::uint32_t i, Rng& rng) const {
  std::vector<Curve> curves;
  sample_curves(i, rng, curves);
  return curves;
}

void Ldc::sample_curves(std::uint32_t i, Rng& rng, std::vector<Curve>& out) const {
  if (i >= params_.n) {
    throw usage_error("message index out of range");
  }
  const auto& v0 = grid_[i];
  const unsigned nv = params_.nvars;
  out.resize(params_.k);
  for (auto& c : out) {
    c.v0 = v0;
    c.v1.resize(nv);
    c.v2.resize(nv);
    for (unsigned t = 0; t < nv; ++t) {
      c.v1[t] = std::uint16_t(rng.next_below(params_.q()));
    }
    for (unsigned t = 0; t < nv; ++t) {
      c.v2[t] = std::uint16_t(rng.next_below(params_.q()));
    }
  }
}

QueryPlan Ldc::plan_queries(std::uint32_t i, Rng& rng) const {
  QueryPlan plan;
  plan.curves = sample_curves(i, rng);
  const std::uint32_t q = params_.q();
  const unsigned bl = inner_.block_len();
  std::vector<std::uint64_t> starts;
  starts.reserve(std::size_t(params_.k) * (q - 1));
  std::vector<std::uint16_t> pt(params_.nvars);
  for (const auto& c : plan.curves) {
    for (std::uint32_t lam = 1; lam < q; ++lam) {
      std::uint16_t lam2 = field_.mul(std::uint16_t(lam), std::uint16_t(lam));
      for (unsigned t = 0; t < params_.nvars; ++t) {
        pt[t] = std::uint16_t(c.v0[t] ^ field_.mul(c.v1[t], std::uint16_t(lam)) ^
                              field_.mul(c.v2[t], lam2));
      }
      starts.push_back(point_index(pt) * bl);
    }
  }
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
  plan.positions.reserve(starts.size() * bl);
  for (auto s : starts) {
    for (unsigned b = 0; b < bl; ++b) {
      plan.positions.push_back(s + b);
    }
  }
  return plan;
}

DecodeVerdict Ldc::decode_blocks(const std::vector<Curve>& curves,
                                 const std::uint64_t* blocks, bool want_diags) const {
  const std::uint32_t q = params_.q();
  const unsigned bl = inner_.block_len();
  const unsigned k = unsigned(curves.size());
  const std::uint32_t cap = dist_cap_;

  struct Raw {
    bool found;
    std::uint16_t h0;
    std::uint32_t dist;
  };
  std::vector<Raw> raw(k);
  unsigned ones = 0;
  for (unsigned c = 0; c < k; ++c) {
    // Best-effort minimum-distance decode: a candidate beyond the certified
    // radius still votes (structured noise routinely exceeds the worst-case
    // radius on every curve while decoding fine). Only a genuine failure to
    // produce any candidate falls back to a zero vote at the cap.
    auto v = fast_->decode(blocks + std::size_t(c) * (q - 1), cap);
    raw[c] = {v.found, v.found ? v.h0 : std::uint16_t(0),
              v.found ? v.bit_dist : cap};
    if (raw[c].h0 == 1) {
      ++ones;
    }
  }
  const std::uint8_t bit = (2 * ones > k) ? 1 : 0;

  std::int64_t sum = 0;
  DecodeVerdict verdict;
  if (want_diags) {
    verdict.curves.resize(k);
  }
  for (unsigned c = 0; c < k; ++c) {
    std::int32_t delta;
    if (!raw[c].found) {
      delta = std::int32_t(cap);
    } else {
      std::uint8_t vote = raw[c].h0 == 1 ? 1 : 0;
      // Agreeing curves report the error they saw; dissenters report the
      // least error that could have produced their vote, measured from the
      // cap. That estimate goes negative when dissent was expensive.
      delta = vote == bit ? std::int32_t(raw[c].dist)
                          : std::int32_t(cap) - std::int32_t(raw[c].dist);
    }
    sum += delta;
    if (want_diags) {
      verdict.curves[c] = CurveDiag{delta, raw[c].found, raw[c].h0};
    }
  }
  verdict.bit = bit;
  Rational penalty = Rational::make(sum, std::int64_t(k) * (q - 1) * bl);
  verdict.conf = Rational::clamp(Rational(1, 4) - penalty, Rational(0), Rational(1));
  return verdict;
}

DecodeVerdict Ldc::decode_with_confidence(
    std::uint32_t i, const std::map<std::uint64_t, std::uint8_t>& collected,
    const std::vector<Curve>& curves) const {
  auto v0 = grid_point(i);
  const std::uint32_t q = params_.q();
  const unsigned bl = inner_.block_len();
  std::vector<std::uint64_t> blocks(curves.size() * (q - 1));
  std::vector<std::uint16_t> pt(params_.nvars);
  for (std::size_t c = 0; c < curves.size(); ++c) {
    if (curves[c].v0 != v0) {
      throw usage_error("curve does not pass through the requested index");
    }
    for (std::uint32_t lam = 1; lam < q; ++lam) {
      std::uint16_t lam2 = field_.mul(std::uint16_t(lam), std::uint16_t(lam));
      for (unsigned t = 0; t < params_.nvars; ++t) {
        pt[t] = std::uint16_t(curves[c].v0[t] ^
                              field_.mul(curves[c].v1[t], std::uint16_t(lam)) ^
                              field_.mul(curves[c].v2[t], lam2));
      }
      std::uint64_t start = point_index(pt) * bl;
      std::uint64_t block = 0;
      for (unsigned b = 0; b < bl; ++b) {
        auto it = collected.find(start + b);
        if (it == collected.end()) {
          throw usage_error("collected bits missing a planned position");
        }
        block |= std::uint64_t(it->second & 1) << b;
      }
      blocks[c * (q - 1) + (lam - 1)] = block;
    }
  }
  return decode_blocks(curves, blocks.data(), true);
}

}  // namespace nrstream
