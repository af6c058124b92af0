#include "nrstream/rs_decoding.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#include "nrstream/errors.hpp"
#include "nrstream/gf_linalg.hpp"

namespace nrstream {

void Poly::trim() {
  while (!coeffs.empty() && coeffs.back() == 0) {
    coeffs.pop_back();
  }
}

std::uint16_t poly_eval(const Poly& p, std::uint16_t alpha, const Field& f) {
  std::uint16_t acc = 0;
  for (std::size_t i = p.coeffs.size(); i-- > 0;) {
    acc = f.add(f.mul(acc, alpha), p.coeffs[i]);
  }
  return acc;
}

namespace {

// Long division: a = q*b + r with deg r < deg b. b must be nonzero.
std::pair<Poly, Poly> poly_divmod(const Poly& a, const Poly& b, const Field& f) {
  if (b.is_zero()) {
    throw usage_error("division by the zero polynomial");
  }
  Poly r = a;
  r.trim();
  int db = b.degree();
  std::uint16_t lead_inv = f.inv(b.coeffs.back());
  Poly q;
  if (r.degree() >= db) {
    q.coeffs.assign(r.degree() - db + 1, 0);
  }
  while (r.degree() >= db) {
    int shift = r.degree() - db;
    std::uint16_t factor = f.mul(r.coeffs.back(), lead_inv);
    q.coeffs[shift] = factor;
    for (int i = 0; i <= db; ++i) {
      r.coeffs[i + shift] = f.add(r.coeffs[i + shift], f.mul(factor, b.coeffs[i]));
    }
    r.trim();
  }
  q.trim();
  return {q, r};
}

void check_distinct_alphas(const std::vector<EvalPoint>& pts) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (pts[i].alpha == pts[j].alpha) {
        throw usage_error("duplicate evaluation point alphas");
      }
    }
  }
}

}  // namespace

Poly interpolate(const std::vector<EvalPoint>& points, unsigned target_deg, const Field& f) {
  const std::size_t need = std::size_t(target_deg) + 1;
  std::vector<EvalPoint> used;
  used.reserve(need);
  for (const auto& p : points) {
    if (p.erased) {
      continue;
    }
    used.push_back(p);
    if (used.size() == need) {
      break;
    }
  }
  if (used.size() < need) {
    throw usage_error("not enough non-erased points to interpolate");
  }
  check_distinct_alphas(used);

  // Master product P(x) = prod_i (x + a_i), then per point divide out its
  // factor synthetically and scale so the basis hits v_i at a_i.
  std::vector<std::uint16_t> master(need + 1, 0);
  master[0] = 1;
  std::size_t deg = 0;
  for (std::size_t i = 0; i < need; ++i) {
    std::uint16_t a = used[i].alpha;
    for (std::size_t t = deg + 1; t >= 1; --t) {
      master[t] = f.add(master[t - 1], f.mul(master[t], a));
    }
    master[0] = f.mul(master[0], a);
    ++deg;
  }

  std::vector<std::uint16_t> acc(need, 0);
  std::vector<std::uint16_t> basis(need);
  for (std::size_t i = 0; i < need; ++i) {
    std::uint16_t a = used[i].alpha;
    // synthetic division of master by (x + a)
    basis[need - 1] = master[need];
    for (std::size_t t = need - 1; t-- > 0;) {
      basis[t] = f.add(master[t + 1], f.mul(a, basis[t + 1]));
    }
    std::uint16_t denom = 0;
    for (std::size_t t = need; t-- > 0;) {
      denom = f.add(f.mul(denom, a), basis[t]);
    }
    std::uint16_t scale = f.mul(used[i].value, f.inv(denom));
    for (std::size_t t = 0; t < need; ++t) {
      acc[t] = f.add(acc[t], f.mul(scale, basis[t]));
    }
  }
  Poly g{std::move(acc)};
  g.trim();
  return g;
}

std::optional<Poly> berlekamp_welch(const std::vector<EvalPoint>& points,
                                    unsigned deg_bound, const Field& f) {
  for (const auto& p : points) {
    if (p.erased) {
      throw usage_error("berlekamp_welch takes no erased points");
    }
  }
  check_distinct_alphas(points);
  const std::size_t np = points.size();
  if (np < std::size_t(deg_bound) + 1) {
    return std::nullopt;
  }
  const unsigned e = (unsigned(np) - deg_bound - 1) / 2;

  // E(a_i) v_i + N(a_i) = 0 with deg E <= e, deg N <= e + deg_bound. Any
  // nonzero kernel vector has E != 0: were E = 0, N would vanish on np > deg N
  // points and be zero too.
  const std::size_t ecols = e + 1;
  const std::size_t ncols = std::size_t(e) + deg_bound + 1;
  GfMatrix m(np, ecols + ncols);
  for (std::size_t i = 0; i < np; ++i) {
    std::uint16_t a = points[i].alpha;
    std::uint16_t v = points[i].value;
    std::uint16_t pw = 1;
    for (std::size_t c = 0; c < std::max(ecols, ncols); ++c) {
      if (c < ecols) {
        m.at(i, c) = f.mul(v, pw);
      }
      if (c < ncols) {
        m.at(i, ecols + c) = pw;
      }
      pw = f.mul(pw, a);
    }
  }
  auto kv = gf_kernel_vector(f, std::move(m));
  if (!kv) {
    return std::nullopt;
  }
  Poly locator{std::vector<std::uint16_t>(kv->begin(), kv->begin() + ecols)};
  Poly product{std::vector<std::uint16_t>(kv->begin() + ecols, kv->end())};
  locator.trim();
  product.trim();
  if (locator.is_zero()) {
    return std::nullopt;
  }
  auto [g, rem] = poly_divmod(product, locator, f);
  if (!rem.is_zero() || g.degree() > int(deg_bound)) {
    return std::nullopt;
  }
  unsigned mismatches = 0;
  for (const auto& p : points) {
    if (poly_eval(g, p.alpha, f) != p.value) {
      ++mismatches;
    }
  }
  if (mismatches > e) {
    return std::nullopt;
  }
  return g;
}

std::optional<Poly> errors_and_erasures_decode(const std::vector<EvalPoint>& points,
                                               unsigned deg_bound, const Field& f) {
  std::vector<EvalPoint> kept;
  kept.reserve(points.size());
  for (const auto& p : points) {
    if (!p.erased) {
      kept.push_back(p);
    }
  }
  return berlekamp_welch(kept, deg_bound, f);
}

GmdResult gmd_decode(const std::vector<std::vector<std::uint8_t>>& blocks,
                     const std::vector<std::uint16_t>& alphas, unsigned deg_bound,
                     const InnerCode& inner, const Field& f, std::uint32_t fail_dist) {
  if (blocks.size() != alphas.size()) {
    throw usage_error("one alpha per block");
  }
  const std::size_t np = blocks.size();
  const unsigned bl = inner.block_len();

  std::vector<std::uint16_t> sym(np);
  std::vector<unsigned> dist(np);
  std::vector<std::uint64_t> packed(np);
  for (std::size_t i = 0; i < np; ++i) {
    auto [s, d] = inner.decode(blocks[i]);
    sym[i] = s;
    dist[i] = d;
    std::uint64_t p = 0;
    for (unsigned b = 0; b < bl; ++b) {
      p |= std::uint64_t(blocks[i][b]) << b;
    }
    packed[i] = p;
  }

  if (np < std::size_t(deg_bound) + 1) {
    return {std::nullopt, fail_dist};
  }
  const unsigned s_max = unsigned(np) - deg_bound - 1;

  std::vector<std::size_t> order(np);
  for (std::size_t i = 0; i < np; ++i) {
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
  });

  std::optional<Poly> best;
  std::uint32_t best_dist = UINT32_MAX;
  for (unsigned tau = 0; tau <= s_max; ++tau) {
    std::vector<EvalPoint> pts(np);
    for (std::size_t i = 0; i < np; ++i) {
      pts[i] = EvalPoint{alphas[i], sym[i], false};
    }
    for (unsigned t = 0; t < tau; ++t) {
      pts[order[np - 1 - t]].erased = true;
    }
    auto g = errors_and_erasures_decode(pts, deg_bound, f);
    if (!g) {
      continue;
    }
    std::uint32_t d = 0;
    for (std::size_t i = 0; i < np; ++i) {
      d += unsigned(std::popcount(packed[i] ^ inner.encode_packed(poly_eval(*g, alphas[i], f))));
    }
    if (d < best_dist) {
      best = std::move(g);
      best_dist = d;
    }
    if (best_dist == 0) {
      break;
    }
  }
  if (best) {
    return {std::move(best), best_dist};
  }
  return {std::nullopt, fail_dist};
}

// ---------------------------------------------------------------------------
// Syndrome engine.

namespace {

constexpr unsigned GMD_CAP = 128;  // w <= 7 keeps q - 1 below this

// Overdetermined small system sum_{i=1..e} x_i * a[row][i-1] = rhs[row]；
// returns false if inconsistent. Free variables are set to zero. a is
// row-major rows x (e+1) with the rhs in the last column.
bool solve_small(std::uint16_t* a, unsigned rows, unsigned e, const Field& f,
                 std::uint16_t* out) {
  const unsigned cols = e + 1;
  unsigned row = 0;
  unsigned pivot_col[GMD_CAP];
  unsigned npiv = 0;
  for (unsigned col = 0; col < e && row < rows; ++col) {
    unsigned pr = rows;
    for (unsigned r = row; r < rows; ++r) {
      if (a[r * cols + col] != 0) {
        pr = r;
        break;
      }
    }
    if (pr == rows) {
      continue;
    }
    if (pr != row) {
      for (unsigned c = col; c < cols; ++c) {
        std::swap(a[pr * cols + c], a[row * cols + c]);
      }
    }
    std::uint16_t inv = f.inv(a[row * cols + col]);
    for (unsigned c = col; c < cols; ++c) {
      a[row * cols + c] = f.mul(a[row * cols + c], inv);
    }
    for (unsigned r = 0; r < rows; ++r) {
      if (r == row) {
        continue;
      }
      std::uint16_t factor = a[r * cols + col];
      if (!factor) {
        continue;
      }
      for (unsigned c = col; c < cols; ++c) {
        a[r * cols + c] = f.add(a[r * cols + c], f.mul(factor, a[row * cols + c]));
      }
    }
    pivot_col[npiv++] = col;
    ++row;
  }
  for (unsigned r = row; r < rows; ++r) {
    if (a[r * cols + e] != 0) {
      return false;
    }
  }
  for (unsigned i = 0; i < e; ++i) {
    out[i] = 0;
  }
  for (unsigned p = 0; p < npiv; ++p) {
    out[pivot_col[p]] = a[p * cols + e];
  }
  return true;
}

}  // namespace

bool FullSupportGmd::applicable(const Field& f, unsigned deg_bound) {
  // w <= 7 keeps inner blocks in a u64 and guarantees the multiplication and
  // inverse tables exist; at least one parity symbol is needed.
  return f.w() >= 2 && f.w() <= 7 && deg_bound + 2 <= f.q() - 1;
}

FullSupportGmd::FullSupportGmd(const Field& f, const InnerCode& inner, unsigned deg_bound)
    : f_(f), inner_(inner), deg_bound_(deg_bound) {
  if (!applicable(f, deg_bound)) {
    throw usage_error("syndrome engine needs 2 <= w <= 7 and deg_bound <= q-3");
  }
  n_ = f.q() - 1;
  s_ = n_ - deg_bound - 1;
  pow_.resize(std::size_t(f.q()) * (s_ + 1));
  for (std::uint32_t x = 0; x < f.q(); ++x) {
    std::uint16_t pw = 1;
    for (unsigned j = 0; j <= s_; ++j) {
      pow_[x * (s_ + 1) + j] = pw;
      pw = f.mul(pw, std::uint16_t(x));
    }
  }
}

FullSupportGmd::Verdict FullSupportGmd::decode(const std::uint64_t* blocks,
                                               std::uint32_t fail_dist,
                                               std::uint16_t* corrected_syms) const {
  const unsigned n = n_;
  const unsigned s = s_;
  const std::uint32_t q = f_.q();
  const std::uint16_t* mt = f_.mul_table();
  const std::uint16_t* it = f_.inv_table();
  const std::uint64_t* cw = inner_.codeword_table();
  const unsigned bl = inner_.block_len();
  const unsigned sp = s + 1;  // pow_ row stride
  auto mul = [&](std::uint32_t a, std::uint32_t b) -> std::uint16_t {
    return mt[a * q + b];
  };

  std::uint16_t sym[GMD_CAP];
  std::uint8_t dist[GMD_CAP];
  std::uint32_t dsum = 0;
  for (unsigned i = 0; i < n; ++i) {
    auto [sm, d] = inner_.decode_packed(blocks[i]);
    sym[i] = sm;
    dist[i] = std::uint8_t(d);
    dsum += d;
  }

  std::uint16_t S[GMD_CAP] = {0};  // S[j] = sum_i sym_i * (i+1)^j, j = 1..s
  for (unsigned i = 0; i < n; ++i) {
    if (!sym[i]) {
      continue;
    }
    const std::uint16_t* prow = &pow_[std::size_t(i + 1) * sp];
    const std::uint16_t* mrow = &mt[std::size_t(sym[i]) * q];
    for (unsigned j = 1; j <= s; ++j) {
      S[j] ^= mrow[prow[j]];
    }
  }
  bool clean = true;
  for (unsigned j = 1; j <= s; ++j) {
    if (S[j]) {
      clean = false;
      break;
    }
  }
  if (clean) {
    // The inner-decoded symbols already form a codeword. Every trial of the
    // erasure ladder re-derives this same word (it is within every trial's
    // radius and bounded-distance decoding is unique), so the answer is
    // immediate.
    std::uint16_t h0 = 0;
    for (unsigned i = 0; i < n; ++i) {
      h0 ^= sym[i];
    }
    if (corrected_syms) {
      std::memcpy(corrected_syms, sym, n * sizeof(std::uint16_t));
    }
    return {true, h0, dsum};
  }

  // Reliability order: counting sort ascending by (inner distance, index).
  std::uint8_t ord[GMD_CAP];
  {
    std::uint16_t start[66] = {0};
    for (unsigned i = 0; i < n; ++i) {
      ++start[dist[i] + 1];
    }
    for (unsigned d = 1; d <= bl + 1; ++d) {
      start[d] = std::uint16_t(start[d] + start[d - 1]);
    }
    for (unsigned i = 0; i < n; ++i) {
      ord[start[dist[i]]++] = std::uint8_t(i);
    }
  }

  const std::uint32_t min_concat = (n - deg_bound_) * (bl / 2);

  std::uint16_t Se[GMD_CAP];  // trial syndromes with erased symbols zeroed
  std::memcpy(Se, S, sizeof(Se));
  std::uint16_t G[GMD_CAP] = {1};  // erasure locator, G(z) = prod (1 + X_l z)
  unsigned gdeg = 0;
  bool erased[GMD_CAP] = {false};
  std::uint8_t era_list[GMD_CAP];

  std::uint32_t best_dist = UINT32_MAX;
  std::uint16_t best_h0 = 0;
  std::uint16_t best_syms[GMD_CAP];
  bool found = false;

  // Residual tracking: after a successful trial we know one codeword and how
  // many of the still-unerased positions it disagrees with. While that count
  // fits the next trial's radius, the trial is guaranteed to re-derive the
  // same word and can be skipped outright.
  bool have_cand = false;
  bool diff[GMD_CAP] = {false};
  int resid = 0;

  std::uint16_t T[GMD_CAP];
  std::uint16_t L[GMD_CAP];
  std::uint16_t Psi[GMD_CAP];
  std::uint16_t Om[GMD_CAP];
  std::uint16_t Y[GMD_CAP];
  std::uint8_t locs[GMD_CAP];
  std::uint8_t roots[GMD_CAP];
  std::uint16_t cs[GMD_CAP];
  std::uint16_t A[GMD_CAP * (GMD_CAP / 2 + 2)];

  for (unsigned tau = 0; tau <= s; ++tau) {
    if (tau > 0) {
      const unsigned l = ord[n - tau];
      erased[l] = true;
      era_list[tau - 1] = std::uint8_t(l);
      const std::uint16_t x = std::uint16_t(l + 1);
      if (sym[l]) {
        const std::uint16_t* prow = &pow_[std::size_t(x) * sp];
        const std::uint16_t* mrow = &mt[std::size_t(sym[l]) * q];
        for (unsigned j = 1; j <= s; ++j) {
          Se[j] ^= mrow[prow[j]];
        }
      }
      for (unsigned i = gdeg + 1; i >= 1; --i) {
        G[i] = std::uint16_t(G[i] ^ mul(x, G[i - 1]));
      }
      ++gdeg;
      if (have_cand && diff[l]) {
        --resid;
      }
    }
    // Erasing one more position without shrinking the error radius cannot
    // surface a codeword the previous trial missed, so odd-offset trials
    // only ever repeat their predecessor's answer.
    if (((s - tau) & 1u) != 0) {
      continue;
    }
    const unsigned e_max = (s - tau) >> 1;
    if (have_cand && resid >= 0 && unsigned(resid) <= e_max) {
      continue;  // would re-derive the candidate we already scored
    }

    // Modified syndromes T = G * Se mod z^{s+1}.
    for (unsigned t = 1; t <= s; ++t) {
      std::uint16_t acc = 0;
      const unsigned top = std::min(gdeg, t - 1);
      for (unsigned i = 0; i <= top; ++i) {
        if (G[i]) {
          acc ^= mul(G[i], Se[t - i]);
        }
      }
      T[t] = acc;
    }

    // Smallest error count whose key equation is consistent.
    unsigned e = 0;
    bool solved = false;
    for (e = 0; e <= e_max; ++e) {
      const unsigned rows = s - tau - e;
      if (e == 0) {
        bool all_zero = true;
        for (unsigned j = tau + 1; j <= s; ++j) {
          if (T[j]) {
            all_zero = false;
            break;
          }
        }
        if (all_zero) {
          L[0] = 1;
          solved = true;
          break;
        }
        continue;
      }
      const unsigned cols = e + 1;
      for (unsigned r = 0; r < rows; ++r) {
        const unsigned j = tau + e + 1 + r;
        for (unsigned i = 1; i <= e; ++i) {
          A[r * cols + (i - 1)] = T[j - i];
        }
        A[r * cols + e] = T[j];
      }
      if (solve_small(A, rows, e, f_, &L[1])) {
        L[0] = 1;
        solved = true;
        break;
      }
    }
    if (!solved) {
      continue;
    }

    // Locate errors among unerased positions; demand exactly e simple roots.
    unsigned nr = 0;
    if (e > 0) {
      for (unsigned i = 0; i < n; ++i) {
        if (erased[i]) {
          continue;
        }
        const std::uint16_t z0 = it[i + 1];
        std::uint16_t v = L[e];
        for (unsigned t = e; t-- > 0;) {
          v = std::uint16_t(mul(v, z0) ^ L[t]);
        }
        if (v == 0) {
          roots[nr++] = std::uint8_t(i);
        }
      }
      if (nr != e) {
        continue;
      }
    }

    // Psi = L * G and Omega = Psi * Se mod z^{s+1} (degree <= e + tau <= s).
    const unsigned pe = e + tau;
    for (unsigned i = 0; i <= pe; ++i) {
      Psi[i] = 0;
    }
    for (unsigned a = 0; a <= e; ++a) {
      if (!L[a]) {
        continue;
      }
      for (unsigned b = 0; b <= gdeg; ++b) {
        if (G[b]) {
          Psi[a + b] ^= mul(L[a], G[b]);
        }
      }
    }
    for (unsigned t = 1; t <= pe; ++t) {
      std::uint16_t acc = 0;
      for (unsigned i = 0; i < t; ++i) {
        if (Psi[i]) {
          acc ^= mul(Psi[i], Se[t - i]);
        }
      }
      Om[t] = acc;
    }

    unsigned nl = 0;
    for (unsigned t = 0; t < tau; ++t) {
      locs[nl++] = era_list[t];
    }
    for (unsigned r3 = 0; r3 < nr; ++r3) {
      locs[nl++] = roots[r3];
    }
    bool ok = true;
    for (unsigned c = 0; c < nl; ++c) {
      const unsigned l = locs[c];
      const std::uint16_t x = std::uint16_t(l + 1);
      const std::uint16_t z0 = it[x];
      std::uint16_t num = 0;
      for (unsigned t = pe; t >= 1; --t) {
        num = std::uint16_t(mul(num, z0) ^ Om[t]);
      }
      num = mul(num, z0);
      std::uint16_t den = 0;  // Psi'(z0): odd-degree terms survive in char 2
      std::uint16_t p = 1;
      for (unsigned i = 1; i <= pe; ++i) {
        if ((i & 1u) && Psi[i]) {
          den ^= mul(Psi[i], p);
        }
        p = mul(p, z0);
      }
      if (den == 0) {
        ok = false;
        break;
      }
      const std::uint16_t yv = mul(mul(x, num), it[den]);
      if (!erased[l] && yv == 0) {
        ok = false;
        break;
      }
      Y[c] = yv;
    }
    if (!ok) {
      continue;
    }

    // The corrections must actually cancel the syndromes.
    for (unsigned j = 1; j <= s && ok; ++j) {
      std::uint16_t chk = Se[j];
      for (unsigned c = 0; c < nl; ++c) {
        if (Y[c]) {
          chk ^= mul(Y[c], pow_[std::size_t(locs[c] + 1) * sp + j]);
        }
      }
      if (chk) {
        ok = false;
      }
    }
    if (!ok) {
      continue;
    }

    std::memcpy(cs, sym, n * sizeof(std::uint16_t));
    for (unsigned c = 0; c < nl; ++c) {
      const unsigned l = locs[c];
      cs[l] = erased[l] ? Y[c] : std::uint16_t(sym[l] ^ Y[c]);
    }
    std::uint32_t bd = 0;
    for (unsigned i = 0; i < n; ++i) {
      bd += unsigned(std::popcount(blocks[i] ^ cw[cs[i]]));
    }
    if (bd < best_dist) {
      best_dist = bd;
      best_h0 = 0;
      for (unsigned i = 0; i < n; ++i) {
        best_h0 ^= cs[i];
      }
      std::memcpy(best_syms, cs, n * sizeof(std::uint16_t));
      found = true;
    }
    have_cand = true;
    resid = 0;
    for (unsigned i = 0; i < n; ++i) {
      diff[i] = cs[i] != sym[i];
      if (diff[i] && !erased[i]) {
        ++resid;
      }
    }

    if (found && 2 * best_dist < min_concat) {
      // Any other codeword is at least min_concat - best_dist > best_dist
      // bits away from the received word; the minimum cannot move.
      break;
    }
  }

  if (!found) {
    return {false, 0, fail_dist};
  }
  if (corrected_syms) {
    std::memcpy(corrected_syms, best_syms, n * sizeof(std::uint16_t));
  }
  return {true, best_h0, best_dist};
}

}  // namespace nrstream
