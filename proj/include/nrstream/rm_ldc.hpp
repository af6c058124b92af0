#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "nrstream/bitvec.hpp"
#include "nrstream/galois.hpp"
#include "nrstream/inner_code.hpp"
#include "nrstream/rational.hpp"
#include "nrstream/rng.hpp"
#include "nrstream/rs_decoding.hpp"

namespace nrstream {

// Locally decodable code: systematic multivariate polynomial evaluation code
// (total degree < d over GF(q)^nvars) concatenated with the inner code.
// Message bits live on the first n points of a fixed simplex grid; decoding a
// single bit reads k random degree-2 curves through that grid point.
struct LdcParams {
  std::uint32_t n = 0;      // message bits
  unsigned nvars = 0;
  unsigned d = 0;           // total degree bound (exclusive)
  FieldSpec field_spec{};
  Rational eps_ldc{1, 2};
  unsigned k = 32;          // curves per decoded bit

  std::uint32_t q() const { return std::uint32_t(1) << field_spec.w; }
  unsigned w() const { return field_spec.w; }
  unsigned inner_len() const { return 1u << (field_spec.w - 1); }
  std::uint64_t outer_points() const;          // q^nvars
  std::uint64_t codeword_bits() const;         // q^nvars * inner_len
  std::uint64_t capacity() const;              // C(nvars+d-1, nvars)
};

struct LdcOverrides {
  std::optional<unsigned> d;
  std::optional<unsigned> nvars;
  std::optional<unsigned> w;
  std::optional<unsigned> k;
  bool waive_q_range = false;  // accept q outside [2d/eps, 4d/eps]
};

// Smallest-codeword parameter search: scan degrees, take for each the least
// power-of-two field obeying the q range and curve-decoding minimum, the
// fewest variables with enough grid capacity, and keep the smallest total
// codeword (ties to smaller d, then smaller nvars). Overrides pin individual
// knobs; inconsistent combinations fail validation.
LdcParams ldc_setup(std::uint32_t n, Rational eps_ldc, const LdcOverrides& ov = {});

struct Curve {
  // p(lambda) = v0 + v1*lambda + v2*lambda^2, coordinatewise over GF(q)
  std::vector<std::uint16_t> v0, v1, v2;
};

struct QueryPlan {
  std::vector<Curve> curves;
  std::vector<std::uint64_t> positions;  // sorted distinct codeword bit offsets
};

struct CurveDiag {
  std::int32_t delta = 0;  // penalty contributed by this curve (negative when a
                           // dissenting curve needed more error than the cap)
  bool found = false;      // curve decoding produced a codeword
  std::uint16_t h0 = 0;    // its value at lambda = 0
};

struct DecodeVerdict {
  std::uint8_t bit = 0;
  Rational conf{0};
  std::vector<CurveDiag> curves;
};

class Ldc {
 public:
  explicit Ldc(const LdcParams& params);

  const LdcParams& params() const { return params_; }
  const Field& field() const { return field_; }
  const InnerCode& inner() const { return inner_; }
  std::uint64_t codeword_bits() const { return params_.codeword_bits(); }
  unsigned curve_deg_bound() const { return 2 * params_.d - 2; }
  std::uint32_t dist_cap() const { return dist_cap_; }

  // Grid point carrying message index i (0-based).
  std::vector<std::uint16_t> grid_point(std::uint32_t i) const;

  // Outer encoding: the degree-<d polynomial interpolating x on the grid,
  // evaluated at every point of GF(q)^nvars (lexicographic, leftmost
  // coordinate most significant).
  std::vector<std::uint16_t> rm_encode(const BitVec& x) const;
  BitVec encode(const BitVec& x) const;

  // k curves through grid_point(i) plus every codeword bit they touch.
  QueryPlan plan_queries(std::uint32_t i, Rng& rng) const;
  std::vector<Curve> sample_curves(std::uint32_t i, Rng& rng) const;
  // Same draws, but reuses out's storage (hot path: one set per copy decoded).
  void sample_curves(std::uint32_t i, Rng& rng, std::vector<Curve>& out) const;

  // Decode bit i from collected bits (position -> bit). Missing positions
  // are a usage error. Confidence is exact: 1/4 minus the mean normalized
  // curve penalty, clamped to [0, 1].
  DecodeVerdict decode_with_confidence(std::uint32_t i,
                                       const std::map<std::uint64_t, std::uint8_t>& collected,
                                       const std::vector<Curve>& curves) const;

  // Symbol index of a point (row-major over coordinates).
  std::uint64_t point_index(const std::vector<std::uint16_t>& pt) const;

  // Internal fused form used by the streaming decoders: blocks[c * (q-1) + t]
  // is the packed inner block under curve c at lambda = t+1.
  DecodeVerdict decode_blocks(const std::vector<Curve>& curves,
                              const std::uint64_t* blocks, bool want_diags) const;

  // Evaluation of the interpolating polynomial at one point (test hook).
  std::uint16_t eval_message_poly(const BitVec& x, const std::vector<std::uint16_t>& pt) const;

 private:
  LdcParams params_;
  Field field_;
  InnerCode inner_;
  std::uint32_t dist_cap_;
  std::vector<std::vector<std::uint16_t>> grid_;      // capacity x nvars exponent tuples
  std::vector<std::vector<std::uint16_t>> interp_op_; // capacity x capacity
  std::optional<FullSupportGmd> fast_;
  friend struct LdcTestAccess;

  std::vector<std::uint16_t> coeffs_for(const BitVec& x) const;
};

}  // namespace nrstream
