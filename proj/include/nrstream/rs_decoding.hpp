#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "nrstream/galois.hpp"
#include "nrstream/inner_code.hpp"

namespace nrstream {

// Univariate polynomials over GF(2^w), coefficients lowest-degree first.
// Canonical form: no trailing zero coefficients (the zero polynomial is an
// empty vector), so equality of vectors is equality of polynomials.
struct Poly {
  std::vector<std::uint16_t> coeffs;

  bool is_zero() const { return coeffs.empty(); }
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  void trim();

  friend bool operator==(const Poly& a, const Poly& b) = default;
};

struct EvalPoint {
  std::uint16_t alpha = 0;
  std::uint16_t value = 0;
  bool erased = false;
};

std::uint16_t poly_eval(const Poly& p, std::uint16_t alpha, const Field& f);

// Unique polynomial of degree <= target_deg through the first target_deg+1
// non-erased points. Duplicate alphas among the points used are a usage
// error, as is running out of non-erased points.
Poly interpolate(const std::vector<EvalPoint>& points, unsigned target_deg, const Field& f);

// Bounded-distance decoding: the polynomial of degree <= deg_bound that
// disagrees with at most floor((n' - deg_bound - 1)/2) of the n' points, or
// nullopt when no polynomial sits that close. Points must have distinct
// alphas and none erased. Reference implementation: solve for an error
// locator E and product polynomial N with E(a_i) v_i = N(a_i), then divide.
std::optional<Poly> berlekamp_welch(const std::vector<EvalPoint>& points,
                                    unsigned deg_bound, const Field& f);

// Same, but erased points are discarded first, shrinking the radius
// accordingly: with tau erasures the decoder corrects e errors whenever
// 2e + tau < n' - deg_bound.
std::optional<Poly> errors_and_erasures_decode(const std::vector<EvalPoint>& points,
                                               unsigned deg_bound, const Field& f);

struct GmdResult {
  std::optional<Poly> poly;
  std::uint32_t total_bit_dist = 0;
};

// Generalized minimum distance decoding of a concatenated word: inner-decode
// every block, then run errors-and-erasures trials erasing the tau least
// reliable blocks for tau = 0, 1, ..., keeping the candidate whose re-encoding
// is nearest to the received bits (first candidate wins ties). Reliability
// order sorts by (inner distance, index) ascending; the tail is erased.
// On failure returns {nullopt, fail_dist}.
GmdResult gmd_decode(const std::vector<std::vector<std::uint8_t>>& blocks,
                     const std::vector<std::uint16_t>& alphas, unsigned deg_bound,
                     const InnerCode& inner, const Field& f,
                     std::uint32_t fail_dist = 0);

// Syndrome-based engine for the one shape the local decoder actually hits:
// evaluation points are all q-1 nonzero field elements (block i sits at
// alpha = i+1). Same bounded-distance function as the generic ladder above,
// decided by a randomized equivalence test, but runs in a few hundred field
// multiplies instead of cubic elimination per trial.
class FullSupportGmd {
 public:
  struct Verdict {
    bool found = false;
    std::uint16_t h0 = 0;         // candidate evaluated at zero
    std::uint32_t bit_dist = 0;   // vs fail_dist when !found
  };

  FullSupportGmd(const Field& f, const InnerCode& inner, unsigned deg_bound);

  static bool applicable(const Field& f, unsigned deg_bound);

  // blocks: q-1 packed inner blocks. corrected_syms (optional, q-1 entries)
  // receives the winning codeword's outer symbols when found.
  Verdict decode(const std::uint64_t* blocks, std::uint32_t fail_dist = 0,
                 std::uint16_t* corrected_syms = nullptr) const;

  unsigned support() const { return n_; }

 private:
  const Field& f_;
  const InnerCode& inner_;
  unsigned deg_bound_;
  unsigned n_;  // q - 1
  unsigned s_;  // syndrome count = n - deg_bound - 1
  std::vector<std::uint16_t> pow_;  // pow_[x * (s_+1) + j] = x^j
};

}  // namespace nrstream
