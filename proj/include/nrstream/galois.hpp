#pragma once

#include <cstdint>
#include <vector>

#include "nrstream/errors.hpp"

namespace nrstream {

// Spec of GF(2^w): bit-width plus the degree-w reduction polynomial encoded
// as an integer (bit i = coefficient of x^i, bit w always set). Canonical
// polynomials are the lexicographically smallest irreducibles so codewords
// are bit-exact reproducible; callers may override with any irreducible.
struct FieldSpec {
  unsigned w = 0;
  std::uint32_t reduction_poly = 0;

  static FieldSpec canonical(unsigned w);

  friend bool operator==(const FieldSpec& a, const FieldSpec& b) {
    return a.w == b.w && a.reduction_poly == b.reduction_poly;
  }
  friend bool operator!=(const FieldSpec& a, const FieldSpec& b) { return !(a == b); }
};

class Field;

// A field element tagged with its field, for the checked convenience API.
// Arithmetic-heavy code works on raw values through Field methods instead.
struct FieldElem {
  std::uint16_t value = 0;
  const Field* field = nullptr;

  friend FieldElem operator+(FieldElem a, FieldElem b);
  friend FieldElem operator*(FieldElem a, FieldElem b);
  friend bool operator==(FieldElem a, FieldElem b) { return a.value == b.value; }
};

class Field {
 public:
  // Validates irreducibility of the reduction polynomial (exhaustive factor
  // test; w <= 16 supported). Builds multiplication/inverse tables for small w.
  explicit Field(FieldSpec spec);
  explicit Field(unsigned w) : Field(FieldSpec::canonical(w)) {}

  const FieldSpec& spec() const { return spec_; }
  unsigned w() const { return spec_.w; }
  std::uint32_t q() const { return 1u << spec_.w; }

  std::uint16_t add(std::uint16_t a, std::uint16_t b) const { return a ^ b; }

  std::uint16_t mul(std::uint16_t a, std::uint16_t b) const {
    if (!mul_table_.empty())
      return mul_table_[((std::uint32_t)a << spec_.w) | b];
    return mul_slow(a, b);
  }

  std::uint16_t inv(std::uint16_t a) const;           // a = 0 -> domain error
  std::uint16_t pow(std::uint16_t a, std::uint64_t e) const;

  // Canonical element order 0, 1, ..., q-1 (codeword indexing depends on it).
  std::vector<std::uint16_t> enumerate() const;

  FieldElem elem(std::uint16_t v) const;

  // Raw table access for decode hot paths; null when w > 8.
  const std::uint16_t* mul_table() const {
    return mul_table_.empty() ? nullptr : mul_table_.data();
  }
  const std::uint16_t* inv_table() const {
    return inv_table_.empty() ? nullptr : inv_table_.data();
  }

  // Reference carry-less multiply + reduce; also seeds the tables.
  std::uint16_t mul_slow(std::uint16_t a, std::uint16_t b) const;

 private:
  FieldSpec spec_;
  std::vector<std::uint16_t> mul_table_;  // q*q entries when w <= 8
  std::vector<std::uint16_t> inv_table_;  // q entries when w <= 8 ([0] unused)
};

FieldElem gf_add(FieldElem a, FieldElem b);
FieldElem gf_mul(FieldElem a, FieldElem b);
FieldElem gf_inv(FieldElem a);
FieldElem gf_pow(FieldElem a, std::uint64_t e);

inline FieldElem operator+(FieldElem a, FieldElem b) { return gf_add(a, b); }
inline FieldElem operator*(FieldElem a, FieldElem b) { return gf_mul(a, b); }

}  // namespace nrstream
