#include "nrstream/galois.hpp"

#include <stdexcept>

namespace nrstream {
namespace {

unsigned poly_degree(std::uint64_t p) {
  unsigned d = 0;
  while (p > 1) {
    p >>= 1;
    ++d;
  }
  return d;
}

// Remainder of GF(2)[x] division, both operands in bit encoding.
std::uint64_t poly_mod(std::uint64_t a, std::uint64_t m) {
  unsigned dm = poly_degree(m);
  while (a >> dm) {
    unsigned da = poly_degree(a);
    a ^= m << (da - dm);
  }
  return a;
}

bool is_irreducible(std::uint32_t poly, unsigned w) {
  if (w == 0 || poly_degree(poly) != w) return false;
  if ((poly & 1) == 0) return false;  // divisible by x
  // Trial division by every polynomial of degree 1..w/2 (exhaustive; w <= 16
  // keeps this at most ~2^9 candidates).
  for (unsigned deg = 1; deg <= w / 2; ++deg) {
    for (std::uint64_t f = (1ull << deg); f < (2ull << deg); ++f) {
      if (poly_mod(poly, f) == 0) return false;
    }
  }
  return true;
}

}  // namespace

FieldSpec FieldSpec::canonical(unsigned w) {
  if (w == 0 || w > 16)
    throw config_error("FieldSpec: w must be in [1, 16], got " + std::to_string(w));
  for (std::uint32_t p = (1u << w) + 1; p < (2u << w); p += 2) {
    if (is_irreducible(p, w)) return FieldSpec{w, p};
  }
  throw config_error("FieldSpec: no irreducible polynomial found (unreachable)");
}

Field::Field(FieldSpec spec) : spec_(spec) {
  if (spec_.w == 0 || spec_.w > 16)
    throw config_error("Field: w must be in [1, 16], got " + std::to_string(spec_.w));
  if (!is_irreducible(spec_.reduction_poly, spec_.w))
    throw config_error("Field: reduction polynomial 0x" +
                       std::to_string(spec_.reduction_poly) +
                       " is not irreducible of degree " + std::to_string(spec_.w));
  if (spec_.w <= 8) {
    std::uint32_t qq = q();
    mul_table_.resize((std::size_t)qq * qq);
    for (std::uint32_t a = 0; a < qq; ++a)
      for (std::uint32_t b = 0; b < qq; ++b)
        mul_table_[(a << spec_.w) | b] = mul_slow((std::uint16_t)a, (std::uint16_t)b);
    inv_table_.assign(qq, 0);
    for (std::uint32_t a = 1; a < qq; ++a) {
      for (std::uint32_t b = 1; b < qq; ++b) {
        if (mul_table_[(a << spec_.w) | b] == 1) {
          inv_table_[a] = (std::uint16_t)b;
          break;
        }
      }
    }
  }
}

std::uint16_t Field::mul_slow(std::uint16_t a, std::uint16_t b) const {
  // Carry-less product, then reduce modulo the spec polynomial.
  std::uint32_t acc = 0;
  std::uint32_t aa = a;
  while (b) {
    if (b & 1) acc ^= aa;
    aa <<= 1;
    b >>= 1;
  }
  unsigned w = spec_.w;
  for (int bit = 2 * (int)w - 2; bit >= (int)w; --bit) {
    if (acc >> bit & 1) acc ^= (std::uint32_t)spec_.reduction_poly << (bit - w);
  }
  return (std::uint16_t)(acc & (q() - 1));
}

std::uint16_t Field::inv(std::uint16_t a) const {
  if (a == 0) throw std::domain_error("gf_inv: zero has no inverse");
  if (!inv_table_.empty()) return inv_table_[a];
  return pow(a, q() - 2);
}

std::uint16_t Field::pow(std::uint16_t a, std::uint64_t e) const {
  std::uint16_t result = 1;
  std::uint16_t base = a;
  while (e) {
    if (e & 1) result = mul(result, base);
    base = mul(base, base);
    e >>= 1;
  }
  return result;
}

std::vector<std::uint16_t> Field::enumerate() const {
  std::vector<std::uint16_t> out(q());
  for (std::uint32_t i = 0; i < q(); ++i) out[i] = (std::uint16_t)i;
  return out;
}

FieldElem Field::elem(std::uint16_t v) const {
  if (v >= q())
    throw usage_error("Field::elem: value " + std::to_string(v) + " not below q");
  return FieldElem{v, this};
}

namespace {
const Field& same_field(FieldElem a, FieldElem b, const char* op) {
  if (!a.field || !b.field)
    throw usage_error(std::string(op) + ": element without a field");
  if (a.field->spec() != b.field->spec())
    throw usage_error(std::string(op) + ": mismatched field specs");
  return *a.field;
}
}  // namespace

FieldElem gf_add(FieldElem a, FieldElem b) {
  const Field& f = same_field(a, b, "gf_add");
  return FieldElem{f.add(a.value, b.value), a.field};
}

FieldElem gf_mul(FieldElem a, FieldElem b) {
  const Field& f = same_field(a, b, "gf_mul");
  return FieldElem{f.mul(a.value, b.value), a.field};
}

FieldElem gf_inv(FieldElem a) {
  if (!a.field) throw usage_error("gf_inv: element without a field");
  return FieldElem{a.field->inv(a.value), a.field};
}

FieldElem gf_pow(FieldElem a, std::uint64_t e) {
  if (!a.field) throw usage_error("gf_pow: element without a field");
  return FieldElem{a.field->pow(a.value, e), a.field};
}

}  // namespace nrstream
