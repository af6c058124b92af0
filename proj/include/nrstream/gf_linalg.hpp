#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nrstream/galois.hpp"

namespace nrstream {

// Dense matrix over GF(2^w), row-major. Small systems only (setup-time
// interpolation operators and the reference decoder); nothing here is on the
// per-bit hot path.
struct GfMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint16_t> a;

  GfMatrix() = default;
  GfMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0) {}
  std::uint16_t& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
  std::uint16_t at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

// Any nonzero kernel vector of M (M x v = 0), or nullopt if the kernel is
// trivial. Gaussian elimination with partial pivoting by column order.
std::optional<std::vector<std::uint16_t>> gf_kernel_vector(const Field& f, GfMatrix m);

// Unique solution of the square system M x = b; nullopt if singular.
std::optional<std::vector<std::uint16_t>> gf_solve(const Field& f, GfMatrix m,
                                                   std::vector<std::uint16_t> b);

// Inverse of a square matrix; nullopt if singular.
std::optional<GfMatrix> gf_invert(const Field& f, GfMatrix m);

}  // namespace nrstream
