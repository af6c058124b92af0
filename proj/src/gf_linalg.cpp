#include "nrstream/gf_linalg.hpp"

#include "nrstream/errors.hpp"

namespace nrstream {

namespace {

// Reduce to row echelon form in place; returns, per column, the pivot row
// (or SIZE_MAX for free columns).
std::vector<std::size_t> echelon(const Field& f, GfMatrix& m) {
  std::vector<std::size_t> pivot_row(m.cols, SIZE_MAX);
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols && row < m.rows; ++col) {
    std::size_t pr = SIZE_MAX;
    for (std::size_t r = row; r < m.rows; ++r) {
      if (m.at(r, col) != 0) {
        pr = r;
        break;
      }
    }
    if (pr == SIZE_MAX) {
      continue;
    }
    if (pr != row) {
      for (std::size_t c = 0; c < m.cols; ++c) {
        std::swap(m.a[pr * m.cols + c], m.a[row * m.cols + c]);
      }
    }
    std::uint16_t inv = f.inv(m.at(row, col));
    for (std::size_t c = col; c < m.cols; ++c) {
      m.at(row, c) = f.mul(m.at(row, c), inv);
    }
    for (std::size_t r = 0; r < m.rows; ++r) {
      if (r == row) {
        continue;
      }
      std::uint16_t factor = m.at(r, col);
      if (factor == 0) {
        continue;
      }
      for (std::size_t c = col; c < m.cols; ++c) {
        m.at(r, c) = f.add(m.at(r, c), f.mul(factor, m.at(row, c)));
      }
    }
    pivot_row[col] = row;
    ++row;
  }
  return pivot_row;
}

}  // namespace

std::optional<std::vector<std::uint16_t>> gf_kernel_vector(const Field& f, GfMatrix m) {
  std::vector<std::size_t> pivot_row = echelon(f, m);
  std::size_t free_col = SIZE_MAX;
  for (std::size_t c = 0; c < m.cols; ++c) {
    if (pivot_row[c] == SIZE_MAX) {
      free_col = c;
      break;
    }
  }
  if (free_col == SIZE_MAX) {
    return std::nullopt;
  }
  // Set the free variable to 1, back-substitute pivots (rows are reduced, so
  // each pivot variable equals the negated sum of its free-column entries).
  std::vector<std::uint16_t> v(m.cols, 0);
  v[free_col] = 1;
  for (std::size_t c = 0; c < m.cols; ++c) {
    if (pivot_row[c] != SIZE_MAX) {
      v[c] = m.at(pivot_row[c], free_col);  // char 2: negation is identity
    }
  }
  return v;
}

std::optional<std::vector<std::uint16_t>> gf_solve(const Field& f, GfMatrix m,
                                                   std::vector<std::uint16_t> b) {
  if (m.rows != m.cols || b.size() != m.rows) {
    throw usage_error("gf_solve wants a square system");
  }
  GfMatrix aug(m.rows, m.cols + 1);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      aug.at(r, c) = m.at(r, c);
    }
    aug.at(r, m.cols) = b[r];
  }
  std::vector<std::size_t> pivot_row = echelon(f, aug);
  for (std::size_t c = 0; c < m.cols; ++c) {
    if (pivot_row[c] == SIZE_MAX) {
      return std::nullopt;
    }
  }
  std::vector<std::uint16_t> x(m.cols);
  for (std::size_t c = 0; c < m.cols; ++c) {
    x[c] = aug.at(pivot_row[c], m.cols);
  }
  return x;
}

std::optional<GfMatrix> gf_invert(const Field& f, GfMatrix m) {
  if (m.rows != m.cols) {
    throw usage_error("gf_invert wants a square matrix");
  }
  std::size_t n = m.rows;
  GfMatrix aug(n, 2 * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      aug.at(r, c) = m.at(r, c);
    }
    aug.at(r, n + r) = 1;
  }
  std::vector<std::size_t> pivot_row = echelon(f, aug);
  for (std::size_t c = 0; c < n; ++c) {
    if (pivot_row[c] != c) {  // echelon on a full-rank left block pivots in order
      return std::nullopt;
    }
  }
  GfMatrix out(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      out.at(r, c) = aug.at(r, n + c);
    }
  }
  return out;
}

}  // namespace nrstream
