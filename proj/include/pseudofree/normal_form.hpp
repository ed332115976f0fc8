#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "pseudofree/error.hpp"

namespace pseudofree {

using Integer = mpz_class;
using IntVector = std::vector<Integer>;

/// Dense integer matrix, row-major.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  Integer& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Integer& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  IntMatrix transposed() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  IntVector apply(const IntVector& x) const {
    IntVector y(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c)
        if (sgn((*this)(r, c)) != 0 && sgn(x[c]) != 0) y[r] += (*this)(r, c) * x[c];
    return y;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Integer> data_;
};

namespace detail {

inline bool is_zero(const IntVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Integer& x) { return sgn(x) == 0; });
}

inline std::size_t leading(const IntVector& v) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (sgn(v[i]) != 0) return i;
  return v.size();
}

// row_a <- row_a - q * row_b
inline void axpy(IntVector& a, const Integer& q, const IntVector& b, std::size_t from = 0) {
  if (sgn(q) == 0) return;
  for (std::size_t i = from; i < a.size(); ++i)
    if (sgn(b[i]) != 0) a[i] -= q * b[i];
}

// Replaces (a, b) by a unimodular combination with a[col] = gcd, b[col] = 0.
// Entries before `from` are assumed zero in both rows.
inline void gcd_combine(IntVector& a, IntVector& b, std::size_t col, std::size_t from) {
  Integer g, s, t;
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a[col].get_mpz_t(), b[col].get_mpz_t());
  Integer a_over = a[col] / g, b_over = b[col] / g;
  for (std::size_t i = from; i < a.size(); ++i) {
    if (sgn(a[i]) == 0 && sgn(b[i]) == 0) continue;
    Integer na = s * a[i] + t * b[i];
    Integer nb = a_over * b[i] - b_over * a[i];
    a[i] = std::move(na);
    b[i] = std::move(nb);
  }
}

}  // namespace detail

/// A sublattice of Z^n held in Hermite normal form: rows in echelon order,
/// positive pivots, entries above each pivot reduced into [0, pivot).
class Lattice {
 public:
  explicit Lattice(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t rank() const noexcept { return rows_.size(); }
  const std::vector<IntVector>& basis() const noexcept { return rows_; }

  /// Adds v to the generating set.
  void insert(IntVector v) {
    for (std::size_t i = 0; i < rows_.size() && !detail::is_zero(v); ++i) {
      const std::size_t c = pivots_[i];
      const std::size_t lead = detail::leading(v);
      if (lead < c) {
        insert_row(i, std::move(v));
        return;
      }
      if (lead > c) continue;
      if (sgn(v[c]) != 0 && mpz_divisible_p(v[c].get_mpz_t(), rows_[i][c].get_mpz_t())) {
        detail::axpy(v, v[c] / rows_[i][c], rows_[i], c);
      } else {
        detail::gcd_combine(rows_[i], v, c, c);
        normalize(i);
      }
    }
    if (!detail::is_zero(v)) insert_row(rows_.size(), std::move(v));
  }

  bool contains(IntVector v) const {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const std::size_t c = pivots_[i];
      if (detail::leading(v) < c) return false;
      if (sgn(v[c]) == 0) continue;
      if (!mpz_divisible_p(v[c].get_mpz_t(), rows_[i][c].get_mpz_t())) return false;
      detail::axpy(v, v[c] / rows_[i][c], rows_[i], c);
    }
    return detail::is_zero(v);
  }

 private:
  void insert_row(std::size_t at, IntVector v) {
    rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(at), std::move(v));
    pivots_.insert(pivots_.begin() + static_cast<std::ptrdiff_t>(at), detail::leading(rows_[at]));
    normalize(at);
  }

  // Fix the sign of row i's pivot and reduce the column above it.
  void normalize(std::size_t i) {
    const std::size_t c = pivots_[i];
    if (sgn(rows_[i][c]) < 0)
      for (auto& x : rows_[i]) x = -x;
    for (std::size_t j = 0; j < i; ++j) {
      Integer q;
      mpz_fdiv_q(q.get_mpz_t(), rows_[j][c].get_mpz_t(), rows_[i][c].get_mpz_t());
      detail::axpy(rows_[j], q, rows_[i], c);
    }
  }

  std::size_t dim_;
  std::vector<IntVector> rows_;
  std::vector<std::size_t> pivots_;
};

/// Z-basis of {x : A x = 0}, in Hermite normal form.
inline std::vector<IntVector> kernel_basis(const IntMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  // Rows of [A^T | I]; unimodular row operations keep the right block a
  // basis change, so rows whose left block vanishes span the kernel.
  std::vector<IntVector> rows(n, IntVector(m + n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) rows[j][i] = a(i, j);
    rows[j][m + j] = 1;
  }
  std::size_t top = 0;
  for (std::size_t col = 0; col < m && top < n; ++col) {
    bool found = false;
    for (std::size_t r = top; r < n; ++r) {
      if (sgn(rows[r][col]) == 0) continue;
      if (!found) {
        std::swap(rows[top], rows[r]);
        found = true;
      } else {
        detail::gcd_combine(rows[top], rows[r], col, col);
      }
    }
    if (found) ++top;
  }
  Lattice lat(n);
  for (std::size_t r = top; r < n; ++r) lat.insert(IntVector(rows[r].begin() + static_cast<std::ptrdiff_t>(m), rows[r].end()));
  return lat.basis();
}

/// Nonzero diagonal of the Smith normal form, d1 | d2 | ... (all positive).
/// Its length is the rank.
inline std::vector<Integer> elementary_divisors(IntMatrix a) {
  const std::size_t m = a.rows(), n = a.cols();
  std::vector<Integer> diag;
  std::vector<IntVector> rows(m, IntVector(n));
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) rows[r][c] = std::move(a(r, c));

  // Sparse-friendly elimination: pick the smallest nonzero entry, clear
  // its column with row operations and its row with column operations,
  // repeat until the pivot is isolated.
  std::vector<bool> row_done(m, false), col_done(n, false);
  while (true) {
    std::size_t pr = m, pc = n;
    for (std::size_t r = 0; r < m; ++r) {
      if (row_done[r]) continue;
      for (std::size_t c = 0; c < n; ++c) {
        if (col_done[c] || sgn(rows[r][c]) == 0) continue;
        if (pr == m || mpz_cmpabs(rows[r][c].get_mpz_t(), rows[pr][pc].get_mpz_t()) < 0) {
          pr = r;
          pc = c;
          if (rows[r][c] == 1 || rows[r][c] == -1) break;
        }
      }
      if (pr != m && (rows[pr][pc] == 1 || rows[pr][pc] == -1)) break;
    }
    if (pr == m) break;

    bool isolated = false;
    while (!isolated) {
      isolated = true;
      for (std::size_t r = 0; r < m; ++r) {
        if (r == pr || row_done[r] || sgn(rows[r][pc]) == 0) continue;
        if (mpz_divisible_p(rows[r][pc].get_mpz_t(), rows[pr][pc].get_mpz_t())) {
          Integer q = rows[r][pc] / rows[pr][pc];
          detail::axpy(rows[r], q, rows[pr]);
        } else {
          detail::gcd_combine(rows[pr], rows[r], pc, 0);
          isolated = false;
        }
      }
      for (std::size_t c = 0; c < n; ++c) {
        if (c == pc || col_done[c] || sgn(rows[pr][c]) == 0) continue;
        if (mpz_divisible_p(rows[pr][c].get_mpz_t(), rows[pr][pc].get_mpz_t())) {
          Integer q = rows[pr][c] / rows[pr][pc];
          for (std::size_t r = 0; r < m; ++r)
            if (sgn(rows[r][pc]) != 0) rows[r][c] -= q * rows[r][pc];
        } else {
          // Column gcd step on columns pc and c.
          Integer g, s, t;
          mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), rows[pr][pc].get_mpz_t(), rows[pr][c].get_mpz_t());
          Integer a_over = rows[pr][pc] / g, b_over = rows[pr][c] / g;
          for (std::size_t r = 0; r < m; ++r) {
            if (sgn(rows[r][pc]) == 0 && sgn(rows[r][c]) == 0) continue;
            Integer x = s * rows[r][pc] + t * rows[r][c];
            Integer y = a_over * rows[r][c] - b_over * rows[r][pc];
            rows[r][pc] = std::move(x);
            rows[r][c] = std::move(y);
          }
          isolated = false;
        }
      }
    }
    diag.push_back(abs(rows[pr][pc]));
    row_done[pr] = true;
    col_done[pc] = true;
  }

  // Restore the divisibility chain: (a, b) -> (gcd, lcm).
  for (std::size_t i = 0; i < diag.size(); ++i)
    for (std::size_t j = i + 1; j < diag.size(); ++j) {
      Integer g = gcd(diag[i], diag[j]);
      Integer l = diag[i] / g * diag[j];
      diag[i] = g;
      diag[j] = l;
    }
  return diag;
}

inline std::size_t matrix_rank(const IntMatrix& a) { return elementary_divisors(a).size(); }

/// Sparse matrix as a list of rows of (column, value), columns ascending.
struct SparseMatrix {
  using Entry = std::pair<std::uint32_t, Integer>;
  using Row = std::vector<Entry>;
  std::size_t cols = 0;
  std::vector<Row> rows;
};

namespace detail {

// a <- a - q * b on sorted sparse rows; columns that become nonzero are
// appended to fill.
inline void sparse_axpy(SparseMatrix::Row& a, const Integer& q, const SparseMatrix::Row& b,
                        std::vector<std::uint32_t>* fill = nullptr) {
  SparseMatrix::Row out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(std::move(a[i++]));
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.emplace_back(b[j].first, -q * b[j].second);
      if (fill) fill->push_back(b[j].first);
      ++j;
    } else {
      Integer v = a[i].second - q * b[j].second;
      if (sgn(v) != 0) out.emplace_back(a[i].first, std::move(v));
      ++i;
      ++j;
    }
  }
  a = std::move(out);
}

}  // namespace detail

/// Elementary divisors of a sparse matrix. Unit pivots are eliminated
/// sparsely (fewest-fill first); whatever remains goes through the dense
/// routine.
inline std::vector<Integer> elementary_divisors(SparseMatrix a) {
  const std::size_t m = a.rows.size(), n = a.cols;
  std::vector<std::vector<std::uint32_t>> col_rows(n);
  for (std::size_t r = 0; r < m; ++r)
    for (const auto& [c, v] : a.rows[r]) col_rows[c].push_back(static_cast<std::uint32_t>(r));
  std::vector<bool> row_alive(m, true);
  std::size_t units = 0;
  std::vector<std::uint32_t> fill;

  auto is_unit = [](const Integer& v) { return v == 1 || v == -1; };
  auto eliminate = [&](std::size_t pr) {
    std::uint32_t pc = 0;
    std::size_t pc_count = SIZE_MAX;
    Integer pv;
    for (const auto& [c, v] : a.rows[pr])
      if (is_unit(v) && col_rows[c].size() < pc_count) {
        pc = c;
        pc_count = col_rows[c].size();
        pv = v;
      }
    const SparseMatrix::Row pivot_row = std::move(a.rows[pr]);
    a.rows[pr].clear();
    row_alive[pr] = false;
    ++units;
    const auto touched = std::move(col_rows[pc]);
    col_rows[pc].clear();
    for (std::uint32_t r : touched) {
      if (!row_alive[r]) continue;
      auto& row = a.rows[r];
      auto it = std::lower_bound(row.begin(), row.end(), pc, [](const auto& e, std::uint32_t c) { return e.first < c; });
      if (it == row.end() || it->first != pc) continue;
      Integer q = it->second * pv;  // pv is a unit, so this is value / pivot
      fill.clear();
      detail::sparse_axpy(row, q, pivot_row, &fill);
      for (std::uint32_t c : fill) col_rows[c].push_back(r);
    }
    // Column pc is now zero outside the pivot row, so column operations clear
    // the rest of the pivot row without touching anything else.
  };

  // Passes over the rows, shortest first, pivoting on any unit entry.
  std::vector<std::size_t> order(m);
  bool progress = true;
  while (progress) {
    progress = false;
    order.clear();
    for (std::size_t r = 0; r < m; ++r)
      if (row_alive[r] && !a.rows[r].empty()) order.push_back(r);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a.rows[x].size() < a.rows[y].size(); });
    for (std::size_t r : order) {
      if (!row_alive[r] || a.rows[r].empty()) continue;
      if (std::any_of(a.rows[r].begin(), a.rows[r].end(), [&](const auto& e) { return is_unit(e.second); })) {
        eliminate(r);
        progress = true;
      }
    }
  }

  // Dense remainder on the live rows and the columns they touch.
  std::vector<std::size_t> live;
  std::vector<std::uint32_t> used_cols;
  for (std::size_t r = 0; r < m; ++r)
    if (row_alive[r] && !a.rows[r].empty()) {
      live.push_back(r);
      for (const auto& e : a.rows[r]) used_cols.push_back(e.first);
    }
  std::sort(used_cols.begin(), used_cols.end());
  used_cols.erase(std::unique(used_cols.begin(), used_cols.end()), used_cols.end());
  std::vector<Integer> diag(units, Integer(1));
  if (!live.empty()) {
    IntMatrix rest(live.size(), used_cols.size());
    for (std::size_t i = 0; i < live.size(); ++i)
      for (auto& [c, v] : a.rows[live[i]]) {
        const auto j = static_cast<std::size_t>(std::lower_bound(used_cols.begin(), used_cols.end(), c) - used_cols.begin());
        rest(i, j) = std::move(v);
      }
    for (auto& d : elementary_divisors(std::move(rest))) diag.push_back(std::move(d));
  }
  return diag;
}

/// Z-basis of {x : A x = 0} for sparse A. Unit pivots are eliminated
/// Gauss-Jordan style, so pivot variables are integral functions of the
/// free ones; the non-unit remainder is solved densely.
inline std::vector<IntVector> kernel_basis(const SparseMatrix& a) {
  const std::size_t m = a.rows.size(), n = a.cols;
  std::vector<SparseMatrix::Row> rows = a.rows;
  std::vector<std::vector<std::uint32_t>> col_rows(n);
  for (std::size_t r = 0; r < m; ++r)
    for (const auto& e : rows[r]) col_rows[e.first].push_back(static_cast<std::uint32_t>(r));
  std::vector<bool> is_pivot_row(m, false), is_pivot_col(n, false);
  std::vector<std::pair<std::size_t, std::uint32_t>> pivots;  // (row, column)
  std::vector<std::uint32_t> fill;
  auto is_unit = [](const Integer& v) { return v == 1 || v == -1; };

  bool progress = true;
  std::vector<std::size_t> order;
  while (progress) {
    progress = false;
    order.clear();
    for (std::size_t r = 0; r < m; ++r)
      if (!is_pivot_row[r] && !rows[r].empty()) order.push_back(r);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return rows[x].size() < rows[y].size(); });
    for (std::size_t pr : order) {
      if (rows[pr].empty()) continue;
      std::uint32_t pc = 0;
      std::size_t best = SIZE_MAX;
      Integer pv;
      for (const auto& [c, v] : rows[pr])
        if (is_unit(v) && col_rows[c].size() < best) {
          pc = c;
          best = col_rows[c].size();
          pv = v;
        }
      if (best == SIZE_MAX) continue;
      is_pivot_row[pr] = true;
      is_pivot_col[pc] = true;
      pivots.emplace_back(pr, pc);
      progress = true;
      const SparseMatrix::Row pivot_row = rows[pr];
      std::vector<std::uint32_t> touched = std::move(col_rows[pc]);
      col_rows[pc] = {static_cast<std::uint32_t>(pr)};
      for (std::uint32_t r : touched) {
        if (r == pr) continue;
        auto& row = rows[r];
        auto it = std::lower_bound(row.begin(), row.end(), pc, [](const auto& e, std::uint32_t c) { return e.first < c; });
        if (it == row.end() || it->first != pc) continue;
        Integer q = it->second * pv;
        fill.clear();
        detail::sparse_axpy(row, q, pivot_row, &fill);
        for (std::uint32_t c : fill) col_rows[c].push_back(r);
      }
    }
  }

  // Remainder system on free columns.
  std::vector<std::size_t> rest_rows;
  std::vector<std::uint32_t> rest_cols;
  for (std::size_t r = 0; r < m; ++r)
    if (!is_pivot_row[r] && !rows[r].empty()) {
      rest_rows.push_back(r);
      for (const auto& e : rows[r]) rest_cols.push_back(e.first);
    }
  std::sort(rest_cols.begin(), rest_cols.end());
  rest_cols.erase(std::unique(rest_cols.begin(), rest_cols.end()), rest_cols.end());

  std::vector<IntVector> free_parts;  // values on all columns, pivots still unset
  {
    IntMatrix b(rest_rows.size(), rest_cols.size());
    for (std::size_t i = 0; i < rest_rows.size(); ++i)
      for (const auto& [c, v] : rows[rest_rows[i]]) {
        const auto j = static_cast<std::size_t>(std::lower_bound(rest_cols.begin(), rest_cols.end(), c) - rest_cols.begin());
        b(i, j) = v;
      }
    if (!rest_cols.empty())
      for (const auto& y : kernel_basis(b)) {
        IntVector x(n);
        for (std::size_t j = 0; j < rest_cols.size(); ++j) x[rest_cols[j]] = y[j];
        free_parts.push_back(std::move(x));
      }
    for (std::uint32_t c = 0; c < n; ++c) {
      if (is_pivot_col[c] || std::binary_search(rest_cols.begin(), rest_cols.end(), c)) continue;
      IntVector x(n);
      x[c] = 1;
      free_parts.push_back(std::move(x));
    }
  }
  // Pivot rows mention only their own pivot column and free columns.
  for (auto& x : free_parts)
    for (const auto& [r, c] : pivots) {
      Integer sum = 0, pv = 0;
      for (const auto& [j, v] : rows[r]) {
        if (j == c) pv = v;
        else if (sgn(x[j]) != 0) sum += v * x[j];
      }
      x[c] = -pv * sum;
    }
  return free_parts;
}

}  // namespace pseudofree
