#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pseudofree/abelian.hpp"
#include "pseudofree/error.hpp"
#include "pseudofree/normal_form.hpp"

namespace pseudofree {

using FormMatrix = std::vector<std::vector<std::int64_t>>;

inline Integer determinant(const FormMatrix& a) {
  // Bareiss fraction-free elimination.
  const std::size_t n = a.size();
  if (n == 0) return 1;
  std::vector<std::vector<Integer>> m(n, std::vector<Integer>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = static_cast<long>(a[i][j]);
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (sgn(m[k][k]) == 0) {
      std::size_t swap = k + 1;
      while (swap < n && sgn(m[swap][k]) == 0) ++swap;
      if (swap == n) return 0;
      std::swap(m[k], m[swap]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

/// A symmetric unimodular integer matrix.
class IntersectionForm {
 public:
  IntersectionForm() = default;

  IntersectionForm(FormMatrix matrix, std::string name = {}) : matrix_(std::move(matrix)), name_(std::move(name)) {
    const std::size_t n = matrix_.size();
    for (const auto& row : matrix_)
      if (row.size() != n) fail(ErrorKind::NotUnimodular, "form matrix is not square");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (matrix_[i][j] != matrix_[j][i]) fail(ErrorKind::NotUnimodular, "form matrix is not symmetric");
    const Integer det = determinant(matrix_);
    if (det != 1 && det != -1) fail(ErrorKind::NotUnimodular, "determinant " + det.get_str() + " is not +-1");
    if (name_.empty()) name_ = "matrix";
  }

  std::size_t rank() const noexcept { return matrix_.size(); }
  const FormMatrix& matrix() const noexcept { return matrix_; }
  const std::string& name() const noexcept { return name_; }

  /// Even type: every diagonal entry is even.
  bool is_even() const {
    for (std::size_t i = 0; i < rank(); ++i)
      if (matrix_[i][i] % 2) return false;
    return true;
  }

  bool operator==(const IntersectionForm& o) const { return matrix_ == o.matrix_; }

 private:
  FormMatrix matrix_;
  std::string name_ = "0";
};

inline IntersectionForm diagonal_form(const std::vector<int>& signs) {
  FormMatrix m(signs.size(), std::vector<std::int64_t>(signs.size(), 0));
  std::string name = "diag:";
  for (std::size_t i = 0; i < signs.size(); ++i) {
    if (signs[i] != 1 && signs[i] != -1) fail(ErrorKind::NotUnimodular, "diagonal entries must be +1 or -1");
    m[i][i] = signs[i];
    name += (i ? "," : "") + std::string(signs[i] > 0 ? "+1" : "-1");
  }
  return IntersectionForm(std::move(m), signs.empty() ? "0" : name);
}

inline IntersectionForm direct_sum(const IntersectionForm& a, const IntersectionForm& b, std::string name = {}) {
  const std::size_t n = a.rank() + b.rank();
  FormMatrix m(n, std::vector<std::int64_t>(n, 0));
  for (std::size_t i = 0; i < a.rank(); ++i)
    for (std::size_t j = 0; j < a.rank(); ++j) m[i][j] = a.matrix()[i][j];
  for (std::size_t i = 0; i < b.rank(); ++i)
    for (std::size_t j = 0; j < b.rank(); ++j) m[a.rank() + i][a.rank() + j] = b.matrix()[i][j];
  if (name.empty()) name = a.name() + "+" + b.name();
  return IntersectionForm(std::move(m), std::move(name));
}

inline IntersectionForm hyperbolic_form(std::size_t copies = 1) {
  FormMatrix m(2 * copies, std::vector<std::int64_t>(2 * copies, 0));
  for (std::size_t k = 0; k < copies; ++k) m[2 * k][2 * k + 1] = m[2 * k + 1][2 * k] = 1;
  return IntersectionForm(std::move(m), copies == 0 ? "0" : copies == 1 ? "H" : "H*" + std::to_string(copies));
}

/// The E8 lattice as its Cartan matrix.
inline IntersectionForm e8_form() {
  FormMatrix m(8, std::vector<std::int64_t>(8, 0));
  for (std::size_t i = 0; i < 8; ++i) m[i][i] = 2;
  // Dynkin diagram: chain 1-3-4-5-6-7-8 with node 2 attached to 4 (1-based).
  const std::pair<int, int> edges[] = {{0, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {1, 3}};
  for (auto [a, b] : edges) m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
      m[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = -1;
  return IntersectionForm(std::move(m), "E8");
}

/// Parses `diag:+1,-1`, `H`, `H*k`, `E8`, `E8*k`, `0`, and sums joined by `+`.
inline IntersectionForm parse_form_name(const std::string& text) {
  auto bad = [&](const std::string& why) -> IntersectionForm {
    fail(ErrorKind::SyntaxError, "form '" + text + "': " + why);
  };
  auto parse_term = [&](std::string term) -> IntersectionForm {
    term.erase(std::remove_if(term.begin(), term.end(), ::isspace), term.end());
    if (term == "0") return diagonal_form({});
    if (term.rfind("diag:", 0) == 0) {
      std::vector<int> signs;
      std::stringstream ss(term.substr(5));
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (item == "+1" || item == "1") signs.push_back(1);
        else if (item == "-1") signs.push_back(-1);
        else return bad("diagonal entries must be +1 or -1");
      }
      if (signs.empty()) return bad("empty diagonal");
      return diagonal_form(signs);
    }
    std::size_t copies = 1;
    std::string base = term;
    if (auto star = term.find('*'); star != std::string::npos) {
      base = term.substr(0, star);
      const std::string count = term.substr(star + 1);
      if (count.empty() || !std::all_of(count.begin(), count.end(), ::isdigit) || count.size() > 3)
        return bad("bad multiplicity");
      copies = std::stoul(count);
      if (copies == 0) return bad("multiplicity must be positive");
    }
    if (base == "H") return hyperbolic_form(copies);
    if (base == "E8") {
      IntersectionForm f = e8_form();
      for (std::size_t i = 1; i < copies; ++i) f = direct_sum(f, e8_form());
      if (copies > 1) f = IntersectionForm(f.matrix(), "E8*" + std::to_string(copies));
      return f;
    }
    return bad("unknown form '" + term + "'");
  };
  std::vector<std::string> terms;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, '+')) terms.push_back(item);
  // `diag:+1,...` uses '+' inside its entries; rejoin pieces that follow a comma or colon.
  std::vector<std::string> merged;
  for (const auto& t : terms) {
    if (!merged.empty() && (merged.back().empty() || merged.back().back() == ',' || merged.back().back() == ':'))
      merged.back() += "+" + t;
    else
      merged.push_back(t);
  }
  if (merged.empty()) return bad("empty");
  IntersectionForm out = parse_term(merged[0]);
  for (std::size_t i = 1; i < merged.size(); ++i) out = direct_sum(out, parse_term(merged[i]));
  if (merged.size() > 1) out = IntersectionForm(out.matrix(), text);
  return out;
}

/// Reduction of a unimodular form to F_p.
struct FormModP {
  std::uint64_t p = 2;
  std::vector<std::vector<std::uint64_t>> matrix;

  std::size_t rank() const noexcept { return matrix.size(); }

  std::uint64_t dot(const std::vector<std::uint64_t>& u, const std::vector<std::uint64_t>& v) const {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < rank(); ++i) {
      if (!u[i]) continue;
      for (std::size_t j = 0; j < rank(); ++j)
        if (v[j]) s = (s + u[i] * matrix[i][j] % p * v[j]) % p;
    }
    return s;
  }
};

namespace detail {

inline std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t p) { return pow_mod(a, p - 2, p); }

// Rank over F_p by elimination.
inline std::size_t rank_mod(std::vector<std::vector<std::uint64_t>> m, std::uint64_t p) {
  std::size_t rank = 0;
  const std::size_t cols = m.empty() ? 0 : m[0].size();
  for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < m.size() && m[pivot][c] == 0) ++pivot;
    if (pivot == m.size()) continue;
    std::swap(m[rank], m[pivot]);
    const std::uint64_t inv = inverse_mod(m[rank][c], p);
    for (auto& x : m[rank]) x = x * inv % p;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == rank || m[r][c] == 0) continue;
      const std::uint64_t f = m[r][c];
      for (std::size_t j = 0; j < cols; ++j) m[r][j] = (m[r][j] + (p - f) * m[rank][j]) % p;
    }
    ++rank;
  }
  return rank;
}

inline std::vector<std::uint64_t> vector_at(std::uint64_t index, std::uint64_t p, std::size_t n) {
  std::vector<std::uint64_t> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = index % p;
    index /= p;
  }
  return v;
}

inline bool independent(const std::vector<std::uint64_t>& u, const std::vector<std::uint64_t>& v, std::uint64_t p) {
  return rank_mod({u, v}, p) == 2;
}

inline std::uint64_t checked_power(std::uint64_t p, std::size_t n, std::uint64_t cap) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > cap / p) return cap + 1;
    total *= p;
  }
  return total;
}

}  // namespace detail

inline FormModP reduce_mod_p(const IntersectionForm& form, std::uint64_t p) {
  if (!is_prime(p) || p >= (1ull << 31)) fail(ErrorKind::InvalidParameters, std::to_string(p) + " is not a usable prime");
  FormModP fm;
  fm.p = p;
  const auto n = static_cast<std::int64_t>(p);
  for (const auto& row : form.matrix()) {
    std::vector<std::uint64_t> r;
    for (std::int64_t x : row) r.push_back(static_cast<std::uint64_t>(((x % n) + n) % n));
    fm.matrix.push_back(std::move(r));
  }
  if (detail::rank_mod(fm.matrix, p) != fm.rank())
    fail(ErrorKind::NotUnimodular, "form is degenerate mod " + std::to_string(p));
  return fm;
}

enum class CollapseOutcome { Guaranteed, NotGuaranteed };

/// Why a verdict holds. The first three justify Guaranteed.
enum class CollapseReason {
  PrimeAbove3,        // p not in {2, 3}
  ProductArgument,    // no vector needs a partner
  PartnerVector,      // every vector that needs a partner has one
  NoPartner,          // p = 3: u.u != 0 and no independent v with u.v = 0
  SelfPerpendicular,  // p = 2: u.u = 0 and u-perp = <u>
  ZeroRank,           // p = 2 with H^2 = 0: the d5 step has nothing to generate H^4
};

inline const char* to_string(CollapseOutcome o) {
  return o == CollapseOutcome::Guaranteed ? "Guaranteed" : "NotGuaranteed";
}

inline const char* to_string(CollapseReason r) {
  switch (r) {
    case CollapseReason::PrimeAbove3: return "p-not-2-or-3";
    case CollapseReason::ProductArgument: return "product-argument";
    case CollapseReason::PartnerVector: return "partner-vector";
    case CollapseReason::NoPartner: return "no-partner";
    case CollapseReason::SelfPerpendicular: return "self-perpendicular";
    case CollapseReason::ZeroRank: return "zero-rank";
  }
  return "?";
}

struct CollapseVerdict {
  CollapseOutcome outcome = CollapseOutcome::Guaranteed;
  CollapseReason reason = CollapseReason::PrimeAbove3;
  std::uint64_t p = 2;
  std::size_t rank = 0;
  std::optional<std::vector<std::uint64_t>> witness;  // NotGuaranteed: the failing u
  std::uint64_t vectors_checked = 0;

  bool guaranteed() const noexcept { return outcome == CollapseOutcome::Guaranteed; }
  bool operator==(const CollapseVerdict&) const = default;
};

inline constexpr std::uint64_t kDefaultSearchCap = 10'000'000;

/// Some v independent of u with u.v = 0, found from a basis of u-perp.
inline std::optional<std::vector<std::uint64_t>> find_partner(const FormModP& fm, const std::vector<std::uint64_t>& u) {
  const std::uint64_t p = fm.p;
  const std::size_t n = fm.rank();
  // u-perp is the kernel of the row uA.
  std::vector<std::uint64_t> row(n, 0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) row[j] = (row[j] + u[i] * fm.matrix[i][j]) % p;
  std::size_t lead = 0;
  while (lead < n && row[lead] == 0) ++lead;
  std::vector<std::vector<std::uint64_t>> basis;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == lead) continue;
    std::vector<std::uint64_t> v(n, 0);
    v[j] = 1;
    if (lead < n) v[lead] = (p - row[j] % p) * detail::inverse_mod(row[lead], p) % p;
    basis.push_back(std::move(v));
  }
  for (const auto& v : basis)
    if (detail::independent(u, v, p)) return v;
  return std::nullopt;
}

/// Decides whether the mod-p case analysis closes for this form.
inline CollapseVerdict collapse_guaranteed(const FormModP& fm, std::uint64_t search_cap = kDefaultSearchCap) {
  CollapseVerdict v;
  v.p = fm.p;
  v.rank = fm.rank();
  if (fm.p != 2 && fm.p != 3) {
    v.reason = CollapseReason::PrimeAbove3;
    return v;
  }
  if (fm.p == 2 && fm.rank() == 0) {
    v.outcome = CollapseOutcome::NotGuaranteed;
    v.reason = CollapseReason::ZeroRank;
    return v;
  }
  const std::uint64_t total = detail::checked_power(fm.p, fm.rank(), search_cap);
  if (total > search_cap)
    fail(ErrorKind::SearchBound, "search space " + std::to_string(fm.p) + "^" + std::to_string(fm.rank()) +
                                     " exceeds cap " + std::to_string(search_cap));
  bool needed_partner = false;
  for (std::uint64_t index = 1; index < total; ++index) {
    const auto u = detail::vector_at(index, fm.p, fm.rank());
    ++v.vectors_checked;
    const bool square_zero = fm.dot(u, u) == 0;
    // p = 3 needs a partner when u.u != 0; p = 2 when u.u = 0.
    if ((fm.p == 3) == square_zero) continue;
    needed_partner = true;
    if (!find_partner(fm, u)) {
      v.outcome = CollapseOutcome::NotGuaranteed;
      v.reason = fm.p == 3 ? CollapseReason::NoPartner : CollapseReason::SelfPerpendicular;
      v.witness = u;
      return v;
    }
  }
  v.reason = needed_partner ? CollapseReason::PartnerVector : CollapseReason::ProductArgument;
  return v;
}

/// Re-checks a verdict by direct evaluation: a witness must need a partner
/// and have none among all p^rank vectors; a guarantee is recomputed.
inline bool verify_collapse(const FormModP& fm, const CollapseVerdict& v) {
  if (v.p != fm.p || v.rank != fm.rank()) return false;
  if (v.guaranteed()) {
    if (v.reason == CollapseReason::PrimeAbove3) return fm.p != 2 && fm.p != 3;
    return collapse_guaranteed(fm) == v;
  }
  if (v.reason == CollapseReason::ZeroRank) return fm.p == 2 && fm.rank() == 0;
  if (!v.witness || v.witness->size() != fm.rank()) return false;
  const auto& u = *v.witness;
  if (std::all_of(u.begin(), u.end(), [](std::uint64_t x) { return x == 0; })) return false;
  const bool square_zero = fm.dot(u, u) == 0;
  if (v.reason == CollapseReason::NoPartner && (fm.p != 3 || square_zero)) return false;
  if (v.reason == CollapseReason::SelfPerpendicular && (fm.p != 2 || !square_zero)) return false;
  const std::uint64_t total = detail::checked_power(fm.p, fm.rank(), kDefaultSearchCap);
  for (std::uint64_t index = 1; index < total; ++index) {
    const auto w = detail::vector_at(index, fm.p, fm.rank());
    if (fm.dot(u, w) == 0 && detail::independent(u, w, fm.p)) return false;
  }
  return true;
}

/// Fixed-point count for a rank-2 elementary abelian p-group when the
/// collapse argument closes: b2 + 2 isolated points; absent otherwise.
inline std::optional<std::uint64_t> elemabel_fixed_points(std::uint64_t p, const IntersectionForm& form,
                                                           std::uint64_t b2,
                                                           std::uint64_t search_cap = kDefaultSearchCap) {
  if (b2 != form.rank())
    fail(ErrorKind::InvalidParameters, "b2 = " + std::to_string(b2) + " differs from the form rank " +
                                           std::to_string(form.rank()));
  if (!collapse_guaranteed(reduce_mod_p(form, p), search_cap).guaranteed()) return std::nullopt;
  return b2 + 2;
}

/// Shipped forms: Diag(+-1) mixtures and H-sums up to rank 6, E8, E8+H, and rank 0.
inline std::vector<IntersectionForm> form_catalog() {
  std::vector<IntersectionForm> out{diagonal_form({})};
  for (std::size_t rank = 1; rank <= 6; ++rank)
    for (std::size_t minus = 0; minus <= rank; ++minus) {
      std::vector<int> signs(rank, 1);
      for (std::size_t i = rank - minus; i < rank; ++i) signs[i] = -1;
      out.push_back(diagonal_form(signs));
    }
  for (std::size_t k = 1; k <= 3; ++k) out.push_back(hyperbolic_form(k));
  out.push_back(e8_form());
  out.push_back(direct_sum(e8_form(), hyperbolic_form(1), "E8+H"));
  return out;
}

}  // namespace pseudofree
