#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "pseudofree/abelian.hpp"
#include "pseudofree/cohomology.hpp"
#include "pseudofree/error.hpp"
#include "pseudofree/group.hpp"
#include "pseudofree/lattice.hpp"
#include "pseudofree/normal_form.hpp"

namespace pseudofree {

/// A permutation module: basis {0..rank-1} and, for each group element g,
/// the permutation of the basis it induces.
struct ModuleAction {
  std::size_t rank = 0;
  std::vector<std::vector<std::uint32_t>> act;  // act[g][b] = g.b
};

inline ModuleAction module_action(const PermGroup& g, const CoefficientModule& coeff) {
  const std::size_t n = g.order();
  ModuleAction m;
  m.act.resize(n);
  switch (coeff.kind) {
    case CoefficientKind::TrivialZ:
      m.rank = 1;
      for (auto& a : m.act) a = {0};
      break;
    case CoefficientKind::GroupRing:
      m.rank = n;
      for (std::size_t x = 0; x < n; ++x) {
        m.act[x].resize(n);
        for (std::size_t b = 0; b < n; ++b) m.act[x][b] = static_cast<std::uint32_t>(g.mul(x, b));
      }
      break;
    case CoefficientKind::Permutation: {
      if (!coeff.subgroup || coeff.subgroup->universe() != n)
        fail(ErrorKind::InvalidCoefficients, "permutation module subgroup does not belong to G");
      const auto h = coeff.subgroup->indices();
      if (h.empty() || h[0] != 0 || g.closure(h) != *coeff.subgroup)
        fail(ErrorKind::InvalidCoefficients, "permutation module set is not a subgroup of G");
      // Label each left coset xH by its position among distinct cosets.
      std::vector<std::uint32_t> coset(n, UINT32_MAX);
      std::uint32_t count = 0;
      for (std::size_t x = 0; x < n; ++x) {
        if (coset[x] != UINT32_MAX) continue;
        for (std::size_t y : h) coset[g.mul(x, y)] = count;
        ++count;
      }
      std::vector<std::size_t> rep(count);
      for (std::size_t x = n; x-- > 0;) rep[coset[x]] = x;
      m.rank = count;
      for (std::size_t x = 0; x < n; ++x) {
        m.act[x].resize(count);
        for (std::uint32_t b = 0; b < count; ++b) m.act[x][b] = coset[g.mul(x, rep[b])];
      }
      break;
    }
  }
  return m;
}

namespace detail {

// H^k from the ranks and elementary divisors of the coboundaries around it.
inline AbelianGroup cohomology_from(std::size_t cochain_rank, const std::vector<Integer>& incoming,
                                    std::size_t outgoing_rank) {
  std::vector<std::uint64_t> torsion;
  for (const auto& d : incoming)
    if (d != 1) {
      if (!d.fits_ulong_p()) fail(ErrorKind::ResourceBound, "torsion coefficient exceeds 64 bits");
      torsion.push_back(d.get_ui());
    }
  const std::size_t free_rank = cochain_rank - outgoing_rank - incoming.size();
  return AbelianGroup::from_cyclic(torsion, static_cast<int>(free_rank));
}

}  // namespace detail

/// Cochain counts the normalized bar complex needs through degree_max + 1.
inline double bar_cost(std::size_t order, std::size_t module_rank, int degree_max) {
  return std::pow(static_cast<double>(order > 1 ? order - 1 : 1), degree_max + 1) * static_cast<double>(module_rank);
}

/// H^0..H^degree_max from the normalized bar resolution:
/// cochains are functions on (G \ 1)^k with values in M.
inline CohomologyTable bar_cohomology(const PermGroup& g, const CoefficientModule& coeff, int degree_max,
                                      double cost_bound) {
  detail::check_degree(degree_max);
  const ModuleAction mod = module_action(g, coeff);
  const std::size_t n = g.order(), d = mod.rank, e = n - 1;
  if (bar_cost(n, d, degree_max) > cost_bound)
    fail(ErrorKind::ResourceBound, "bar complex for |G|=" + std::to_string(n) + " to degree " +
                                       std::to_string(degree_max) + " exceeds the configured bound");

  auto dim = [&](int k) {
    std::size_t v = d;
    for (int i = 0; i < k; ++i) v *= e;
    return v;
  };
  // Tuples of non-identity elements are encoded base e with digit x-1.
  auto coboundary = [&](int k) {
    SparseMatrix m;
    m.cols = dim(k);
    const std::size_t tuples = dim(k + 1) / d;
    m.rows.resize(dim(k + 1));
    std::vector<std::size_t> args(static_cast<std::size_t>(k) + 1);
    std::map<std::size_t, Integer> acc;
    for (std::size_t t = 0; t < tuples; ++t) {
      std::size_t rest = t;
      for (int i = k; i >= 0; --i) {
        args[static_cast<std::size_t>(i)] = rest % e + 1;
        rest /= e;
      }
      auto encode = [&](const std::vector<std::size_t>& xs) {
        std::size_t code = 0;
        for (std::size_t x : xs) code = code * e + (x - 1);
        return code;
      };
      for (std::size_t b = 0; b < d; ++b) {
        acc.clear();
        // g1 . f(g2..g_{k+1}) evaluated at basis b picks f(...)(g1^-1 . b).
        {
          std::vector<std::size_t> tail(args.begin() + 1, args.end());
          acc[encode(tail) * d + mod.act[g.inv(args[0])][b]] += 1;
        }
        for (int i = 1; i <= k; ++i) {
          const std::size_t prod = g.mul(args[static_cast<std::size_t>(i) - 1], args[static_cast<std::size_t>(i)]);
          if (prod == 0) continue;
          std::vector<std::size_t> merged;
          for (int j = 0; j <= k; ++j) {
            if (j == i) continue;
            merged.push_back(j == i - 1 ? prod : args[static_cast<std::size_t>(j)]);
          }
          acc[encode(merged) * d + b] += (i % 2 ? -1 : 1);
        }
        {
          std::vector<std::size_t> head(args.begin(), args.end() - 1);
          acc[encode(head) * d + b] += ((k + 1) % 2 ? -1 : 1);
        }
        auto& row = m.rows[t * d + b];
        for (auto& [c, v] : acc)
          if (sgn(v) != 0) row.emplace_back(static_cast<std::uint32_t>(c), std::move(v));
      }
    }
    return m;
  };

  CohomologyTable out;
  out.period = std::nullopt;
  std::vector<Integer> incoming;  // divisors of delta^{k-1}
  for (int k = 0; k <= degree_max; ++k) {
    std::vector<Integer> outgoing = elementary_divisors(coboundary(k));
    out.entries.push_back(detail::cohomology_from(dim(k), incoming, outgoing.size()));
    incoming = std::move(outgoing);
  }
  out.group = g.label();
  out.coefficients = coeff.to_string();
  return out;
}

namespace detail {

// Row echelon span over F_p, p = 2^31 - 1; used to rank candidate
// generators by how much rational rank they add.
class ModpSpan {
 public:
  static constexpr std::uint64_t kPrime = 2147483647;

  explicit ModpSpan(std::size_t dim) : dim_(dim) {}
  std::size_t rank() const noexcept { return rows_.size(); }

  bool insert(const IntVector& v) {
    auto w = reduce(v);
    std::size_t lead = 0;
    while (lead < dim_ && w[lead] == 0) ++lead;
    if (lead == dim_) return false;
    const std::uint64_t inv = inverse(w[lead]);
    for (auto& x : w) x = x * inv % kPrime;
    rows_.push_back(std::move(w));
    leads_.push_back(lead);
    return true;
  }

  bool contains(const IntVector& v) const {
    auto w = reduce(v);
    return std::all_of(w.begin(), w.end(), [](std::uint64_t x) { return x == 0; });
  }

 private:
  std::vector<std::uint64_t> reduce(const IntVector& v) const {
    std::vector<std::uint64_t> w(dim_);
    for (std::size_t i = 0; i < dim_; ++i) w[i] = mpz_fdiv_ui(v[i].get_mpz_t(), kPrime);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const std::uint64_t f = w[leads_[r]];
      if (f == 0) continue;
      for (std::size_t i = leads_[r]; i < dim_; ++i)
        if (rows_[r][i]) w[i] = (w[i] + (kPrime - f) * rows_[r][i]) % kPrime;
    }
    return w;
  }

  static std::uint64_t inverse(std::uint64_t a) {
    std::uint64_t result = 1, e = kPrime - 2;
    while (e) {
      if (e & 1) result = result * a % kPrime;
      a = a * a % kPrime;
      e >>= 1;
    }
    return result;
  }

  std::size_t dim_;
  std::vector<std::vector<std::uint64_t>> rows_;
  std::vector<std::size_t> leads_;
};

}  // namespace detail

/// A free ZG-resolution F_k = ZG^{r_k} built from integer kernels: each
/// boundary sends the k-th generators to a ZG-generating set of ker d_{k-1}.
class FreeResolution {
 public:
  FreeResolution(PermGroup g, int length, std::size_t rank_bound) : g_(std::move(g)) {
    const std::size_t n = g_.order();
    ranks_.push_back(1);
    boundaries_.emplace_back();  // F_0 maps onto Z by augmentation
    for (int k = 1; k <= length; ++k) {
      if (n * ranks_.back() > rank_bound)
        fail(ErrorKind::ResourceBound, "free resolution rank " + std::to_string(ranks_.back()) + " at degree " +
                                           std::to_string(k - 1) + " exceeds the configured bound");
      auto kernel = kernel_basis(k == 1 ? augmentation() : z_matrix(k - 1));
      std::stable_sort(kernel.begin(), kernel.end(),
                       [](const IntVector& x, const IntVector& y) { return weight(x) < weight(y); });
      auto gens = choose_generators(kernel, ranks_.back());
      ranks_.push_back(gens.size());
      boundaries_.push_back(std::move(gens));
    }
  }

  const PermGroup& group() const noexcept { return g_; }
  int length() const noexcept { return static_cast<int>(ranks_.size()) - 1; }
  std::size_t rank(int k) const { return ranks_[static_cast<std::size_t>(k)]; }

  /// Image of the j-th generator of F_k in F_{k-1}; coordinate (i, h) at i*|G| + h.
  const IntVector& boundary(int k, std::size_t j) const { return boundaries_[static_cast<std::size_t>(k)][j]; }

  /// d_k as a Z-matrix from F_k to F_{k-1}.
  SparseMatrix z_matrix(int k) const {
    const std::size_t n = g_.order(), src = rank(k), dst = rank(k - 1);
    SparseMatrix m;
    m.cols = n * src;
    m.rows.resize(n * dst);
    for (std::size_t j = 0; j < src; ++j)
      for (std::size_t x = 0; x < n; ++x) {
        const IntVector image = translate(x, boundary(k, j), dst);
        for (std::size_t r = 0; r < image.size(); ++r)
          if (sgn(image[r]) != 0) m.rows[r].emplace_back(static_cast<std::uint32_t>(j * n + x), image[r]);
      }
    return m;
  }

  /// g . v for v in F_k with the given rank.
  IntVector translate(std::size_t x, const IntVector& v, std::size_t rank) const {
    const std::size_t n = g_.order();
    IntVector out(v.size());
    for (std::size_t i = 0; i < rank; ++i)
      for (std::size_t h = 0; h < n; ++h)
        if (sgn(v[i * n + h]) != 0) out[i * n + g_.mul(x, h)] = v[i * n + h];
    return out;
  }

 private:
  SparseMatrix augmentation() const {
    SparseMatrix m;
    m.cols = g_.order();
    m.rows.resize(1);
    for (std::size_t x = 0; x < g_.order(); ++x) m.rows[0].emplace_back(static_cast<std::uint32_t>(x), 1);
    return m;
  }

  Lattice span_of(const std::vector<IntVector>& gens, std::size_t rank) const {
    Lattice span(g_.order() * rank);
    for (const auto& v : gens)
      for (std::size_t x = 0; x < g_.order(); ++x) span.insert(translate(x, v, rank));
    return span;
  }

  // A small ZG-generating set of the kernel: grow the rational rank greedily,
  // saturate over Z, then drop generators the others already produce.
  std::vector<IntVector> choose_generators(const std::vector<IntVector>& kernel, std::size_t rank) const {
    const std::size_t n = g_.order(), dim = n * rank;
    std::vector<IntVector> gens;
    detail::ModpSpan rational(dim);
    for (const auto& v : kernel) {
      if (rational.rank() == kernel.size()) break;
      if (rational.contains(v)) continue;
      gens.push_back(v);
      for (std::size_t x = 0; x < n; ++x) rational.insert(translate(x, v, rank));
    }
    Lattice span = span_of(gens, rank);
    for (const auto& v : kernel) {
      if (span.contains(v)) continue;
      gens.push_back(v);
      for (std::size_t x = 0; x < n; ++x) span.insert(translate(x, v, rank));
    }
    auto generates = [&](const std::vector<IntVector>& candidate) {
      Lattice l = span_of(candidate, rank);
      return std::all_of(kernel.begin(), kernel.end(), [&](const IntVector& v) { return l.contains(v); });
    };
    if (!generates(gens)) fail(ErrorKind::InternalContradiction, "resolution generators miss part of the kernel");
    for (std::size_t i = gens.size(); i-- > 0;) {
      if (gens.size() == 1) break;
      std::vector<IntVector> without = gens;
      without.erase(without.begin() + static_cast<std::ptrdiff_t>(i));
      if (generates(without)) gens = std::move(without);
    }
    return gens;
  }

  static std::pair<std::size_t, Integer> weight(const IntVector& v) {
    std::size_t support = 0;
    Integer size = 0;
    for (const auto& x : v)
      if (sgn(x) != 0) {
        ++support;
        size += abs(x);
      }
    return {support, size};
  }

  PermGroup g_;
  std::vector<std::size_t> ranks_;
  std::vector<std::vector<IntVector>> boundaries_;
};

/// H^0..H^degree_max of Hom_G(F_*, M) for a resolution of length >= degree_max + 1.
inline CohomologyTable resolution_cohomology(const FreeResolution& res, const CoefficientModule& coeff,
                                             int degree_max) {
  detail::check_degree(degree_max);
  if (res.length() < degree_max + 1) fail(ErrorKind::InvalidParameters, "resolution too short");
  const PermGroup& g = res.group();
  const ModuleAction mod = module_action(g, coeff);
  const std::size_t n = g.order(), d = mod.rank;

  // Hom_G(F_k, M) = M^{r_k}; (delta f)(e_i) = f(d e_i) = sum c_{i,(j,h)} h . f(e_j).
  auto coboundary = [&](int k) {
    SparseMatrix m;
    const std::size_t src = res.rank(k), dst = res.rank(k + 1);
    m.cols = src * d;
    m.rows.resize(dst * d);
    std::map<std::size_t, Integer> acc;
    for (std::size_t i = 0; i < dst; ++i) {
      const IntVector& image = res.boundary(k + 1, i);
      for (std::size_t b = 0; b < d; ++b) {
        acc.clear();
        for (std::size_t j = 0; j < src; ++j)
          for (std::size_t h = 0; h < n; ++h) {
            const Integer& c = image[j * n + h];
            if (sgn(c) == 0) continue;
            // h . e_{b'} = e_b  <=>  b' = h^-1 . b
            acc[j * d + mod.act[g.inv(h)][b]] += c;
          }
        auto& row = m.rows[i * d + b];
        for (auto& [c, v] : acc)
          if (sgn(v) != 0) row.emplace_back(static_cast<std::uint32_t>(c), std::move(v));
      }
    }
    return m;
  };

  CohomologyTable out;
  std::vector<Integer> incoming;
  for (int k = 0; k <= degree_max; ++k) {
    std::vector<Integer> outgoing = elementary_divisors(coboundary(k));
    out.entries.push_back(detail::cohomology_from(res.rank(k) * d, incoming, outgoing.size()));
    incoming = std::move(outgoing);
  }
  out.group = g.label();
  out.coefficients = coeff.to_string();
  return out;
}

enum class OracleMethod { Auto, Bar, Resolution };

struct OracleLimits {
  double bar_cost_bound = 20000;             // cochains in the bar complex
  std::size_t resolution_rank_bound = 4000;  // Z-rank of any free module
};

/// Independent cohomology computation. Auto uses the normalized bar
/// resolution when its cochain count is under the bound, and the
/// kernel-built resolution otherwise.
inline CohomologyTable oracle_cohomology(const PermGroup& g, const CoefficientModule& coeff, int degree_max,
                                         OracleMethod method = OracleMethod::Auto, OracleLimits limits = {}) {
  detail::check_degree(degree_max);
  const std::size_t rank = module_action(g, coeff).rank;
  if (method == OracleMethod::Auto)
    method = bar_cost(g.order(), rank, degree_max) <= limits.bar_cost_bound ? OracleMethod::Bar
                                                                             : OracleMethod::Resolution;
  if (method == OracleMethod::Bar) return bar_cohomology(g, coeff, degree_max, limits.bar_cost_bound);
  FreeResolution res(g, degree_max + 1, limits.resolution_rank_bound);
  return resolution_cohomology(res, coeff, degree_max);
}

}  // namespace pseudofree
