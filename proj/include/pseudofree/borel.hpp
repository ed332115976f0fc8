#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "pseudofree/abelian.hpp"
#include "pseudofree/cohomology.hpp"
#include "pseudofree/error.hpp"
#include "pseudofree/families.hpp"
#include "pseudofree/lattice.hpp"

namespace pseudofree {

/// Singular orbits of a pseudofree action of a nonabelian group of order pq:
/// x_1 fixed points, x_p orbits of size p (isotropy a conjugate of C_q),
/// x_q orbits of size q (isotropy C_p).
struct SingularProfile {
  std::uint64_t x1 = 0, xp = 0, xq = 0;
  bool operator==(const SingularProfile&) const = default;
};

using OrbitStructure = SingularProfile;

inline std::int64_t lefschetz_number(std::int64_t t0, std::int64_t t2, std::int64_t t4) { return t0 + t2 + t4; }

inline std::uint64_t pseudofree_fixed_count(std::uint64_t b2) { return b2 + 2; }

/// |H^{n-4}(G)| * |H^{n-2}(G)|^b2 * |H^n(G)|: the order of H^n(X_G) when the
/// Borel spectral sequence collapses.
inline FactoredOrder collapsed_total_order(const CohomologyTable& table, std::uint64_t b2, int n) {
  if (n <= 4) fail(ErrorKind::DegreeOutOfRange, "collapsed order needs n > 4, got " + std::to_string(n));
  if (n > table.degree_max())
    fail(ErrorKind::DegreeOutOfRange,
         "table computed to degree " + std::to_string(table.degree_max()) + ", need " + std::to_string(n));
  return table_order_at(table, n - 4) * table_order_at(table, n - 2).pow(b2) * table_order_at(table, n);
}

/// The tables a singular set of a nonabelian order-pq group draws on.
struct MetacyclicTables {
  std::uint64_t p = 0, q = 0, r = 0;
  CohomologyTable trivial;       // orbits of size 1
  CohomologyTable cosets_of_cq;  // orbits of size p
  CohomologyTable cosets_of_cp;  // orbits of size q

  static MetacyclicTables build(std::uint64_t p, std::uint64_t q, std::uint64_t r, int degree_max) {
    return {p,
            q,
            r,
            metacyclic_table(p, q, r, MetaCoefficient::TrivialZ, degree_max),
            metacyclic_table(p, q, r, MetaCoefficient::CosetsOfCq, degree_max),
            metacyclic_table(p, q, r, MetaCoefficient::CosetsOfCp, degree_max)};
  }

  /// Uses the smallest twist r; absent when no nonabelian group of order pq exists.
  static std::optional<MetacyclicTables> for_primes(std::uint64_t p, std::uint64_t q, int degree_max) {
    if (!is_prime(p) || !is_prime(q) || p == q) return std::nullopt;
    auto r = smallest_twist(p, q);
    if (!r) return std::nullopt;
    return build(p, q, *r, degree_max);
  }
};

/// Product over orbit types of |H^n(G; Z[G/H])|^count.
inline FactoredOrder singular_set_order(const MetacyclicTables& t, const SingularProfile& profile, int n) {
  if (n <= 4) fail(ErrorKind::DegreeOutOfRange, "singular set comparison needs n > 4, got " + std::to_string(n));
  return table_order_at(t.trivial, n).pow(profile.x1) * table_order_at(t.cosets_of_cq, n).pow(profile.xp) *
         table_order_at(t.cosets_of_cp, n).pow(profile.xq);
}

struct FixedSetOrder {
  FactoredOrder order;
  std::optional<std::string> warning;
};

/// |G^ab|^num_fixed: the order of H^n(X^G x B_G) for n = 2 mod 4, n > 4.
inline FixedSetOrder semifree_fixed_set_order(std::uint64_t abelianization_order, std::uint64_t num_fixed, int n) {
  if (n <= 4 || n % 4 != 2)
    fail(ErrorKind::DegreeOutOfRange, "fixed set order is defined for n = 2 mod 4, n > 4; got " + std::to_string(n));
  if (abelianization_order == 0) fail(ErrorKind::InvalidParameters, "abelianization order must be positive");
  FixedSetOrder out{FactoredOrder::of(abelianization_order).pow(num_fixed), std::nullopt};
  if (abelianization_order == 1) out.warning = "trivial abelianization: only the trivial group qualifies";
  return out;
}

struct SemifreeTest {
  bool pass = false;
  std::uint64_t b2 = 0;
  FactoredOrder collapsed;  // |G^ab|^2 |G|^b2
  FactoredOrder fixed_set;  // |G^ab|^(b2+2)
};

/// Compares the two computations of |H^6| for a semifree action with
/// isolated fixed points; equality forces |G^ab| = |G|.
inline SemifreeTest semifree_cyclicity_test(const SubgroupLattice& lat, std::uint64_t b2) {
  const PermGroup& g = lat.group();
  if (b2 < 1) fail(ErrorKind::InvalidParameters, "semifree test needs b2 >= 1");
  if (!has_periodic_cohomology(lat)) fail(ErrorKind::NotPeriodic, "group does not have periodic cohomology");
  const int n = 6;
  const AbelianGroup ab = g.abelianization();
  const CohomologyTable table = g.is_cyclic() ? cyclic_table(g.order(), n) : periodic_table(g.order(), ab, n);
  SemifreeTest t;
  t.b2 = b2;
  t.collapsed = collapsed_total_order(table, b2, n);
  t.fixed_set = semifree_fixed_set_order(ab.order().to_integer().value(), pseudofree_fixed_count(b2), n).order;
  t.pass = t.collapsed == t.fixed_set;
  return t;
}

inline SemifreeTest semifree_cyclicity_test(const PermGroup& g, std::uint64_t b2) {
  return semifree_cyclicity_test(SubgroupLattice(g), b2);
}

/// Closed-form orders for H^n(X_G), n in {4q, 4q+2}, as originally stated.
inline FactoredOrder metacyclic_closed_form_order(std::uint64_t p, std::uint64_t q, std::uint64_t m, int n) {
  const auto fp = FactoredOrder::of(p), fq = FactoredOrder::of(q);
  if (n == static_cast<int>(4 * q)) return fp.pow(2) * fq.pow(m + 2);
  if (n == static_cast<int>(4 * q + 2)) return fp.pow(m) * fq.pow(m + 2);
  fail(ErrorKind::DegreeOutOfRange, "closed form covers n = 4q and 4q+2 only");
}

namespace detail {

using Rational = boost::rational<std::int64_t>;

// Unique solution of an overdetermined system, if consistent and of full
// column rank.
inline std::optional<std::vector<Rational>> solve_exact(std::vector<std::vector<Rational>> rows, std::size_t unknowns) {
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_col;
  for (std::size_t c = 0; c < unknowns && rank < rows.size(); ++c) {
    std::size_t pr = rank;
    while (pr < rows.size() && rows[pr][c].numerator() == 0) ++pr;
    if (pr == rows.size()) continue;
    std::swap(rows[rank], rows[pr]);
    const Rational pivot = rows[rank][c];
    for (auto& x : rows[rank]) x /= pivot;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][c].numerator() == 0) continue;
      const Rational f = rows[r][c];
      for (std::size_t j = 0; j <= unknowns; ++j) rows[r][j] -= f * rows[rank][j];
    }
    pivot_col.push_back(c);
    ++rank;
  }
  for (std::size_t r = rank; r < rows.size(); ++r)
    if (rows[r][unknowns].numerator() != 0) return std::nullopt;  // inconsistent
  if (rank < unknowns) return std::nullopt;            // not unique
  std::vector<Rational> x(unknowns);
  for (std::size_t r = 0; r < rank; ++r) x[pivot_col[r]] = rows[r][unknowns];
  return x;
}

}  // namespace detail

/// Exponent equations for (x_1, x_p, x_q) from matching orders at n = 4q
/// and n = 4q + 2, prime by prime.
inline std::vector<std::vector<detail::Rational>> orbit_equations(const MetacyclicTables& t, std::uint64_t m) {
  std::vector<std::vector<detail::Rational>> rows;
  for (int n : {static_cast<int>(4 * t.q), static_cast<int>(4 * t.q + 2)}) {
    const auto total = collapsed_total_order(t.trivial, m, n);
    const auto fixed = table_order_at(t.trivial, n), size_p = table_order_at(t.cosets_of_cq, n),
               size_q = table_order_at(t.cosets_of_cp, n);
    for (std::uint64_t prime : {t.p, t.q})
      rows.push_back({static_cast<std::int64_t>(fixed.exponent(prime)), static_cast<std::int64_t>(size_p.exponent(prime)),
                      static_cast<std::int64_t>(size_q.exponent(prime)), static_cast<std::int64_t>(total.exponent(prime))});
  }
  return rows;
}

/// The orbit counts forced by the order equations; absent when the unique
/// solution is negative or fractional.
inline std::optional<OrbitStructure> orbit_structure_solve(std::uint64_t p, std::uint64_t q, std::uint64_t m) {
  auto tables = MetacyclicTables::for_primes(p, q, static_cast<int>(4 * q + 2));
  if (!tables)
    fail(ErrorKind::InvalidParameters,
         "no nonabelian group of order " + std::to_string(p) + "*" + std::to_string(q) + " (need q | p-1)");
  auto x = detail::solve_exact(orbit_equations(*tables, m), 3);
  if (!x) return std::nullopt;
  OrbitStructure out;
  std::array<std::uint64_t*, 3> slots{&out.x1, &out.xp, &out.xq};
  for (std::size_t i = 0; i < 3; ++i) {
    if ((*x)[i].denominator() != 1 || (*x)[i].numerator() < 0) return std::nullopt;
    *slots[i] = static_cast<std::uint64_t>((*x)[i].numerator());
  }
  return out;
}

struct DegreeCheck {
  int degree = 0;
  FactoredOrder collapsed, singular;
  bool match = false;
  bool operator==(const DegreeCheck&) const = default;
};

struct AccountingReport {
  std::vector<DegreeCheck> checks;
  bool all_match() const {
    for (const auto& c : checks)
      if (!c.match) return false;
    return true;
  }
  bool operator==(const AccountingReport&) const = default;
};

/// Compares |H^n(X_G)| with |H^n(S_G)| degree by degree (n > 4).
inline AccountingReport accounting_consistency(const MetacyclicTables& t, const SingularProfile& profile,
                                               std::uint64_t b2, const std::set<int>& degrees) {
  AccountingReport report;
  for (int n : degrees) {
    DegreeCheck c;
    c.degree = n;
    c.collapsed = collapsed_total_order(t.trivial, b2, n);
    c.singular = singular_set_order(t, profile, n);
    c.match = c.collapsed == c.singular;
    report.checks.push_back(std::move(c));
  }
  return report;
}

}  // namespace pseudofree
