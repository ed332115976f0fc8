#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "pseudofree/abelian.hpp"
#include "pseudofree/error.hpp"
#include "pseudofree/families.hpp"
#include "pseudofree/group.hpp"
#include "pseudofree/lattice.hpp"

namespace pseudofree {

enum class CoefficientKind { TrivialZ, GroupRing, Permutation };

/// Z, Z[G], or Z[G/H] with G acting by left translation.
struct CoefficientModule {
  CoefficientKind kind = CoefficientKind::TrivialZ;
  std::optional<ElementSet> subgroup;  // Permutation only
  std::string subgroup_name;           // for display, e.g. "C(3)"

  static CoefficientModule trivial() { return {}; }
  static CoefficientModule group_ring() { return {CoefficientKind::GroupRing, std::nullopt, {}}; }

  static CoefficientModule permutation(const SubgroupLattice& lat, std::size_t index) {
    if (index >= lat.size()) fail(ErrorKind::InvalidCoefficients, "subgroup index out of range");
    return {CoefficientKind::Permutation, lat[index].elements, describe(SubgroupLattice(lat.as_group(index)))};
  }

  /// Validates that h is a subgroup of g before accepting it.
  static CoefficientModule permutation(const SubgroupLattice& lat, const ElementSet& h) {
    auto idx = lat.index_of(h);
    if (!idx) fail(ErrorKind::InvalidCoefficients, "coefficient subgroup is not in the lattice of G");
    return permutation(lat, *idx);
  }

  std::string to_string() const {
    switch (kind) {
      case CoefficientKind::TrivialZ: return "Z";
      case CoefficientKind::GroupRing: return "Z[G]";
      case CoefficientKind::Permutation: return "Z[G/" + subgroup_name + "]";
    }
    return "?";
  }
};

/// Degree-indexed cohomology groups H^0 .. H^degree_max.
struct CohomologyTable {
  std::vector<AbelianGroup> entries;
  std::optional<int> period;
  std::string group;
  std::string coefficients = "Z";

  int degree_max() const { return static_cast<int>(entries.size()) - 1; }

  const AbelianGroup& at(int degree) const {
    if (degree < 0 || degree > degree_max())
      fail(ErrorKind::DegreeOutOfRange,
           "degree " + std::to_string(degree) + " outside computed range 0.." + std::to_string(degree_max()));
    return entries[static_cast<std::size_t>(degree)];
  }

  bool same_entries(const CohomologyTable& other) const { return entries == other.entries; }

  std::string to_string() const {
    std::string out = "[";
    for (std::size_t i = 0; i < entries.size(); ++i) out += (i ? ", " : "") + entries[i].to_string();
    return out + "]";
  }

  bool operator==(const CohomologyTable&) const = default;
};

/// Order of a finite entry as prime -> exponent.
inline FactoredOrder table_order_at(const CohomologyTable& table, int degree) {
  const auto& entry = table.at(degree);
  if (degree == 0 || !entry.is_finite())
    fail(ErrorKind::InfiniteEntry, "H^" + std::to_string(degree) + " = " + entry.to_string() + " is infinite");
  return entry.order();
}

namespace detail {
inline void check_degree(int degree_max) {
  if (degree_max < 0) fail(ErrorKind::DegreeOutOfRange, "degree_max must be nonnegative");
}
}  // namespace detail

inline CohomologyTable cyclic_table(std::uint64_t n, int degree_max) {
  if (n < 1) fail(ErrorKind::InvalidParameters, "cyclic order must be positive");
  detail::check_degree(degree_max);
  CohomologyTable t;
  t.group = "C(" + std::to_string(n) + ")";
  t.period = 2;
  for (int i = 0; i <= degree_max; ++i)
    t.entries.push_back(i == 0 ? AbelianGroup::free(1) : i % 2 ? AbelianGroup::trivial() : AbelianGroup::cyclic(n));
  return t;
}

/// Period-4 table; the caller vouches for the period.
inline CohomologyTable periodic_table(std::uint64_t order, const AbelianGroup& abelianization, int degree_max) {
  detail::check_degree(degree_max);
  CohomologyTable t;
  t.period = 4;
  for (int i = 0; i <= degree_max; ++i) {
    if (i == 0) t.entries.push_back(AbelianGroup::free(1));
    else if (i % 4 == 2) t.entries.push_back(abelianization);
    else if (i % 4 == 0) t.entries.push_back(AbelianGroup::cyclic(order));
    else t.entries.push_back(AbelianGroup::trivial());
  }
  return t;
}

inline CohomologyTable group_ring_table(int degree_max) {
  detail::check_degree(degree_max);
  CohomologyTable t;
  t.coefficients = "Z[G]";
  t.entries.assign(static_cast<std::size_t>(degree_max) + 1, AbelianGroup::trivial());
  t.entries[0] = AbelianGroup::free(1);
  return t;
}

/// The four coefficient modules available for a nonabelian group of order pq.
enum class MetaCoefficient { TrivialZ, GroupRing, CosetsOfCq, CosetsOfCp };

inline CohomologyTable metacyclic_table(std::uint64_t p, std::uint64_t q, std::uint64_t r, MetaCoefficient coeff,
                                        int degree_max) {
  validate(FamilySpec{Family::Meta, {p, q, r}});
  detail::check_degree(degree_max);
  if (coeff == MetaCoefficient::GroupRing) {
    auto t = group_ring_table(degree_max);
    t.group = FamilySpec{Family::Meta, {p, q, r}}.to_string();
    return t;
  }
  CohomologyTable t;
  t.group = FamilySpec{Family::Meta, {p, q, r}}.to_string();
  for (int i = 0; i <= degree_max; ++i) {
    if (i == 0) {
      t.entries.push_back(AbelianGroup::free(1));
      continue;
    }
    if (i % 2) {
      t.entries.push_back(AbelianGroup::trivial());
      continue;
    }
    const auto k = static_cast<std::uint64_t>(i / 2);
    switch (coeff) {
      case MetaCoefficient::TrivialZ:
        t.entries.push_back(AbelianGroup::cyclic(k % q == 0 ? p * q : q));
        break;
      case MetaCoefficient::CosetsOfCq:
        t.entries.push_back(AbelianGroup::cyclic(q));
        break;
      case MetaCoefficient::CosetsOfCp:
        t.entries.push_back(AbelianGroup::cyclic(p));
        break;
      case MetaCoefficient::GroupRing:
        break;
    }
  }
  switch (coeff) {
    case MetaCoefficient::TrivialZ:
      t.period = static_cast<int>(2 * q);
      t.coefficients = "Z";
      break;
    case MetaCoefficient::CosetsOfCq:
      t.coefficients = "Z[G/C(" + std::to_string(q) + ")]";
      break;
    case MetaCoefficient::CosetsOfCp:
      t.coefficients = "Z[G/C(" + std::to_string(p) + ")]";
      break;
    case MetaCoefficient::GroupRing:
      break;
  }
  return t;
}

/// Trivial coefficients rebuilt from the pieces: the C_q-invariants of
/// H^2k(C_p) = Z_p, where b acts by r^k, plus Z_q from the quotient.
inline CohomologyTable metacyclic_via_invariants(std::uint64_t p, std::uint64_t q, std::uint64_t r, int degree_max) {
  validate(FamilySpec{Family::Meta, {p, q, r}});
  detail::check_degree(degree_max);
  CohomologyTable t;
  t.group = FamilySpec{Family::Meta, {p, q, r}}.to_string();
  for (int i = 0; i <= degree_max; ++i) {
    if (i == 0) {
      t.entries.push_back(AbelianGroup::free(1));
    } else if (i % 2) {
      t.entries.push_back(AbelianGroup::trivial());
    } else {
      const auto k = static_cast<std::uint64_t>(i / 2);
      std::vector<std::uint64_t> parts{q};
      if (pow_mod(r, k, p) == 1) parts.push_back(p);
      t.entries.push_back(AbelianGroup::from_cyclic(parts));
    }
  }
  // Smallest period visible in the formula: r^k = 1 mod p first at k = ord(r).
  std::uint64_t ord = 1;
  while (pow_mod(r, ord, p) != 1) ++ord;
  t.period = static_cast<int>(2 * ord);
  return t;
}

/// Cohomological period of a group with periodic cohomology, assembled from
/// p-periods: 2|N(P)/C(P)| for a cyclic Sylow P, 4 for a quaternion Sylow 2.
/// Absent when G is not periodic.
inline std::optional<int> cohomology_period(const SubgroupLattice& lat) {
  if (!has_periodic_cohomology(lat)) return std::nullopt;
  const PermGroup& g = lat.group();
  const std::uint64_t n = g.order();
  int period = 2;
  if (n == 1) return period;
  for (const auto& [p, e] : factorize(n)) {
    std::uint64_t pa = 1;
    for (std::uint64_t i = 0; i < e; ++i) pa *= p;
    std::size_t sylow = lat.size();
    for (std::size_t i = 0; i < lat.size(); ++i)
      if (lat[i].order == pa) {
        sylow = i;
        break;
      }
    int local = 4;
    if (lat.is_cyclic(sylow)) {
      const auto members = lat[sylow].elements.indices();
      std::size_t normalizer = 0, centralizer = 0;
      for (std::size_t x = 0; x < g.order(); ++x) {
        bool normalizes = true, centralizes = true;
        for (std::size_t y : members) {
          const std::size_t c = g.conjugate(x, y);
          if (!lat[sylow].elements.contains(c)) normalizes = false;
          if (c != y) centralizes = false;
        }
        normalizer += normalizes;
        centralizer += centralizes;
      }
      local = static_cast<int>(2 * (normalizer / centralizer));
    }
    period = std::lcm(period, local);
  }
  return period;
}

/// Closed-form table for G with the given coefficients, where one is known:
/// cyclic, nonabelian of order pq, or period 4 for trivial coefficients;
/// Z[G] always; Z[G/H] through Shapiro's isomorphism with H^*(H; Z).
inline std::optional<CohomologyTable> formula_table(const SubgroupLattice& lat, const CoefficientModule& coeff,
                                                    int degree_max) {
  detail::check_degree(degree_max);
  const PermGroup& g = lat.group();
  std::optional<CohomologyTable> out;
  switch (coeff.kind) {
    case CoefficientKind::GroupRing:
      out = group_ring_table(degree_max);
      break;
    case CoefficientKind::Permutation: {
      if (!coeff.subgroup) fail(ErrorKind::InvalidCoefficients, "permutation module without a subgroup");
      auto idx = lat.index_of(*coeff.subgroup);
      if (!idx) fail(ErrorKind::InvalidCoefficients, "coefficient subgroup is not in the lattice of G");
      if (*idx == lat.whole()) {
        out = formula_table(lat, CoefficientModule::trivial(), degree_max);
      } else if (*idx == lat.trivial()) {
        out = group_ring_table(degree_max);
      } else {
        out = formula_table(SubgroupLattice(lat.as_group(*idx)), CoefficientModule::trivial(), degree_max);
      }
      break;
    }
    case CoefficientKind::TrivialZ: {
      const std::uint64_t n = g.order();
      if (g.is_cyclic()) {
        out = cyclic_table(n, degree_max);
        break;
      }
      const auto primes = factorize(n);
      if (primes.size() == 2 && primes.begin()->second == 1 && primes.rbegin()->second == 1 && !g.is_abelian()) {
        const auto shape = metacyclic_shape(lat);
        if (shape) out = metacyclic_table(shape->k, shape->q, shape->r, MetaCoefficient::TrivialZ, degree_max);
        break;
      }
      if (cohomology_period(lat) == 4) out = periodic_table(n, g.abelianization(), degree_max);
      break;
    }
  }
  if (out) {
    out->group = describe(lat);
    out->coefficients = coeff.to_string();
  }
  return out;
}

inline std::optional<CohomologyTable> formula_table(const PermGroup& g, const CoefficientModule& coeff,
                                                    int degree_max) {
  return formula_table(SubgroupLattice(g), coeff, degree_max);
}

}  // namespace pseudofree
