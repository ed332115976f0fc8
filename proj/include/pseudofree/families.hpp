#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "pseudofree/abelian.hpp"
#include "pseudofree/error.hpp"
#include "pseudofree/group.hpp"
#include "pseudofree/permutation.hpp"

namespace pseudofree {

enum class Family { Cyclic, Dihedral, Quaternion, Meta, ElemAb, Alternating, Symmetric };

/// A named construction: C(n), D(m), Q(m), Meta(p,q,r), ElemAb(p,r), A(n), S(n).
struct FamilySpec {
  Family family;
  std::vector<std::uint64_t> params;

  std::string to_string() const {
    static const char* names[] = {"C", "D", "Q", "Meta", "ElemAb", "A", "S"};
    std::string out = names[static_cast<int>(family)];
    out += '(';
    for (std::size_t i = 0; i < params.size(); ++i) out += (i ? "," : "") + std::to_string(params[i]);
    return out + ')';
  }
  bool operator==(const FamilySpec&) const = default;
};

/// Smallest r in [2, p) with r^q = 1 mod p, if any.
inline std::optional<std::uint64_t> smallest_twist(std::uint64_t p, std::uint64_t q) {
  for (std::uint64_t r = 2; r < p; ++r)
    if (pow_mod(r, q, p) == 1) return r;
  return std::nullopt;
}

inline void validate(const FamilySpec& spec) {
  auto bad = [&](const std::string& why) { fail(ErrorKind::InvalidParameters, spec.to_string() + ": " + why); };
  const auto& a = spec.params;
  const std::size_t want = spec.family == Family::Meta ? 3 : spec.family == Family::ElemAb ? 2 : 1;
  if (a.size() != want) bad("expected " + std::to_string(want) + " parameter(s)");
  switch (spec.family) {
    case Family::Cyclic:
      if (a[0] < 1) bad("order must be positive");
      break;
    case Family::Dihedral:
      if (a[0] < 2 || a[0] % 2) bad("dihedral order must be even and at least 2");
      break;
    case Family::Quaternion:
      if (a[0] < 8 || a[0] % 4) bad("quaternion order must be a multiple of 4 and at least 8");
      break;
    case Family::Meta: {
      const auto [p, q, r] = std::tuple{a[0], a[1], a[2]};
      if (!is_prime(p)) bad(std::to_string(p) + " is not prime");
      if (!is_prime(q)) bad(std::to_string(q) + " is not prime");
      if (p == q) bad("p and q must be distinct");
      if ((p - 1) % q != 0) bad("no twist of order " + std::to_string(q) + " exists mod " + std::to_string(p));
      if (r % p == 1 % p) bad("r must not be 1 mod p (the group would be abelian)");
      if (pow_mod(r, q, p) != 1) bad("r^q must be 1 mod p");
      break;
    }
    case Family::ElemAb:
      if (!is_prime(a[0])) bad(std::to_string(a[0]) + " is not prime");
      break;
    case Family::Alternating:
    case Family::Symmetric:
      if (a[0] < 1) bad("degree must be positive");
      break;
  }
}

namespace detail {
inline Permutation cycle_perm(std::size_t n, std::size_t start, std::size_t len) {
  std::vector<Point> c;
  for (std::size_t i = 0; i < len; ++i) c.push_back(static_cast<Point>(start + i));
  return Permutation::from_cycles(n, {c});
}
}  // namespace detail

/// A faithful permutation realization of a named family.
inline PermGroup named_group(const FamilySpec& spec, std::size_t order_cap = kDefaultOrderCap) {
  validate(spec);
  const auto& a = spec.params;
  std::vector<Permutation> gens;
  std::size_t degree = 1;
  switch (spec.family) {
    case Family::Cyclic: {
      degree = a[0];
      if (a[0] > 1) gens.push_back(detail::cycle_perm(degree, 0, degree));
      break;
    }
    case Family::Dihedral: {
      const std::size_t n = a[0] / 2;
      if (n == 1) {
        degree = 2;
        gens.push_back(detail::cycle_perm(2, 0, 2));
      } else if (n == 2) {
        degree = 4;
        gens.push_back(Permutation::from_cycles(4, {{0, 1}, {2, 3}}));
        gens.push_back(Permutation::from_cycles(4, {{0, 2}, {1, 3}}));
      } else {
        degree = n;
        std::vector<Point> reflect(n);
        for (std::size_t x = 0; x < n; ++x) reflect[x] = static_cast<Point>((n - x) % n);
        gens.push_back(detail::cycle_perm(n, 0, n));
        gens.push_back(Permutation(reflect));
      }
      break;
    }
    case Family::Quaternion: {
      // Left regular action on words a^i b^j, a^(2n) = 1, b^2 = a^n, b a b^-1 = a^-1.
      const std::size_t m = a[0], n = m / 4, two_n = 2 * n;
      degree = m;
      auto index = [&](std::size_t i, std::size_t j) { return static_cast<Point>(i % two_n + two_n * j); };
      std::vector<Point> left_a(m), left_b(m);
      for (std::size_t i = 0; i < two_n; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
          left_a[index(i, j)] = index(i + 1, j);
          // b * a^i b^j = a^(-i) b^(1+j)
          left_b[index(i, j)] = j == 0 ? index(two_n - i, 1) : index(two_n - i + n, 0);
        }
      gens.push_back(Permutation(left_a));
      gens.push_back(Permutation(left_b));
      break;
    }
    case Family::Meta: {
      // a: x -> x+1 and b: x -> r x on Z/p, with b also cycling q extra points.
      const std::size_t p = a[0], q = a[1], r = a[2] % p;
      degree = p + q;
      std::vector<Point> b(degree);
      for (std::size_t x = 0; x < p; ++x) b[x] = static_cast<Point>(x * r % p);
      for (std::size_t x = 0; x < q; ++x) b[p + x] = static_cast<Point>(p + (x + 1) % q);
      gens.push_back(detail::cycle_perm(degree, 0, p));
      gens.push_back(Permutation(b));
      break;
    }
    case Family::ElemAb: {
      const std::size_t p = a[0], rank = a[1];
      degree = std::max<std::size_t>(1, p * rank);
      for (std::size_t i = 0; i < rank; ++i) gens.push_back(detail::cycle_perm(degree, i * p, p));
      break;
    }
    case Family::Alternating: {
      const std::size_t n = a[0];
      degree = n;
      if (n >= 3) {
        gens.push_back(detail::cycle_perm(n, 0, 3));
        if (n >= 4) gens.push_back(n % 2 ? detail::cycle_perm(n, 0, n) : detail::cycle_perm(n, 1, n - 1));
      }
      break;
    }
    case Family::Symmetric: {
      const std::size_t n = a[0];
      degree = n;
      if (n >= 2) {
        gens.push_back(detail::cycle_perm(n, 0, 2));
        if (n >= 3) gens.push_back(detail::cycle_perm(n, 0, n));
      }
      break;
    }
  }
  return PermGroup::generate(std::move(gens), degree, order_cap);
}

/// Direct product acting on the disjoint union of the two domains.
inline PermGroup direct_product(const PermGroup& x, const PermGroup& y, std::size_t order_cap = kDefaultOrderCap) {
  if (x.order() * y.order() > order_cap)
    fail(ErrorKind::OrderCapExceeded, "direct product order exceeds cap " + std::to_string(order_cap));
  const std::size_t n = x.degree() + y.degree();
  std::vector<Permutation> gens;
  for (const auto& g : x.generators()) gens.push_back(g.shifted(n, 0));
  for (const auto& g : y.generators()) gens.push_back(g.shifted(n, x.degree()));
  return PermGroup::generate(std::move(gens), n, order_cap);
}

}  // namespace pseudofree
